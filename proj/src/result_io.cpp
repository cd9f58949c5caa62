#include "lgspi/result_io.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "lgspi/errors.hpp"

namespace lgspi {
namespace {

using json = nlohmann::json;

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    return rows;
}

Matrix matrix_from(const json& j, std::size_t cols_if_empty) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : j) rows.push_back(r.get<std::vector<double>>());
    if (rows.empty()) return Matrix(0, cols_if_empty);
    return Matrix::from_rows(rows);
}

json diagnostics_json(const Diagnostics& d) {
    return {{"multiplications", d.multiplications}, {"integrations", d.integrations},
            {"substitutions", d.substitutions},     {"conditionings", d.conditionings},
            {"cache_hits", d.cache_hits},           {"subtree_requests", d.subtree_requests},
            {"deferred_merges", d.deferred_merges}, {"cache_entries", d.cache_entries}};
}

std::string human(const QueryResult& result) {
    const CombinedRepr& r = result.answer;
    std::vector<std::string> labels;
    for (const MemberBlock& b : r.members())
        for (std::size_t k = 0; k < b.dim; ++k) labels.push_back(b.dim == 1 ? b.id : b.id + "[" + std::to_string(k) + "]");

    std::size_t width = 12;
    for (const auto& l : labels) width = std::max(width, l.size() + 2);
    auto cell = [&](const std::string& s) {
        std::string out(width > s.size() ? width - s.size() : 1, ' ');
        return out + s;
    };

    std::ostringstream out;
    out << cell("") << cell("mean");
    for (const auto& l : labels) out << cell(l);
    out << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << cell(labels[i]) << cell(format_real(r.mean()[i]));
        for (std::size_t j = 0; j < labels.size(); ++j) out << cell(format_real(r.noise_cov()(i, j)));
        out << '\n';
    }
    for (const ExternalLink& e : r.externals()) {
        out << "\nlink to " << e.id << ":\n";
        for (std::size_t i = 0; i < e.K.rows(); ++i) {
            out << cell(labels[i]);
            for (std::size_t j = 0; j < e.K.cols(); ++j) out << cell(format_real(e.K(i, j)));
            out << '\n';
        }
    }
    const Diagnostics& d = result.diagnostics;
    out << "\nmultiplications " << d.multiplications << "  integrations " << d.integrations << "  substitutions "
        << d.substitutions << "  conditionings " << d.conditionings << "\ncache_hits " << d.cache_hits
        << "  subtree_requests " << d.subtree_requests << "  deferred_merges " << d.deferred_merges
        << "  cache_entries " << d.cache_entries << '\n';
    return out.str();
}

}  // namespace

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string emit_result(const QueryResult& result, OutputFormat format) {
    if (format == OutputFormat::Human) return human(result);
    const CombinedRepr& r = result.answer;
    json members = json::array();
    for (const MemberBlock& b : r.members()) members.push_back({{"id", b.id}, {"dim", b.dim}, {"offset", b.offset}});
    json links = json::array();
    for (const ExternalLink& e : r.externals()) links.push_back({{"id", e.id}, {"K", matrix_json(e.K)}});
    json doc{{"members", members},
             {"mean", r.mean()},
             {"cov", matrix_json(r.noise_cov())},
             {"links", links},
             {"diagnostics", diagnostics_json(result.diagnostics)}};
    return doc.dump(2) + "\n";
}

ResultDocument parse_result_document(std::string_view text) {
    try {
        const json doc = json::parse(text);
        ResultDocument out;
        for (const auto& m : doc.at("members"))
            out.members.push_back({m.at("id").get<std::string>(), m.at("dim").get<std::size_t>(),
                                   m.at("offset").get<std::size_t>()});
        out.mean = doc.at("mean").get<Vector>();
        out.cov = matrix_from(doc.at("cov"), 0);
        for (const auto& l : doc.at("links")) out.links.push_back({l.at("id").get<std::string>(), matrix_from(l.at("K"), 0)});
        for (const auto& [k, v] : doc.at("diagnostics").items()) out.diagnostics[k] = v.get<std::size_t>();
        return out;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::SyntaxError, std::string("result document: ") + e.what());
    }
}

}  // namespace lgspi
