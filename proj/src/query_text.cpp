#include "lgspi/query_text.hpp"

#include <charconv>
#include <sstream>
#include <string>

#include "lgspi/errors.hpp"

namespace lgspi {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <class F>
void split(std::string_view s, char sep, F&& f) {
    while (true) {
        const auto pos = s.find(sep);
        f(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) break;
        s.remove_prefix(pos + 1);
    }
}

double parse_real(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw Error(ErrorKind::SyntaxError, "'" + std::string(s) + "' is not a number");
    return v;
}

}  // namespace

IdSet parse_id_list(std::string_view text) {
    IdSet out;
    if (trim(text).empty()) return out;
    split(text, ',', [&](std::string_view id) {
        if (id.empty()) throw Error(ErrorKind::SyntaxError, "empty id in list '" + std::string(text) + "'");
        out.emplace(id);
    });
    return out;
}

EvidenceMap parse_evidence(std::string_view text) {
    EvidenceMap out;
    if (trim(text).empty()) return out;
    split(text, ';', [&](std::string_view item) {
        if (item.empty()) return;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorKind::SyntaxError, "evidence item '" + std::string(item) + "' has no '='");
        const std::string id(trim(item.substr(0, eq)));
        if (id.empty()) throw Error(ErrorKind::SyntaxError, "evidence item '" + std::string(item) + "' has no id");
        Vector values;
        split(item.substr(eq + 1), ',', [&](std::string_view v) { values.push_back(parse_real(v)); });
        if (!out.emplace(id, std::move(values)).second)
            throw Error(ErrorKind::SyntaxError, "evidence for '" + id + "' given twice");
    });
    return out;
}

Query parse_query_line(std::string_view line) {
    std::istringstream in{std::string(line)};
    std::string tok;
    Query q;
    auto value = [&](const std::string& flag) {
        std::string v;
        if (!(in >> v)) throw Error(ErrorKind::SyntaxError, flag + " needs a value");
        return v;
    };
    while (in >> tok) {
        std::string flag = tok, inline_value;
        if (const auto eq = tok.find('='); eq != std::string::npos && tok.rfind("--", 0) == 0) {
            flag = tok.substr(0, eq);
            inline_value = tok.substr(eq + 1);
        }
        auto get = [&] { return inline_value.empty() ? value(flag) : inline_value; };
        if (flag == "--target") q.targets = parse_id_list(get());
        else if (flag == "--given") q.given = parse_id_list(get());
        else if (flag == "--evidence") q.evidence = parse_evidence(get());
        else throw Error(ErrorKind::SyntaxError, "unknown query token '" + tok + "'");
    }
    return q;
}

}  // namespace lgspi
