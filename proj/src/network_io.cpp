#include "lgspi/network_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lgspi/errors.hpp"

namespace lgspi {
namespace {

using json = nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw Error(ErrorKind::SyntaxError, where + " is not an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw Error(ErrorKind::SyntaxError, where + " is missing \"" + key + "\"");
    return *it;
}

double real(const json& v, const std::string& where) {
    if (!v.is_number()) throw Error(ErrorKind::SyntaxError, where + " is not a number");
    return v.get<double>();
}

Vector parse_vector(const json& v, const std::string& where) {
    if (!v.is_array()) throw Error(ErrorKind::SyntaxError, where + " is not an array");
    Vector out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(real(x, where));
    return out;
}

Matrix parse_matrix(const json& v, const std::string& where) {
    if (!v.is_array()) throw Error(ErrorKind::SyntaxError, where + " is not an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& r : v) {
        rows.push_back(parse_vector(r, where));
        if (rows.back().size() != rows.front().size())
            throw Error(ErrorKind::ShapeError, where + " has ragged rows");
    }
    return Matrix::from_rows(rows);
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(json(std::vector<double>(m.row(r).begin(), m.row(r).end())));
    return rows;
}

}  // namespace

Network parse_network(std::string_view document, const Tolerances& tol) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::SyntaxError, e.what());
    }
    const json& nodes = field(doc, "nodes", "document");
    if (!nodes.is_array()) throw Error(ErrorKind::SyntaxError, "\"nodes\" is not an array");

    std::vector<NodeSpec> specs;
    for (const json& n : nodes) {
        NodeSpec spec;
        const json& id = field(n, "id", "node");
        if (!id.is_string()) throw Error(ErrorKind::SyntaxError, "node id is not a string");
        spec.id = id.get<std::string>();
        const std::string where = "node '" + spec.id + "'";

        const json& dim = field(n, "dim", where);
        if (!dim.is_number_integer() || dim.get<long long>() <= 0)
            throw Error(ErrorKind::ShapeError, where + " dim must be a positive integer");
        spec.dim = dim.get<std::size_t>();
        spec.mean = parse_vector(field(n, "mean", where), where + " mean");
        spec.noise_cov = parse_matrix(field(n, "cov", where), where + " cov");

        if (auto it = n.find("parents"); it != n.end()) {
            if (!it->is_array()) throw Error(ErrorKind::SyntaxError, where + " parents is not an array");
            for (const json& p : *it) {
                const json& pid = field(p, "id", where + " parent");
                if (!pid.is_string()) throw Error(ErrorKind::SyntaxError, where + " parent id is not a string");
                ParentLink link{pid.get<std::string>(), {}};
                link.link = parse_matrix(field(p, "B", where + " parent '" + link.id + "'"),
                                         where + " link from '" + link.id + "'");
                spec.parents.push_back(std::move(link));
            }
        }
        specs.push_back(std::move(spec));
    }
    return Network(std::move(specs), tol);
}

Network load_network(const std::string& path, const Tolerances& tol) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::SyntaxError, "cannot open network file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_network(ss.str(), tol);
}

std::string serialize_network(const Network& net, int indent) {
    json nodes = json::array();
    for (const NodeId& id : net.topological_order()) {
        const NodeSpec& n = net.node(id);
        json parents = json::array();
        for (const ParentLink& p : n.parents) parents.push_back({{"id", p.id}, {"B", matrix_json(p.link)}});
        nodes.push_back({{"id", n.id}, {"dim", n.dim}, {"mean", n.mean}, {"cov", matrix_json(n.noise_cov)},
                         {"parents", parents}});
    }
    return json{{"nodes", nodes}}.dump(indent);
}

}  // namespace lgspi
