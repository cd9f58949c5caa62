#include "lgspi/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lgspi/check.hpp"
#include "lgspi/errors.hpp"
#include "lgspi/kernels.hpp"
#include "lgspi/network_io.hpp"
#include "lgspi/query_text.hpp"
#include "lgspi/result_io.hpp"
#include "lgspi/spi_tree.hpp"

namespace lgspi {
namespace {

using json = nlohmann::json;

struct RunConfig {
    std::string network_path;
    std::string mode = "bushy";
    std::string format = "human";
    std::string kernels;
    std::string targets, given, evidence;
    std::string evidence_path = "auto";
    std::string query_list;
    double tolerance = 1e-8;
    std::size_t seeds = 100;
    std::uint64_t seed_base = 0;
    std::size_t nodes = 12;
    std::size_t queries = 5;
    std::size_t max_parents = 3;
    std::size_t max_dim = 3;
};

double default_tolerance() {
    if (const char* env = std::getenv("LGSPI_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && *end == '\0' && v > 0.0) return v;
    }
    return 1e-8;
}

TreeMode tree_mode(const RunConfig& c) { return c.mode == "chain" ? TreeMode::Chain : TreeMode::Bushy; }
OutputFormat output_format(const RunConfig& c) { return c.format == "machine" ? OutputFormat::Machine : OutputFormat::Human; }

EngineOptions engine_options(const RunConfig& c) {
    EngineOptions o;
    o.tree_mode = tree_mode(c);
    o.evidence_path = c.evidence_path == "condition" ? EvidencePath::ConditionOnly : EvidencePath::Auto;
    return o;
}

std::string ecc_text(std::size_t e) { return e == Network::kUnreachable ? "inf" : std::to_string(e); }

int cmd_validate(const RunConfig& c, std::ostream& out) {
    const Network net = load_network(c.network_path);
    if (output_format(c) == OutputFormat::Machine) {
        out << json{{"valid", true},
                    {"nodes", net.size()},
                    {"total_dim", net.total_dim()},
                    {"components", net.components().size()},
                    {"topological_order", net.topological_order()}}
                   .dump(2)
            << '\n';
        return kExitOk;
    }
    out << "valid network: " << net.size() << " nodes, total dim " << net.total_dim() << ", "
        << net.components().size() << " component(s)\ntopological order:";
    for (const NodeId& id : net.topological_order()) out << ' ' << id;
    out << '\n';
    return kExitOk;
}

int cmd_tree(const RunConfig& c, std::ostream& out) {
    const Network net = load_network(c.network_path);
    const SpiForest forest(net, tree_mode(c));
    json comps = json::array();
    std::size_t total_violations = 0;
    std::ostringstream text;
    for (const SpiTree& tree : forest.trees()) {
        const auto ecc = component_eccentricities(net, tree.nodes());
        const auto violations = verify_constraint(tree, net);
        total_violations += violations.size();

        json parents = json::object();
        for (const auto& [id, p] : tree.parent_map()) parents[id] = p ? json(*p) : json(nullptr);
        json vio = json::array();
        for (const auto& v : violations) vio.push_back({{"arc", {v.parent, v.child}}, {"reason", v.reason}});
        json ecc_json = json::object();
        for (const auto& [id, e] : ecc) ecc_json[id] = e;
        comps.push_back({{"root", tree.root()},
                         {"mode", tree_mode_name(tree.mode())},
                         {"requested_mode", tree_mode_name(tree.requested_mode())},
                         {"eccentricity", ecc_json},
                         {"mcs_order", tree.visit_order()},
                         {"mcs_counts", tree.visit_counts()},
                         {"parent", parents},
                         {"violations", vio}});

        text << "component rooted at " << tree.root() << "\n  mode: " << tree_mode_name(tree.mode());
        if (tree.fell_back()) text << " (requested " << tree_mode_name(tree.requested_mode()) << ", fell back)";
        text << "\n  eccentricity:";
        for (const auto& [id, e] : ecc) text << ' ' << id << '=' << ecc_text(e);
        text << "\n  mcs order:";
        for (const NodeId& id : tree.visit_order()) text << ' ' << id;
        text << "\n  tree parents:";
        for (const auto& [id, p] : tree.parent_map()) text << ' ' << id << "<-" << (p ? *p : "(root)");
        text << "\n  constraint: " << (violations.empty() ? "ok" : "VIOLATED");
        for (const auto& v : violations) text << "\n    arc " << v.parent << "->" << v.child << ": " << v.reason;
        text << '\n';
    }
    if (output_format(c) == OutputFormat::Machine)
        out << json{{"components", comps}, {"violations", total_violations}}.dump(2) << '\n';
    else
        out << text.str();
    return total_violations == 0 ? kExitOk : kExitError;
}

int cmd_query(const RunConfig& c, std::ostream& out) {
    const Network net = load_network(c.network_path);
    const Engine engine(net, engine_options(c));
    const Query q{parse_id_list(c.targets), parse_id_list(c.given), parse_evidence(c.evidence)};
    out << emit_result(engine.answer(q), output_format(c));
    return kExitOk;
}

int cmd_check(const RunConfig& c, std::ostream& out) {
    if (!(c.tolerance > 0.0)) throw Error(ErrorKind::QueryError, "tolerance must be positive");
    CheckConfig cfg;
    cfg.seeds = c.seeds;
    cfg.base_seed = c.seed_base;
    cfg.max_nodes = c.nodes;
    cfg.queries_per_network = c.queries;
    cfg.network = {c.nodes, c.max_parents, c.max_dim};
    cfg.tolerance = c.tolerance;
    cfg.engine = engine_options(c);
    const CheckReport r = run_check(cfg);

    if (output_format(c) == OutputFormat::Machine) {
        out << json{{"networks", r.networks},
                    {"queries", r.queries},
                    {"max_deviation", r.max_deviation},
                    {"tolerance", c.tolerance},
                    {"failures", r.failures},
                    {"combinability_errors", r.combinability_errors},
                    {"failure_notes", r.failure_notes},
                    {"passed", r.passed()}}
                   .dump(2)
            << '\n';
    } else {
        out << "checked " << r.networks << " networks, " << r.queries << " queries\n"
            << "max deviation " << r.max_deviation << (r.max_deviation <= c.tolerance ? " <= " : " > ")
            << c.tolerance << '\n'
            << "failures " << r.failures << ", combinability errors " << r.combinability_errors << '\n';
        for (const auto& n : r.failure_notes) out << "  " << n << '\n';
    }
    return r.passed() ? kExitOk : kExitCheckFailed;
}

int cmd_bench(const RunConfig& c, std::ostream& out) {
    const Network net = load_network(c.network_path);
    const Engine engine(net, engine_options(c));
    std::ifstream in(c.query_list);
    if (!in) throw Error(ErrorKind::SyntaxError, "cannot open query list '" + c.query_list + "'");

    Session session(engine);
    json rows = json::array();
    std::ostringstream text;
    text << "  #  mult  integ  subst  cond  hits  requests  nodes_touched  query\n";
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#')
            continue;
        const Query q = parse_query_line(line);
        session.retract_all();
        session.add_evidence(q.evidence);
        const QueryResult r = session.ask(q.targets, q.given);
        const Diagnostics& d = r.diagnostics;
        ++index;
        rows.push_back({{"index", index},
                        {"query", line},
                        {"multiplications", d.multiplications},
                        {"integrations", d.integrations},
                        {"substitutions", d.substitutions},
                        {"conditionings", d.conditionings},
                        {"cache_hits", d.cache_hits},
                        {"subtree_requests", d.subtree_requests},
                        {"nodes_touched", d.requests_per_node.size()},
                        {"cache_entries", d.cache_entries}});
        char buf[96];
        std::snprintf(buf, sizeof buf, "%3zu  %4zu  %5zu  %5zu  %4zu  %4zu  %8zu  %13zu  ", index, d.multiplications,
                      d.integrations, d.substitutions, d.conditionings, d.cache_hits, d.subtree_requests,
                      d.requests_per_node.size());
        text << buf << line << '\n';
    }
    if (output_format(c) == OutputFormat::Machine)
        out << json{{"network_nodes", net.size()}, {"queries", rows}}.dump(2) << '\n';
    else
        out << text.str() << "network has " << net.size() << " nodes; cache entries " << engine.cache_entries()
            << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    cfg.tolerance = default_tolerance();

    CLI::App app{"Goal-directed inference for linear-Gaussian Bayesian networks"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"human", "machine"}));
    app.add_option("--kernels", cfg.kernels, "Force kernel ISA")->check(CLI::IsMember({"scalar", "avx2"}));

    auto* validate = app.add_subcommand("validate", "Parse and validate a network file");
    validate->add_option("network", cfg.network_path, "Network file")->required();

    auto* tree = app.add_subcommand("tree", "Show the query tree built for a network");
    tree->add_option("network", cfg.network_path, "Network file")->required();
    tree->add_option("--mode", cfg.mode, "Tree shape")->check(CLI::IsMember({"bushy", "chain"}));

    auto* query = app.add_subcommand("query", "Answer P(targets | given, evidence)");
    query->footer(
        "Ids are comma separated (--target a1,c2). Evidence is id=v1,v2;id2=v, e.g.\n"
        "  --evidence 'a2=2.0;b1=0.5,1.5'");
    query->add_option("network", cfg.network_path, "Network file")->required();
    query->add_option("--target", cfg.targets, "Target ids")->required();
    query->add_option("--given", cfg.given, "Ids answered symbolically");
    query->add_option("--evidence", cfg.evidence, "Observed values");
    query->add_option("--mode", cfg.mode, "Tree shape")->check(CLI::IsMember({"bushy", "chain"}));
    query->add_option("--evidence-path", cfg.evidence_path, "Evidence handling")
        ->check(CLI::IsMember({"auto", "condition"}));

    auto* check = app.add_subcommand("check", "Compare engine answers with the dense oracle on random networks");
    check->footer("Default tolerance comes from LGSPI_TOL when set, else 1e-8.");
    check->add_option("--seeds", cfg.seeds, "Number of random networks");
    check->add_option("--seed-base", cfg.seed_base, "First seed");
    check->add_option("--nodes", cfg.nodes, "Maximum nodes per network");
    check->add_option("--queries", cfg.queries, "Queries per network");
    check->add_option("--max-parents", cfg.max_parents, "Maximum parents per node");
    check->add_option("--max-dim", cfg.max_dim, "Maximum node dimension");
    check->add_option("--tol", cfg.tolerance, "Max-abs tolerance");
    check->add_option("--mode", cfg.mode, "Tree shape")->check(CLI::IsMember({"bushy", "chain"}));
    check->add_option("--evidence-path", cfg.evidence_path, "Evidence handling")
        ->check(CLI::IsMember({"auto", "condition"}));

    auto* bench = app.add_subcommand("bench", "Replay a query list against one session and report operation counts");
    bench->footer("Each line of the query list is: --target ids [--given ids] [--evidence spec]");
    bench->add_option("network", cfg.network_path, "Network file")->required();
    bench->add_option("--queries", cfg.query_list, "Query list file")->required();
    bench->add_option("--mode", cfg.mode, "Tree shape")->check(CLI::IsMember({"bushy", "chain"}));
    bench->add_option("--evidence-path", cfg.evidence_path, "Evidence handling")
        ->check(CLI::IsMember({"auto", "condition"}));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitError;
    }

    try {
        if (!cfg.kernels.empty()) {
            if (!kernels::select(*kernels::parse_isa(cfg.kernels)))
                throw Error(ErrorKind::QueryError, "kernel ISA '" + cfg.kernels + "' is not supported on this CPU");
        }
        if (*validate) return cmd_validate(cfg, out);
        if (*tree) return cmd_tree(cfg, out);
        if (*query) return cmd_query(cfg, out);
        if (*check) return cmd_check(cfg, out);
        if (*bench) return cmd_bench(cfg, out);
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace lgspi
