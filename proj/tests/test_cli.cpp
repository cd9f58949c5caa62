#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lgspi/cli.hpp"
#include "lgspi/errors.hpp"
#include "lgspi/query_text.hpp"
#include "lgspi/result_io.hpp"
#include "support/reference.hpp"

namespace lgspi {
namespace {

struct CliRun {
    int status;
    std::string out, err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "lgspi");
    std::ostringstream out, err;
    const int status = run_cli(args, out, err);
    return {status, out.str(), err.str()};
}

std::string desk() { return (testing::data_dir() / "desk.json").string(); }

std::string write_temp(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / ("lgspi_cli_" + name);
    std::ofstream(path) << body;
    return path.string();
}

TEST(QueryText, Parsing) {
    EXPECT_EQ(parse_id_list("a1,c2"), (IdSet{"a1", "c2"}));
    EXPECT_EQ(parse_id_list(""), IdSet{});
    const EvidenceMap ev = parse_evidence("a2=2.0;b1=0.5,1.5");
    EXPECT_EQ(ev.at("a2"), Vector{2.0});
    EXPECT_EQ(ev.at("b1"), (Vector{0.5, 1.5}));
    EXPECT_THROW(parse_evidence("a2"), Error);
    EXPECT_THROW(parse_evidence("a2=x"), Error);
    const Query q = parse_query_line("--target a1,c2 --given c1 --evidence=a2=2");
    EXPECT_EQ(q.targets, (IdSet{"a1", "c2"}));
    EXPECT_EQ(q.given, IdSet{"c1"});
    EXPECT_EQ(q.evidence.at("a2"), Vector{2.0});
}

TEST(Cli, QueryDesk) {
    const CliRun r = run({"query", desk(), "--target", "c2", "--evidence", "a2=2", "--format", "machine"});
    ASSERT_EQ(r.status, 0) << r.err;
    const ResultDocument doc = parse_result_document(r.out);
    EXPECT_NEAR(doc.mean[0], 8.0, 1e-12);
    EXPECT_NEAR(doc.cov(0, 0), 5.5, 1e-12);
}

TEST(Cli, PriorAndSymbolicDocuments) {
    const CliRun prior = run({"--format", "machine", "query", desk(), "--target", "a1"});
    ASSERT_EQ(prior.status, 0);
    const auto j = nlohmann::json::parse(prior.out);
    EXPECT_EQ(j["mean"], nlohmann::json::array({1.0}));
    EXPECT_EQ(j["cov"], nlohmann::json::parse("[[1.0]]"));
    EXPECT_TRUE(j["links"].empty());
    for (const char* k : {"multiplications", "integrations", "substitutions", "conditionings", "cache_hits",
                          "subtree_requests", "deferred_merges", "cache_entries"})
        EXPECT_TRUE(j["diagnostics"].contains(k)) << k;

    const CliRun sym = run({"query", desk(), "--target", "a1", "--given", "c1", "--format", "machine"});
    const ResultDocument doc = parse_result_document(sym.out);
    ASSERT_EQ(doc.links.size(), 1u);
    EXPECT_EQ(doc.links[0].id, "c1");
    EXPECT_NEAR(doc.links[0].K(0, 0), 4.0 / 9.0, 1e-15);
}

TEST(Cli, HumanOutputIsDeterministic) {
    const CliRun a = run({"query", desk(), "--target", "a1,c2", "--evidence", "a2=1.25"});
    const CliRun b = run({"query", desk(), "--target", "a1,c2", "--evidence", "a2=1.25"});
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("multiplications"), std::string::npos);
    EXPECT_NE(a.out.find("cache_hits"), std::string::npos);
}

TEST(Cli, Tree) {
    const CliRun r = run({"tree", desk(), "--format", "machine"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    const auto& c = j["components"][0];
    EXPECT_EQ(c["root"], "c1");
    EXPECT_EQ(c["mode"], "bushy");
    EXPECT_EQ(c["mcs_order"], nlohmann::json::parse(R"(["c1","a1","c2","a2"])"));
    EXPECT_EQ(c["parent"]["a2"], "c2");
    EXPECT_TRUE(c["parent"]["c1"].is_null());
    EXPECT_EQ(c["eccentricity"]["a1"], 3);
    EXPECT_EQ(j["violations"], 0);

    const CliRun human = run({"tree", desk(), "--mode", "chain"});
    EXPECT_NE(human.out.find("mode: chain"), std::string::npos);
    EXPECT_NE(human.out.find("constraint: ok"), std::string::npos);
}

TEST(Cli, ErrorClassesMapToStatusOne) {
    const std::string dangling =
        write_temp("dangling.json", R"({"nodes":[{"id":"c1","dim":1,"mean":[0],"cov":[[1]],"parents":[{"id":"zz","B":[[1]]}]}]})");
    const std::string cyclic = write_temp("cycle.json", R"({"nodes":[
        {"id":"a","dim":1,"mean":[0],"cov":[[1]],"parents":[{"id":"b","B":[[1]]}]},
        {"id":"b","dim":1,"mean":[0],"cov":[[1]],"parents":[{"id":"a","B":[[1]]}]}]})");
    const std::string broken = write_temp("broken.json", "{\"nodes\": [");
    const std::string badcov =
        write_temp("badcov.json", R"({"nodes":[{"id":"a","dim":1,"mean":[0],"cov":[[-1]],"parents":[]}]})");

    struct Case {
        std::vector<std::string> args;
        std::string kind;
    };
    const std::vector<Case> cases = {
        {{"validate", dangling}, "DanglingRef"},
        {{"validate", cyclic}, "CycleError"},
        {{"validate", broken}, "SyntaxError"},
        {{"validate", badcov}, "CovarianceError"},
        {{"query", desk(), "--target", "zz"}, "UnknownNode"},
        {{"query", desk(), "--target", "a1", "--given", "a1"}, "QueryError"},
        {{"query", desk(), "--target", "a1", "--evidence", "c1=1,2"}, "ShapeError"},
        {{"query", desk(), "--target", "a1", "--evidence", "c1="}, "SyntaxError"},
    };
    for (const Case& c : cases) {
        const CliRun r = run(c.args);
        EXPECT_EQ(r.status, 1) << c.kind;
        EXPECT_NE(r.err.find(c.kind), std::string::npos) << r.err;
    }
    EXPECT_EQ(run({"validate", desk()}).status, 0);
    EXPECT_EQ(run({"query", desk()}).status, 1);  // --target missing
    EXPECT_EQ(run({}).status, 1);
    EXPECT_EQ(run({"--help"}).status, 0);
}

TEST(Cli, CheckStatuses) {
    const CliRun ok = run({"check", "--seeds", "10", "--nodes", "8"});
    EXPECT_EQ(ok.status, 0) << ok.out;
    EXPECT_NE(ok.out.find("max deviation"), std::string::npos);
    const CliRun strict = run({"check", "--seeds", "10", "--nodes", "8", "--tol", "1e-300"});
    EXPECT_EQ(strict.status, 2);
    EXPECT_EQ(run({"check", "--tol", "-1"}).status, 1);
}

TEST(Cli, ToleranceFromEnvironment) {
    ::setenv("LGSPI_TOL", "1e-300", 1);
    const CliRun r = run({"check", "--seeds", "5", "--nodes", "8"});
    ::unsetenv("LGSPI_TOL");
    EXPECT_EQ(r.status, 2);
}

TEST(Cli, BenchReportsReuse) {
    const std::string list = write_temp("bench.txt",
                                        "# desk replay\n"
                                        "--target c2 --evidence a2=2\n"
                                        "--target c2 --evidence a2=3\n"
                                        "--target a1\n");
    const CliRun r = run({"bench", desk(), "--queries", list, "--format", "machine"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j["queries"].size(), 3u);
    EXPECT_GT(j["queries"][0]["multiplications"], 0);
    EXPECT_EQ(j["queries"][1]["multiplications"], 0);
    EXPECT_GE(j["queries"][1]["cache_hits"], 1);
}

}  // namespace
}  // namespace lgspi
