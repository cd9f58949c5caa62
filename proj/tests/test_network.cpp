#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "lgspi/errors.hpp"
#include "lgspi/network_io.hpp"
#include "lgspi/oracle.hpp"
#include "support/reference.hpp"

namespace lgspi {
namespace {

ErrorKind kind_of(const std::string& doc) {
    try {
        parse_network(doc);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "document accepted: " << doc;
    return ErrorKind::QueryError;
}

TEST(Network, DeskFileParses) {
    const Network net = load_network((testing::data_dir() / "desk.json").string());
    EXPECT_EQ(net.size(), 4u);
    EXPECT_EQ(net.total_dim(), 4u);
    EXPECT_EQ(net.topological_order(), (std::vector<NodeId>{"a1", "a2", "c1", "c2"}));
    EXPECT_EQ(serialize_network(net), serialize_network(testing::desk_network()));
}

TEST(Network, SmallestValidInput) {
    const Network net = parse_network(R"({"nodes":[{"id":"a1","dim":1,"mean":[1],"cov":[[1]],"parents":[]}]})");
    EXPECT_EQ(net.topological_order(), std::vector<NodeId>{"a1"});
    EXPECT_TRUE(net.is_root("a1"));
}

TEST(Network, ChainOrder) {
    const Network net = parse_network(R"({"nodes":[
        {"id":"z","dim":1,"mean":[0],"cov":[[1]],"parents":[{"id":"y","B":[[1]]}]},
        {"id":"y","dim":1,"mean":[0],"cov":[[1]],"parents":[{"id":"x","B":[[1]]}]},
        {"id":"x","dim":1,"mean":[0],"cov":[[1]],"parents":[]}]})");
    EXPECT_EQ(net.topological_order(), (std::vector<NodeId>{"x", "y", "z"}));
}

TEST(Network, ValidationErrors) {
    EXPECT_EQ(kind_of(R"({"nodes":[{"id":"c1","dim":1,"mean":[0],"cov":[[1]],"parents":[{"id":"zz","B":[[1]]}]}]})"),
              ErrorKind::DanglingRef);
    EXPECT_EQ(kind_of(R"({"nodes":[
        {"id":"a","dim":1,"mean":[0],"cov":[[1]],"parents":[{"id":"b","B":[[1]]}]},
        {"id":"b","dim":1,"mean":[0],"cov":[[1]],"parents":[{"id":"a","B":[[1]]}]}]})"),
              ErrorKind::CycleError);
    EXPECT_EQ(kind_of(R"({"nodes":[{"id":"a","dim":1,"mean":[0],"cov":[[1]],"parents":[{"id":"a","B":[[1]]}]}]})"),
              ErrorKind::CycleError);
    EXPECT_EQ(kind_of(R"({"nodes":[{"id":"a","dim":2,"mean":[0],"cov":[[1,0],[0,1]],"parents":[]}]})"),
              ErrorKind::ShapeError);
    EXPECT_EQ(kind_of(R"({"nodes":[
        {"id":"a","dim":2,"mean":[0,0],"cov":[[1,0],[0,1]],"parents":[]},
        {"id":"b","dim":1,"mean":[0],"cov":[[1]],"parents":[{"id":"a","B":[[1]]}]}]})"),
              ErrorKind::ShapeError);
    EXPECT_EQ(kind_of(R"({"nodes":[{"id":"a","dim":2,"mean":[0,0],"cov":[[1,0.5],[0,1]],"parents":[]}]})"),
              ErrorKind::CovarianceError);
    EXPECT_EQ(kind_of(R"({"nodes":[{"id":"a","dim":2,"mean":[0,0],"cov":[[1,2],[2,1]],"parents":[]}]})"),
              ErrorKind::CovarianceError);
    EXPECT_EQ(kind_of(R"({"nodes":[{"id":"a","dim":1,"mean":[0],"cov":[[1]],"parents":[]},
                                   {"id":"a","dim":1,"mean":[0],"cov":[[1]],"parents":[]}]})"),
              ErrorKind::SyntaxError);
    EXPECT_EQ(kind_of(R"({"nodes":[{"id":"a","dim":1,"mean":[0],"cov":[[1]]]})"), ErrorKind::SyntaxError);
    EXPECT_EQ(kind_of(R"({"nodes":[{"id":"a","mean":[0],"cov":[[1]],"parents":[]}]})"), ErrorKind::SyntaxError);
}

TEST(Network, ZeroNoiseIsAllowed) {
    EXPECT_NO_THROW(parse_network(R"({"nodes":[{"id":"a","dim":1,"mean":[0],"cov":[[0]],"parents":[]}]})"));
}

TEST(Network, AncestralClosure) {
    const Network net = testing::desk_network();
    EXPECT_EQ(net.ancestral_closure({"a1", "c2"}), (IdSet{"a1", "a2", "c1", "c2"}));
    EXPECT_EQ(net.ancestral_closure({"a1"}), IdSet{"a1"});
    EXPECT_EQ(net.ancestral_closure({}), IdSet{});
    EXPECT_THROW(net.ancestral_closure({"zz"}), Error);
}

TEST(Network, Eccentricities) {
    const Network net = testing::desk_network();
    const auto ecc = skeleton_distances(net);
    EXPECT_EQ(ecc, (std::map<NodeId, std::size_t>{{"a1", 3}, {"a2", 3}, {"c1", 2}, {"c2", 2}}));

    const Network one = parse_network(R"({"nodes":[{"id":"a","dim":1,"mean":[0],"cov":[[1]],"parents":[]}]})");
    EXPECT_EQ(skeleton_distances(one).at("a"), 0u);
    const Network two = parse_network(R"({"nodes":[{"id":"a","dim":1,"mean":[0],"cov":[[1]],"parents":[]},
                                                   {"id":"b","dim":1,"mean":[0],"cov":[[1]],"parents":[]}]})");
    EXPECT_EQ(skeleton_distances(two).at("a"), Network::kUnreachable);
    EXPECT_EQ(skeleton_distances(two).at("b"), Network::kUnreachable);
    EXPECT_EQ(two.components().size(), 2u);
}

// Properties over random networks.

IdSet parent_fixed_point(const Network& net, IdSet s) {
    for (bool grew = true; grew;) {
        grew = false;
        for (const NodeId& id : IdSet(s))
            for (const NodeId& p : net.parents(id)) grew |= s.insert(p).second;
    }
    return s;
}

TEST(NetworkProperties, RandomNetworks) {
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        const Network net = random_network(seed, {1 + seed % 12, 3, 3});

        // Topological order is a permutation respecting every arc.
        auto order = net.topological_order();
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        ASSERT_EQ(sorted, net.ids());
        for (const auto& [u, v] : net.arcs()) ASSERT_LT(net.topo_index(u), net.topo_index(v));

        // Ancestral closure is the least parent-closed superset and idempotent.
        IdSet seedset;
        for (const NodeId& id : net.ids())
            if (rng() % 3 == 0) seedset.insert(id);
        const IdSet closure = net.ancestral_closure(seedset);
        ASSERT_EQ(closure, parent_fixed_point(net, seedset));
        ASSERT_EQ(net.ancestral_closure(closure), closure);

        // Serialization round-trips bit-exactly.
        const Network back = parse_network(serialize_network(net));
        ASSERT_EQ(back.nodes(), net.nodes());

        // Eccentricity bounds on connected networks.
        if (net.components().size() == 1) {
            const auto ecc = skeleton_distances(net);
            std::size_t lo = SIZE_MAX, hi = 0;
            for (const auto& [id, e] : ecc) lo = std::min(lo, e), hi = std::max(hi, e);
            std::size_t diameter = 0;
            for (const NodeId& id : net.ids())
                for (const auto& [other, d] : net.distances_from(id)) diameter = std::max(diameter, d);
            ASSERT_EQ(hi, diameter);
            ASSERT_GE(lo, (diameter + 1) / 2);
        }
    }
}

TEST(NetworkProperties, GeneratorDeterministic) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EXPECT_EQ(random_network(seed, {8, 3, 3}).nodes(), random_network(seed, {8, 3, 3}).nodes());
    }
    const Network single = random_network(0, {1, 3, 3});
    EXPECT_EQ(single.size(), 1u);
    EXPECT_TRUE(single.is_root(single.ids().front()));
}

}  // namespace
}  // namespace lgspi
