#include <gtest/gtest.h>

#include <algorithm>

#include "lgspi/errors.hpp"
#include "lgspi/oracle.hpp"
#include "lgspi/spi_tree.hpp"
#include "support/reference.hpp"

namespace lgspi {
namespace {

NodeSpec scalar_node(const NodeId& id, std::vector<NodeId> parents = {}) {
    NodeSpec n{id, 1, {0.0}, Matrix{{1.0}}, {}};
    for (const NodeId& p : parents) n.parents.push_back({p, Matrix{{1.0}}});
    return n;
}

Network diamond() {
    return Network({scalar_node("a"), scalar_node("b", {"a"}), scalar_node("c", {"a"}), scalar_node("d", {"b", "c"})});
}

TEST(SpiTree, ChooseRoot) {
    const Network desk = testing::desk_network();
    EXPECT_EQ(choose_root(desk, desk.components()[0]), "c1");

    const Network star({scalar_node("s"), scalar_node("x", {"s"}), scalar_node("y", {"s"}), scalar_node("z", {"s"})});
    EXPECT_EQ(choose_root(star, star.components()[0]), "s");

    const Network one({scalar_node("a")});
    EXPECT_EQ(choose_root(one, one.components()[0]), "a");
    EXPECT_THROW(choose_root(one, {}), Error);
}

TEST(SpiTree, DeskBushy) {
    const Network net = testing::desk_network();
    const SpiTree t = build_tree(net, "c1", TreeMode::Bushy);
    EXPECT_EQ(t.visit_order(), (std::vector<NodeId>{"c1", "a1", "c2", "a2"}));
    EXPECT_FALSE(t.fell_back());
    EXPECT_EQ(t.children("c1"), (std::vector<NodeId>{"a1", "c2"}));
    EXPECT_EQ(t.children("c2"), std::vector<NodeId>{"a2"});
    EXPECT_TRUE(t.children("a1").empty());
    EXPECT_TRUE(verify_constraint(t, net).empty());
    EXPECT_EQ(t.subtree("c2"), (IdSet{"a2", "c2"}));
    EXPECT_EQ(t.depth("a2"), 2u);
}

TEST(SpiTree, ChainIsAPath) {
    const Network net = testing::desk_network();
    const SpiTree t = build_tree(net, "c1", TreeMode::Chain);
    const auto& order = t.visit_order();
    for (std::size_t i = 1; i < order.size(); ++i) EXPECT_EQ(t.parent(order[i]), order[i - 1]);
    EXPECT_TRUE(verify_constraint(t, net).empty());
}

TEST(SpiTree, DiamondFallsBackToChain) {
    const Network net = diamond();
    const SpiTree t = build_tree(net, "a", TreeMode::Bushy);
    EXPECT_TRUE(t.fell_back());
    EXPECT_EQ(t.mode(), TreeMode::Chain);
    EXPECT_EQ(t.requested_mode(), TreeMode::Bushy);
    EXPECT_EQ(t.visit_order(), (std::vector<NodeId>{"a", "b", "c", "d"}));
    EXPECT_EQ(t.parent("b"), "a");
    EXPECT_EQ(t.parent("c"), "b");
    EXPECT_EQ(t.parent("d"), "c");
    EXPECT_TRUE(verify_constraint(t, net).empty());
}

TEST(SpiTree, HandBuiltBadTree) {
    const Network net = diamond();
    const SpiTree bad("a", {{"b", "a"}, {"c", "a"}, {"d", "b"}}, TreeMode::Bushy);
    const auto v = verify_constraint(bad, net);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].parent, "c");
    EXPECT_EQ(v[0].child, "d");
}

TEST(SpiTree, MalformedParentMap) {
    EXPECT_THROW(SpiTree("a", {{"b", "c"}, {"c", "b"}}, TreeMode::Bushy), Error);
    EXPECT_THROW(SpiTree("a", {{"a", "b"}}, TreeMode::Bushy), Error);
}

TEST(SpiTree, ForestPerComponent) {
    const Network net({scalar_node("a"), scalar_node("b", {"a"}), scalar_node("x"), scalar_node("y", {"x"})});
    const SpiForest f(net, TreeMode::Bushy);
    ASSERT_EQ(f.trees().size(), 2u);
    EXPECT_TRUE(f.tree_of("b").contains("a"));
    EXPECT_FALSE(f.tree_of("b").contains("x"));
    EXPECT_NE(f.tree_index("a"), f.tree_index("y"));
}

// MCS trace: every pick has the maximal visited-neighbour count.
void expect_mcs_trace(const Network& net, const SpiTree& t) {
    IdSet visited;
    const auto& order = t.visit_order();
    ASSERT_EQ(order.size(), t.nodes().size());
    ASSERT_EQ(t.visit_counts().size(), order.size());
    auto count = [&](const NodeId& id) {
        std::size_t k = 0;
        for (const NodeId& n : net.neighbors(id)) k += visited.contains(n);
        return k;
    };
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t mine = count(order[i]);
        ASSERT_EQ(mine, t.visit_counts()[i]);
        for (const NodeId& other : t.nodes())
            if (!visited.contains(other) && other != order[i]) ASSERT_LE(count(other), mine);
        visited.insert(order[i]);
    }
}

TEST(SpiTreeProperties, RandomNetworksBothModes) {
    std::size_t fallbacks = 0, bushy_kept = 0;
    for (std::uint64_t seed = 0; seed < 250; ++seed) {
        const Network net = random_network(seed, {1 + seed % 12, 3, 3});
        for (TreeMode mode : {TreeMode::Bushy, TreeMode::Chain}) {
            const SpiForest forest(net, mode);
            std::size_t covered = 0;
            for (const SpiTree& t : forest.trees()) {
                covered += t.nodes().size();
                ASSERT_TRUE(verify_constraint(t, net).empty()) << "seed " << seed;
                const auto ecc = component_eccentricities(net, t.nodes());
                std::size_t lo = SIZE_MAX;
                for (const auto& [id, e] : ecc) lo = std::min(lo, e);
                ASSERT_EQ(ecc.at(t.root()), lo);
                ASSERT_EQ(t.visit_order().front(), t.root());
                expect_mcs_trace(net, t);
                if (mode == TreeMode::Bushy) (t.fell_back() ? fallbacks : bushy_kept)++;
            }
            ASSERT_EQ(covered, net.size());
        }
    }
    // Both branches of the attachment rule are exercised by the suite.
    EXPECT_GT(fallbacks, 0u);
    EXPECT_GT(bushy_kept, 0u);
}

}  // namespace
}  // namespace lgspi
