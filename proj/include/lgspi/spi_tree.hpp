#pragma once

// Query-routing trees over the nodes of one skeleton component.
//
// Every network arc (u, v) must join two nodes where one is a tree ancestor of
// the other. Trees are built from the minimum-eccentricity root by maximum
// cardinality search; bushy mode hangs each node under its deepest visited
// neighbour when that keeps the constraint, and otherwise the whole build is
// redone as a chain (a path in visit order), which satisfies it trivially.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lgspi/network.hpp"

namespace lgspi {

enum class TreeMode { Bushy, Chain };

std::string_view tree_mode_name(TreeMode mode);

class SpiTree {
public:
    // Builds the structural maps from a parent map. Every node except `root`
    // must have a parent in the map, and following parents must reach root.
    SpiTree(NodeId root, const std::map<NodeId, NodeId>& parent_of, TreeMode mode);

    const NodeId& root() const noexcept { return root_; }
    TreeMode mode() const noexcept { return mode_; }
    // Mode requested by the caller; differs from mode() after a chain fallback.
    TreeMode requested_mode() const noexcept { return requested_; }
    bool fell_back() const noexcept { return requested_ != mode_; }

    const IdSet& nodes() const noexcept { return nodes_; }
    bool contains(const NodeId& id) const { return nodes_.contains(id); }

    std::optional<NodeId> parent(const NodeId& id) const;
    const std::vector<NodeId>& children(const NodeId& id) const;
    std::size_t depth(const NodeId& id) const;
    const IdSet& subtree(const NodeId& id) const;
    // a is an ancestor of b or equal to it.
    bool is_ancestor_or_self(const NodeId& a, const NodeId& b) const;

    // Visit order and, per step, the number of already-visited skeleton
    // neighbours the chosen node had (empty for hand-built trees).
    const std::vector<NodeId>& visit_order() const noexcept { return order_; }
    const std::vector<std::size_t>& visit_counts() const noexcept { return counts_; }

    std::map<NodeId, std::optional<NodeId>> parent_map() const;

private:
    friend SpiTree build_tree(const Network&, const NodeId&, TreeMode);

    NodeId root_;
    TreeMode mode_;
    TreeMode requested_;
    IdSet nodes_;
    std::map<NodeId, NodeId> parent_;
    std::map<NodeId, std::vector<NodeId>> children_;
    std::map<NodeId, std::size_t> depth_;
    std::map<NodeId, IdSet> subtree_;
    std::vector<NodeId> order_;
    std::vector<std::size_t> counts_;
};

// Minimum-eccentricity node of the component, ties by id. Throws EmptyComponent.
NodeId choose_root(const Network& net, const IdSet& component);

// Maximum cardinality search from `root` over root's component.
std::vector<NodeId> mcs_order(const Network& net, const NodeId& root, std::vector<std::size_t>* counts = nullptr);

SpiTree build_tree(const Network& net, const NodeId& root, TreeMode mode);

struct ConstraintViolation {
    NodeId parent;  // network arc parent -> child
    NodeId child;
    std::string reason;
};

// Empty iff every network arc touching the tree's nodes joins
// ancestor-related tree nodes.
std::vector<ConstraintViolation> verify_constraint(const SpiTree& tree, const Network& net);

// One tree per skeleton component.
class SpiForest {
public:
    SpiForest(const Network& net, TreeMode mode);

    const std::vector<SpiTree>& trees() const noexcept { return trees_; }
    const SpiTree& tree_of(const NodeId& id) const;
    std::size_t tree_index(const NodeId& id) const;

private:
    std::vector<SpiTree> trees_;
    std::map<NodeId, std::size_t> index_;
};

}  // namespace lgspi
