#include "lgspi/spi_tree.hpp"

#include <algorithm>

#include "lgspi/errors.hpp"

namespace lgspi {

std::string_view tree_mode_name(TreeMode mode) { return mode == TreeMode::Bushy ? "bushy" : "chain"; }

SpiTree::SpiTree(NodeId root, const std::map<NodeId, NodeId>& parent_of, TreeMode mode)
    : root_(std::move(root)), mode_(mode), requested_(mode), parent_(parent_of) {
    if (parent_.contains(root_))
        throw Error(ErrorKind::CycleError, "tree root '" + root_ + "' is given a parent");
    nodes_.insert(root_);
    for (const auto& [child, par] : parent_) {
        nodes_.insert(child);
        nodes_.insert(par);
    }
    for (const NodeId& id : nodes_) children_[id];
    for (const auto& [child, par] : parent_) {
        if (!nodes_.contains(par)) throw Error(ErrorKind::UnknownNode, "tree parent '" + par + "' is not a tree node");
        children_[par].push_back(child);
    }
    for (const NodeId& id : nodes_) {
        if (id == root_) continue;
        if (!parent_.contains(id)) throw Error(ErrorKind::UnknownNode, "tree node '" + id + "' has no parent");
    }

    // Depths and subtree sets by walking down from the root; anything not
    // reached means the parent map has a cycle or a second root.
    std::vector<NodeId> stack{root_};
    std::vector<NodeId> preorder;
    depth_[root_] = 0;
    while (!stack.empty()) {
        NodeId cur = stack.back();
        stack.pop_back();
        preorder.push_back(cur);
        for (const NodeId& c : children_[cur]) {
            depth_[c] = depth_[cur] + 1;
            stack.push_back(c);
        }
    }
    if (preorder.size() != nodes_.size())
        throw Error(ErrorKind::CycleError, "tree parent map does not form a tree rooted at '" + root_ + "'");
    for (auto it = preorder.rbegin(); it != preorder.rend(); ++it) {
        IdSet& sub = subtree_[*it];
        sub.insert(*it);
        for (const NodeId& c : children_[*it]) sub.insert(subtree_[c].begin(), subtree_[c].end());
    }
}

std::optional<NodeId> SpiTree::parent(const NodeId& id) const {
    auto it = parent_.find(id);
    if (it == parent_.end()) return std::nullopt;
    return it->second;
}

const std::vector<NodeId>& SpiTree::children(const NodeId& id) const {
    auto it = children_.find(id);
    if (it == children_.end()) throw Error(ErrorKind::UnknownNode, "'" + id + "' is not in this tree");
    return it->second;
}

std::size_t SpiTree::depth(const NodeId& id) const {
    auto it = depth_.find(id);
    if (it == depth_.end()) throw Error(ErrorKind::UnknownNode, "'" + id + "' is not in this tree");
    return it->second;
}

const IdSet& SpiTree::subtree(const NodeId& id) const {
    auto it = subtree_.find(id);
    if (it == subtree_.end()) throw Error(ErrorKind::UnknownNode, "'" + id + "' is not in this tree");
    return it->second;
}

bool SpiTree::is_ancestor_or_self(const NodeId& a, const NodeId& b) const { return subtree(a).contains(b); }

std::map<NodeId, std::optional<NodeId>> SpiTree::parent_map() const {
    std::map<NodeId, std::optional<NodeId>> out;
    for (const NodeId& id : nodes_) out[id] = parent(id);
    return out;
}

NodeId choose_root(const Network& net, const IdSet& component) {
    if (component.empty()) throw Error(ErrorKind::EmptyComponent, "cannot choose a root for an empty component");
    const auto ecc = component_eccentricities(net, component);
    // map iteration is in id order, so strict < keeps the lexicographic tie-break
    NodeId best = ecc.begin()->first;
    for (const auto& [id, e] : ecc)
        if (e < ecc.at(best)) best = id;
    return best;
}

std::vector<NodeId> mcs_order(const Network& net, const NodeId& root, std::vector<std::size_t>* counts) {
    const IdSet& component = net.components()[net.component_of(root)];
    std::map<NodeId, std::size_t> weight;
    for (const NodeId& id : component) weight[id] = 0;

    std::vector<NodeId> order;
    if (counts) counts->clear();
    auto visit = [&](NodeId id) {  // by value: erase() below frees map keys
        if (counts) counts->push_back(weight.at(id));
        order.push_back(id);
        weight.erase(id);
        for (const NodeId& nb : net.neighbors(id))
            if (auto it = weight.find(nb); it != weight.end()) ++it->second;
    };

    visit(root);
    while (!weight.empty()) {
        auto best = weight.begin();
        for (auto it = weight.begin(); it != weight.end(); ++it)
            if (it->second > best->second) best = it;
        visit(best->first);
    }
    return order;
}

namespace {

SpiTree chain_tree(const NodeId& root, const std::vector<NodeId>& order) {
    std::map<NodeId, NodeId> parent;
    for (std::size_t i = 1; i < order.size(); ++i) parent[order[i]] = order[i - 1];
    return SpiTree(root, parent, TreeMode::Chain);
}

}  // namespace

SpiTree build_tree(const Network& net, const NodeId& root, TreeMode mode) {
    std::vector<std::size_t> counts;
    const std::vector<NodeId> order = mcs_order(net, root, &counts);

    auto finish = [&](SpiTree tree) {
        tree.requested_ = mode;
        tree.order_ = order;
        tree.counts_ = counts;
        return tree;
    };

    if (mode == TreeMode::Chain) return finish(chain_tree(root, order));

    std::map<NodeId, NodeId> parent;
    std::map<NodeId, std::size_t> depth{{root, 0}};
    // Root path membership: u is on the root path of d iff walking up from d reaches u.
    auto on_root_path = [&](const NodeId& u, NodeId d) {
        while (true) {
            if (d == u) return true;
            auto it = parent.find(d);
            if (it == parent.end()) return false;
            d = it->second;
        }
    };

    for (std::size_t i = 1; i < order.size(); ++i) {
        const NodeId& v = order[i];
        std::vector<NodeId> visited_nbrs;
        for (const NodeId& nb : net.neighbors(v))
            if (depth.contains(nb)) visited_nbrs.push_back(nb);

        NodeId attach = root;
        if (!visited_nbrs.empty()) {
            // deepest; equal depths resolve to the smallest id
            NodeId deepest = visited_nbrs.front();
            for (const NodeId& u : visited_nbrs)
                if (depth.at(u) > depth.at(deepest)) deepest = u;
            const bool chain_of_ancestors = std::all_of(visited_nbrs.begin(), visited_nbrs.end(),
                                                        [&](const NodeId& u) { return on_root_path(u, deepest); });
            if (!chain_of_ancestors) return finish(chain_tree(root, order));
            attach = deepest;
        }
        parent[v] = attach;
        depth[v] = depth.at(attach) + 1;
    }
    return finish(SpiTree(root, parent, TreeMode::Bushy));
}

std::vector<ConstraintViolation> verify_constraint(const SpiTree& tree, const Network& net) {
    std::vector<ConstraintViolation> out;
    for (const auto& [p, c] : net.arcs()) {
        const bool has_p = tree.contains(p);
        const bool has_c = tree.contains(c);
        if (!has_p && !has_c) continue;
        if (has_p != has_c) {
            out.push_back({p, c, "arc leaves the tree"});
            continue;
        }
        if (!tree.is_ancestor_or_self(p, c) && !tree.is_ancestor_or_self(c, p))
            out.push_back({p, c, "endpoints are not ancestor-related in the tree"});
    }
    for (const NodeId& id : tree.nodes())
        if (!net.contains(id)) out.push_back({id, id, "tree node is not in the network"});
    return out;
}

SpiForest::SpiForest(const Network& net, TreeMode mode) {
    for (const IdSet& comp : net.components()) {
        const std::size_t k = trees_.size();
        trees_.push_back(build_tree(net, choose_root(net, comp), mode));
        for (const NodeId& id : comp) index_[id] = k;
    }
}

const SpiTree& SpiForest::tree_of(const NodeId& id) const { return trees_[tree_index(id)]; }

std::size_t SpiForest::tree_index(const NodeId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error(ErrorKind::UnknownNode, "unknown node '" + id + "'");
    return it->second;
}

}  // namespace lgspi
