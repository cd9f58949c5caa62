#include "lgspi/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include "lgspi/errors.hpp"

namespace lgspi {

const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

bool is_psd(const Matrix& sym, const Tolerances& tol) {
    if (sym.rows() == 0) return true;
    const double scale = 1.0 + std::abs(sym.trace()) / static_cast<double>(sym.rows());
    return min_eigenvalue(sym) >= -tol.psd_slack * scale;
}

void check_covariance(const Matrix& cov, const std::string& what, const Tolerances& tol) {
    if (cov.rows() != cov.cols())
        throw Error(ErrorKind::ShapeError, what + " is not square");
    if (asymmetry(cov) > tol.symmetry)
        throw Error(ErrorKind::CovarianceError, what + " is not symmetric");
    if (!is_psd(cov, tol))
        throw Error(ErrorKind::CovarianceError, what + " is not positive semidefinite");
}

namespace {

std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

Network::Network(std::vector<NodeSpec> nodes, const Tolerances& tol) : nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end(), [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const NodeSpec& n = nodes_[i];
        if (n.id.empty()) throw Error(ErrorKind::SyntaxError, "empty node id");
        if (!index_.emplace(n.id, i).second) throw Error(ErrorKind::SyntaxError, "duplicate node id '" + n.id + "'");
    }

    const std::size_t count = nodes_.size();
    parents_.resize(count);
    children_.resize(count);
    ancestors_.resize(count);
    neighbors_.resize(count);

    for (std::size_t i = 0; i < count; ++i) {
        const NodeSpec& n = nodes_[i];
        if (n.dim == 0) throw Error(ErrorKind::ShapeError, "node '" + n.id + "' has dim 0");
        if (n.mean.size() != n.dim)
            throw Error(ErrorKind::ShapeError, "node '" + n.id + "' mean has length " + std::to_string(n.mean.size()) +
                                                   ", expected " + std::to_string(n.dim));
        if (n.noise_cov.rows() != n.dim || n.noise_cov.cols() != n.dim)
            throw Error(ErrorKind::ShapeError, "node '" + n.id + "' cov is " + shape(n.noise_cov));
        check_covariance(n.noise_cov, "cov of node '" + n.id + "'", tol);
        total_dim_ += n.dim;

        for (const ParentLink& p : n.parents) {
            if (p.id == n.id) throw Error(ErrorKind::CycleError, "node '" + n.id + "' lists itself as parent");
            auto it = index_.find(p.id);
            if (it == index_.end())
                throw Error(ErrorKind::DanglingRef, "node '" + n.id + "' references unknown parent '" + p.id + "'");
            if (!parents_[i].insert(p.id).second)
                throw Error(ErrorKind::SyntaxError, "node '" + n.id + "' lists parent '" + p.id + "' twice");
            const std::size_t pdim = nodes_[it->second].dim;
            if (p.link.rows() != n.dim || p.link.cols() != pdim)
                throw Error(ErrorKind::ShapeError, "link " + p.id + "->" + n.id + " is " + shape(p.link) +
                                                       ", expected " + std::to_string(n.dim) + "x" +
                                                       std::to_string(pdim));
            children_[it->second].insert(n.id);
            neighbors_[i].insert(p.id);
            neighbors_[it->second].insert(n.id);
        }
    }

    // Kahn with a min-heap on ids.
    std::vector<std::size_t> indeg(count);
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (std::size_t i = 0; i < count; ++i) {
        indeg[i] = parents_[i].size();
        if (indeg[i] == 0) ready.push(nodes_[i].id);
    }
    while (!ready.empty()) {
        NodeId id = ready.top();
        ready.pop();
        topo_.push_back(id);
        for (const NodeId& c : children_[idx(id)])
            if (--indeg[idx(c)] == 0) ready.push(c);
    }
    if (topo_.size() != count) {
        std::string stuck;
        for (std::size_t i = 0; i < count; ++i)
            if (indeg[i] > 0) stuck += (stuck.empty() ? "" : ", ") + nodes_[i].id;
        throw Error(ErrorKind::CycleError, "parent graph has a cycle through {" + stuck + "}");
    }
    topo_pos_.resize(count);
    for (std::size_t k = 0; k < topo_.size(); ++k) topo_pos_[idx(topo_[k])] = k;

    for (const NodeId& id : topo_) {
        IdSet& anc = ancestors_[idx(id)];
        for (const NodeId& p : parents_[idx(id)]) {
            anc.insert(p);
            const IdSet& pa = ancestors_[idx(p)];
            anc.insert(pa.begin(), pa.end());
        }
    }

    component_of_.assign(count, kUnreachable);
    for (std::size_t i = 0; i < count; ++i) {
        if (component_of_[i] != kUnreachable) continue;
        const std::size_t comp = components_.size();
        IdSet members;
        std::deque<std::size_t> frontier{i};
        component_of_[i] = comp;
        while (!frontier.empty()) {
            const std::size_t cur = frontier.front();
            frontier.pop_front();
            members.insert(nodes_[cur].id);
            for (const NodeId& nb : neighbors_[cur]) {
                const std::size_t j = idx(nb);
                if (component_of_[j] == kUnreachable) {
                    component_of_[j] = comp;
                    frontier.push_back(j);
                }
            }
        }
        components_.push_back(std::move(members));
    }
}

std::size_t Network::idx(const NodeId& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error(ErrorKind::UnknownNode, "unknown node '" + id + "'");
    return it->second;
}

const NodeSpec& Network::node(const NodeId& id) const { return nodes_[idx(id)]; }

std::vector<NodeId> Network::ids() const {
    std::vector<NodeId> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(n.id);
    return out;
}

std::size_t Network::topo_index(const NodeId& id) const { return topo_pos_[idx(id)]; }
const IdSet& Network::parents(const NodeId& id) const { return parents_[idx(id)]; }
const IdSet& Network::children(const NodeId& id) const { return children_[idx(id)]; }
const IdSet& Network::ancestors(const NodeId& id) const { return ancestors_[idx(id)]; }
const IdSet& Network::neighbors(const NodeId& id) const { return neighbors_[idx(id)]; }
std::size_t Network::component_of(const NodeId& id) const { return component_of_[idx(id)]; }

IdSet Network::ancestral_closure(const IdSet& seed) const {
    IdSet out;
    for (const NodeId& s : seed) {
        const IdSet& anc = ancestors(s);
        out.insert(s);
        out.insert(anc.begin(), anc.end());
    }
    return out;
}

std::vector<std::pair<NodeId, NodeId>> Network::arcs() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        for (const NodeId& p : parents_[i]) out.emplace_back(p, nodes_[i].id);
    std::sort(out.begin(), out.end());
    return out;
}

std::map<NodeId, std::size_t> Network::distances_from(const NodeId& from) const {
    std::map<NodeId, std::size_t> dist;
    for (const auto& n : nodes_) dist[n.id] = kUnreachable;
    dist[from] = 0;
    std::deque<NodeId> frontier{from};
    while (!frontier.empty()) {
        NodeId cur = frontier.front();
        frontier.pop_front();
        for (const NodeId& nb : neighbors(cur)) {
            if (dist[nb] == kUnreachable) {
                dist[nb] = dist[cur] + 1;
                frontier.push_back(nb);
            }
        }
    }
    return dist;
}

std::map<NodeId, std::size_t> skeleton_distances(const Network& net) {
    std::map<NodeId, std::size_t> ecc;
    for (const auto& n : net.nodes()) {
        std::size_t worst = 0;
        for (const auto& [other, d] : net.distances_from(n.id)) worst = std::max(worst, d);
        ecc[n.id] = worst;
    }
    return ecc;
}

std::map<NodeId, std::size_t> component_eccentricities(const Network& net, const IdSet& component) {
    std::map<NodeId, std::size_t> ecc;
    for (const NodeId& id : component) {
        const auto dist = net.distances_from(id);
        std::size_t worst = 0;
        for (const NodeId& other : component) worst = std::max(worst, dist.at(other));
        ecc[id] = worst;
    }
    return ecc;
}

}  // namespace lgspi
