#pragma once

// Linear-Gaussian Bayesian networks.
//
// Each node is a vector variable
//
//     x = B_1 p_1 + ... + B_N p_N + w,   w ~ Normal(mean, noise_cov)
//
// over its parents p_i. A Network owns a validated, acyclic collection of
// such nodes plus the derived graph structure the inference modules need.

#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lgspi/linalg.hpp"

namespace lgspi {

using NodeId = std::string;
using IdSet = std::set<NodeId>;

// Engine-wide numeric tolerances.
struct Tolerances {
    double symmetry = 1e-9;       // max |Q - Q^T|
    double psd_slack = 1e-8;      // min eigenvalue >= -psd_slack * (1 + trace/dim)
    double pd_evidence = 1e-10;   // min eigenvalue > pd_evidence * trace for conditioning blocks
    bool check_psd_on_multiply = true;
};

const Tolerances& default_tolerances();

struct ParentLink {
    NodeId id;
    Matrix link;  // dim x parent_dim

    bool operator==(const ParentLink&) const = default;
};

struct NodeSpec {
    NodeId id;
    std::size_t dim = 0;
    Vector mean;
    Matrix noise_cov;
    std::vector<ParentLink> parents;

    bool operator==(const NodeSpec&) const = default;
};

// Throws CovarianceError when `cov` is not symmetric or not PSD under `tol`.
// `what` names the matrix in the message.
void check_covariance(const Matrix& cov, const std::string& what, const Tolerances& tol = default_tolerances());
bool is_psd(const Matrix& sym, const Tolerances& tol = default_tolerances());

class Network {
public:
    static constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

    // Validates everything (shapes, covariances, references, acyclicity).
    explicit Network(std::vector<NodeSpec> nodes, const Tolerances& tol = default_tolerances());

    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t total_dim() const noexcept { return total_dim_; }

    bool contains(const NodeId& id) const { return index_.contains(id); }
    const NodeSpec& node(const NodeId& id) const;
    // Nodes sorted by id.
    const std::vector<NodeSpec>& nodes() const noexcept { return nodes_; }
    std::vector<NodeId> ids() const;

    // Parents come first; ties broken lexicographically (Kahn's algorithm).
    const std::vector<NodeId>& topological_order() const noexcept { return topo_; }
    std::size_t topo_index(const NodeId& id) const;

    const IdSet& parents(const NodeId& id) const;
    const IdSet& children(const NodeId& id) const;
    const IdSet& ancestors(const NodeId& id) const;  // strict
    const IdSet& neighbors(const NodeId& id) const;  // undirected skeleton
    bool is_root(const NodeId& id) const { return parents(id).empty(); }

    // seed plus every ancestor of seed. Throws UnknownNode.
    IdSet ancestral_closure(const IdSet& seed) const;

    // Connected components of the skeleton, each sorted, ordered by smallest id.
    const std::vector<IdSet>& components() const noexcept { return components_; }
    std::size_t component_of(const NodeId& id) const;

    // Directed arcs (parent, child), sorted.
    std::vector<std::pair<NodeId, NodeId>> arcs() const;

    // Unit-weight BFS distances on the skeleton from `from`; kUnreachable when
    // there is no path.
    std::map<NodeId, std::size_t> distances_from(const NodeId& from) const;

private:
    std::size_t idx(const NodeId& id) const;

    std::vector<NodeSpec> nodes_;
    std::map<NodeId, std::size_t> index_;
    std::vector<IdSet> parents_, children_, ancestors_, neighbors_;
    std::vector<NodeId> topo_;
    std::vector<std::size_t> topo_pos_;
    std::vector<IdSet> components_;
    std::vector<std::size_t> component_of_;
    std::size_t total_dim_ = 0;
};

// Maximum skeleton distance from each node to every other node. A node that
// cannot reach some other node has eccentricity Network::kUnreachable.
std::map<NodeId, std::size_t> skeleton_distances(const Network& net);

// Eccentricity restricted to the nodes of `component`.
std::map<NodeId, std::size_t> component_eccentricities(const Network& net, const IdSet& component);

}  // namespace lgspi
