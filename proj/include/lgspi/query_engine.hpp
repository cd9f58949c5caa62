#pragma once

// Goal-directed query answering over an SPI forest.
//
// A query P(X | Y, E = e*) becomes a request (L, M): L is the set of node
// distributions to multiply (the ancestral closure of everything mentioned)
// and M the dimensions to keep. Requests travel down the tree; a child only
// receives one when its subtree intersects L. Each tree node folds the sets
// of reprs returned by its children with its own distribution, integrates out
// whatever no one else needs, and caches the evidence-free result. Evidence is
// applied to the final repr only, so changing observed values reuses every
// cached multiplication.

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "lgspi/gaussian_repr.hpp"
#include "lgspi/network.hpp"
#include "lgspi/spi_tree.hpp"

namespace lgspi {

struct Query {
    IdSet targets;        // X
    IdSet given;          // Y, answered symbolically
    EvidenceMap evidence; // E = e*
};

struct LMRequest {
    IdSet L;
    IdSet M;

    bool operator==(const LMRequest&) const = default;
};

// Validates the query against the network (UnknownNode, QueryError, ShapeError).
void validate_query(const Query& q, const Network& net);

// L = ancestral closure of X, Y and the evidence ids; M = those ids.
LMRequest compute_lm(const Query& q, const Network& net);

// D(S): the nodes of S plus every parent they reference.
IdSet distribution_domain(const Network& net, const IdSet& nodes);

using ReprSet = std::vector<CombinedRepr>;

struct Diagnostics {
    std::size_t multiplications = 0;
    std::size_t integrations = 0;
    std::size_t substitutions = 0;
    std::size_t conditionings = 0;
    std::size_t cache_hits = 0;
    std::size_t subtree_requests = 0;
    std::size_t deferred_merges = 0;
    std::size_t cache_entries = 0;
    std::map<NodeId, std::size_t> requests_per_node;

    void merge(const Diagnostics& other);
    std::size_t requests_to(const NodeId& id) const;
    // Requests received anywhere in the given subtree.
    std::size_t requests_within(const IdSet& subtree) const;
};

// Per-tree-node cache of evidence-free results. Concurrent lookups share a
// lock; insertion is exclusive. Values are immutable once stored.
class NodeCache {
public:
    std::shared_ptr<const ReprSet> find(const std::string& key) const;
    void insert(const std::string& key, std::shared_ptr<const ReprSet> value);
    std::size_t size() const;
    void clear();

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<const ReprSet>> entries_;
};

enum class EvidencePath {
    // Observed or given root nodes are kept as links and handled by
    // substitution; everything else by Gaussian conditioning.
    Auto,
    // Every evidence and given node is folded in and conditioned on.
    ConditionOnly,
};

struct EngineOptions {
    TreeMode tree_mode = TreeMode::Bushy;
    EvidencePath evidence_path = EvidencePath::Auto;
    bool parallel_children = false;
    Tolerances tolerances = default_tolerances();
};

struct QueryResult {
    // Members are the targets in id order; externals are the symbolic links
    // to the given nodes (id order), empty when nothing is given.
    CombinedRepr answer;
    Diagnostics diagnostics;
    LMRequest request;  // what was actually resolved

    const Vector& mean() const { return answer.mean(); }
    const Matrix& covariance() const { return answer.noise_cov(); }
    const std::vector<ExternalLink>& links() const { return answer.externals(); }
};

class Engine {
public:
    Engine(std::shared_ptr<const Network> net, EngineOptions options = {});
    Engine(const Network& net, EngineOptions options = {});

    const Network& network() const noexcept { return *net_; }
    const SpiForest& forest() const noexcept { return forest_; }
    const EngineOptions& options() const noexcept { return options_; }

    // Resolves a request at a tree node. req.L must lie inside the node's subtree.
    ReprSet resolve(const NodeId& tree_node, const LMRequest& req, Diagnostics& diag) const;

    // Fully folded, evidence-free repr over req.M (fold order).
    CombinedRepr resolve_final(const LMRequest& req, Diagnostics& diag) const;

    QueryResult answer(const Query& q) const;

    std::size_t cache_entries() const;
    void clear_cache();

private:
    void reduce(ReprSet& set, const IdSet& keep, Diagnostics& diag) const;
    CombinedRepr fold_all(ReprSet set, Diagnostics& diag) const;

    std::shared_ptr<const Network> net_;
    EngineOptions options_;
    SpiForest forest_;
    mutable std::map<NodeId, NodeCache> node_caches_;
    mutable NodeCache final_cache_;
};

// Evidence state for a sequence of queries against one engine.
class Session {
public:
    explicit Session(const Engine& engine) : engine_(&engine) {}

    void add_evidence(const EvidenceMap& values);
    void retract_evidence(const IdSet& ids);
    void retract_all() { evidence_.clear(); }
    const EvidenceMap& evidence() const noexcept { return evidence_; }

    QueryResult ask(const IdSet& targets, const IdSet& given = {}) const;

private:
    const Engine* engine_;
    EvidenceMap evidence_;
};

}  // namespace lgspi
