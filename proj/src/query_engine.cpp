#include "lgspi/query_engine.hpp"

#include <algorithm>
#include <future>
#include <numeric>

#include "lgspi/errors.hpp"

namespace lgspi {
namespace {

std::string join(const IdSet& ids) {
    std::string out;
    for (const NodeId& id : ids) {
        out += id;
        out += ',';
    }
    return out;
}

std::string cache_key(const LMRequest& req, bool final) {
    return (final ? "F|" : "S|") + join(req.L) + "|" + join(req.M);
}

IdSet intersect(const IdSet& a, const IdSet& b) {
    IdSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

IdSet difference(const IdSet& a, const IdSet& b) {
    IdSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

IdSet unite(const IdSet& a, const IdSet& b) {
    IdSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

// Dependency edges of a repr set: deps[b] holds every a whose members b references.
std::vector<std::vector<std::size_t>> dependencies(const ReprSet& set) {
    std::map<NodeId, std::size_t> holder;
    for (std::size_t i = 0; i < set.size(); ++i)
        for (const MemberBlock& b : set[i].members()) holder[b.id] = i;
    std::vector<std::vector<std::size_t>> deps(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (const ExternalLink& e : set[i].externals()) {
            auto it = holder.find(e.id);
            if (it != holder.end() && std::find(deps[i].begin(), deps[i].end(), it->second) == deps[i].end())
                deps[i].push_back(it->second);
        }
    }
    return deps;
}

// Topological order of the chosen reprs under `deps`, ties by index.
std::vector<std::size_t> topo_order(const std::vector<std::vector<std::size_t>>& deps,
                                    const std::vector<std::size_t>& chosen) {
    std::vector<std::size_t> out;
    std::vector<bool> done(deps.size(), false);
    std::vector<bool> in(deps.size(), false);
    for (std::size_t c : chosen) in[c] = true;
    while (out.size() < chosen.size()) {
        bool advanced = false;
        for (std::size_t c : chosen) {
            if (done[c]) continue;
            const bool ready = std::all_of(deps[c].begin(), deps[c].end(),
                                           [&](std::size_t d) { return !in[d] || done[d]; });
            if (ready) {
                done[c] = true;
                out.push_back(c);
                advanced = true;
                break;
            }
        }
        if (!advanced) throw Error(ErrorKind::CombinabilityError, "repr dependency graph has a cycle");
    }
    return out;
}

}  // namespace

void Diagnostics::merge(const Diagnostics& o) {
    multiplications += o.multiplications;
    integrations += o.integrations;
    substitutions += o.substitutions;
    conditionings += o.conditionings;
    cache_hits += o.cache_hits;
    subtree_requests += o.subtree_requests;
    deferred_merges += o.deferred_merges;
    for (const auto& [id, n] : o.requests_per_node) requests_per_node[id] += n;
}

std::size_t Diagnostics::requests_to(const NodeId& id) const {
    auto it = requests_per_node.find(id);
    return it == requests_per_node.end() ? 0 : it->second;
}

std::size_t Diagnostics::requests_within(const IdSet& subtree) const {
    std::size_t n = 0;
    for (const NodeId& id : subtree) n += requests_to(id);
    return n;
}

std::shared_ptr<const ReprSet> NodeCache::find(const std::string& key) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : it->second;
}

void NodeCache::insert(const std::string& key, std::shared_ptr<const ReprSet> value) {
    std::unique_lock lock(mutex_);
    entries_[key] = std::move(value);
}

std::size_t NodeCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

void NodeCache::clear() {
    std::unique_lock lock(mutex_);
    entries_.clear();
}

void validate_query(const Query& q, const Network& net) {
    if (q.targets.empty()) throw Error(ErrorKind::QueryError, "query has no targets");
    for (const NodeId& id : q.targets)
        if (!net.contains(id)) throw Error(ErrorKind::UnknownNode, "unknown target '" + id + "'");
    for (const NodeId& id : q.given) {
        if (!net.contains(id)) throw Error(ErrorKind::UnknownNode, "unknown given node '" + id + "'");
        if (q.targets.contains(id)) throw Error(ErrorKind::QueryError, "'" + id + "' is both target and given");
    }
    for (const auto& [id, v] : q.evidence) {
        if (!net.contains(id)) throw Error(ErrorKind::UnknownNode, "unknown evidence node '" + id + "'");
        if (q.targets.contains(id)) throw Error(ErrorKind::QueryError, "'" + id + "' is both target and evidence");
        if (q.given.contains(id)) throw Error(ErrorKind::QueryError, "'" + id + "' is both given and evidence");
        if (v.size() != net.node(id).dim)
            throw Error(ErrorKind::ShapeError, "evidence for '" + id + "' has length " + std::to_string(v.size()) +
                                                   ", expected " + std::to_string(net.node(id).dim));
    }
}

LMRequest compute_lm(const Query& q, const Network& net) {
    validate_query(q, net);
    IdSet mentioned = unite(q.targets, q.given);
    for (const auto& [id, v] : q.evidence) mentioned.insert(id);
    return {net.ancestral_closure(mentioned), mentioned};
}

IdSet distribution_domain(const Network& net, const IdSet& nodes) {
    IdSet out = nodes;
    for (const NodeId& id : nodes) {
        const IdSet& p = net.parents(id);
        out.insert(p.begin(), p.end());
    }
    return out;
}

Engine::Engine(std::shared_ptr<const Network> net, EngineOptions options)
    : net_(std::move(net)), options_(options), forest_(*net_, options.tree_mode) {
    for (const NodeSpec& n : net_->nodes()) node_caches_.try_emplace(n.id);
}

Engine::Engine(const Network& net, EngineOptions options)
    : Engine(std::make_shared<const Network>(net), options) {}

std::size_t Engine::cache_entries() const {
    std::size_t n = final_cache_.size();
    for (const auto& [id, c] : node_caches_) n += c.size();
    return n;
}

void Engine::clear_cache() {
    final_cache_.clear();
    for (auto& [id, c] : node_caches_) c.clear();
}

ReprSet Engine::resolve(const NodeId& tree_node, const LMRequest& req, Diagnostics& diag) const {
    const SpiTree& tree = forest_.tree_of(tree_node);
    const IdSet& sub = tree.subtree(tree_node);
    if (!std::includes(sub.begin(), sub.end(), req.L.begin(), req.L.end()))
        throw Error(ErrorKind::QueryError, "request L is not inside the subtree of '" + tree_node + "'");

    ++diag.requests_per_node[tree_node];
    NodeCache& cache = node_caches_.at(tree_node);
    const std::string key = cache_key(req, false);
    if (auto hit = cache.find(key)) {
        ++diag.cache_hits;
        return *hit;
    }

    std::vector<std::pair<NodeId, LMRequest>> subrequests;
    for (const NodeId& child : tree.children(tree_node)) {
        IdSet lc = intersect(req.L, tree.subtree(child));
        if (lc.empty()) continue;
        const IdSet rest = difference(req.L, lc);
        IdSet mc = intersect(distribution_domain(*net_, lc), unite(req.M, distribution_domain(*net_, rest)));
        subrequests.emplace_back(child, LMRequest{std::move(lc), std::move(mc)});
    }
    diag.subtree_requests += subrequests.size();

    ReprSet set;
    if (options_.parallel_children && subrequests.size() > 1) {
        std::vector<std::future<std::pair<ReprSet, Diagnostics>>> pending;
        for (const auto& [child, sr] : subrequests) {
            pending.push_back(std::async(std::launch::async, [this, child = child, sr = sr] {
                Diagnostics d;
                ReprSet r = resolve(child, sr, d);
                return std::make_pair(std::move(r), std::move(d));
            }));
        }
        for (auto& f : pending) {
            auto [r, d] = f.get();
            diag.merge(d);
            set.insert(set.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
        }
    } else {
        for (const auto& [child, sr] : subrequests) {
            ReprSet r = resolve(child, sr, diag);
            set.insert(set.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
        }
    }
    if (req.L.contains(tree_node)) set.push_back(lift(net_->node(tree_node)));

    reduce(set, req.M, diag);
    cache.insert(key, std::make_shared<const ReprSet>(set));
    return set;
}

// Integrates out every member outside `keep`. A member can go once every repr
// referencing it has been multiplied together with its holder; those merges
// are skipped (deferred to an ancestor) while some external of the merged
// group still depends on one of its members, since that node's distribution
// has not been folded in yet.
void Engine::reduce(ReprSet& set, const IdSet& keep, Diagnostics& diag) const {
    IdSet deferred;
    for (bool progress = true; progress;) {
        progress = false;

        // Members nobody else references can be dropped right away.
        for (std::size_t i = 0; i < set.size(); ++i) {
            IdSet victims;
            for (const MemberBlock& b : set[i].members()) {
                if (keep.contains(b.id)) continue;
                const bool referenced = std::any_of(set.begin(), set.end(),
                                                    [&](const CombinedRepr& r) { return r.references(b.id); });
                if (!referenced) victims.insert(b.id);
            }
            if (!victims.empty()) {
                set[i] = integrate_out(set[i], victims);
                ++diag.integrations;
            }
        }
        std::erase_if(set, [](const CombinedRepr& r) { return r.empty(); });

        std::vector<NodeId> pending;
        for (const CombinedRepr& r : set)
            for (const MemberBlock& b : r.members())
                if (!keep.contains(b.id)) pending.push_back(b.id);
        std::sort(pending.begin(), pending.end(), [&](const NodeId& a, const NodeId& b) {
            return net_->topo_index(a) < net_->topo_index(b);
        });

        for (const NodeId& m : pending) {
            const auto deps = dependencies(set);
            const std::size_t n = set.size();
            std::size_t h = n;
            std::vector<std::size_t> refs;
            for (std::size_t i = 0; i < n; ++i) {
                if (set[i].has_member(m)) h = i;
                if (set[i].references(m)) refs.push_back(i);
            }
            if (h == n || refs.empty()) continue;

            // group = reprs reachable from the holder that also reach a referencer
            std::vector<std::vector<std::size_t>> users(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t d : deps[i]) users[d].push_back(i);
            std::vector<bool> fwd(n, false), bwd(n, false);
            std::vector<std::size_t> stack{h};
            fwd[h] = true;
            while (!stack.empty()) {
                std::size_t cur = stack.back();
                stack.pop_back();
                for (std::size_t u : users[cur]) {
                    if (fwd[u]) continue;
                    fwd[u] = true;
                    stack.push_back(u);
                }
            }
            for (std::size_t r : refs) {
                bwd[r] = true;
                stack.push_back(r);
            }
            while (!stack.empty()) {
                std::size_t cur = stack.back();
                stack.pop_back();
                for (std::size_t d : deps[cur]) {
                    if (bwd[d]) continue;
                    bwd[d] = true;
                    stack.push_back(d);
                }
            }
            std::vector<std::size_t> group;
            for (std::size_t i = 0; i < n; ++i)
                if (fwd[i] && bwd[i]) group.push_back(i);

            IdSet members, externals;
            for (std::size_t g : group) {
                for (const MemberBlock& b : set[g].members()) members.insert(b.id);
                for (const ExternalLink& e : set[g].externals()) externals.insert(e.id);
            }
            bool blocked = false;
            for (const NodeId& x : difference(externals, members)) {
                const IdSet& anc = net_->ancestors(x);
                if (std::any_of(members.begin(), members.end(), [&](const NodeId& g) { return anc.contains(g); })) {
                    blocked = true;
                    break;
                }
            }
            if (blocked) {
                if (deferred.insert(m).second) ++diag.deferred_merges;
                continue;
            }

            CombinedRepr merged;
            for (std::size_t g : topo_order(deps, group)) {
                if (!merged.empty()) ++diag.multiplications;
                merged = multiply(merged, set[g], options_.tolerances);
            }
            ReprSet next;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == group.front()) next.push_back(std::move(merged));
                else if (!(fwd[i] && bwd[i])) next.push_back(std::move(set[i]));
            }
            set = std::move(next);
            progress = true;
            break;  // dependency structure changed; recompute
        }
    }
}

CombinedRepr Engine::fold_all(ReprSet set, Diagnostics& diag) const {
    std::vector<std::size_t> all(set.size());
    std::iota(all.begin(), all.end(), 0);
    CombinedRepr merged;
    for (std::size_t i : topo_order(dependencies(set), all)) {
        if (!merged.empty()) ++diag.multiplications;
        merged = multiply(merged, set[i], options_.tolerances);
    }
    return merged;
}

CombinedRepr Engine::resolve_final(const LMRequest& req, Diagnostics& diag) const {
    const std::string key = cache_key(req, true);
    if (auto hit = final_cache_.find(key)) {
        ++diag.cache_hits;
        return hit->front();
    }

    ReprSet parts;
    for (const SpiTree& tree : forest_.trees()) {
        const IdSet lc = intersect(req.L, tree.nodes());
        if (lc.empty()) continue;
        const IdSet mc = intersect(req.M, tree.nodes());
        ++diag.subtree_requests;
        parts.push_back(fold_all(resolve(tree.root(), {lc, mc}, diag), diag));
    }
    CombinedRepr out = fold_all(std::move(parts), diag);

    IdSet extra;
    for (const MemberBlock& b : out.members())
        if (!req.M.contains(b.id)) extra.insert(b.id);
    if (!extra.empty()) {
        out = integrate_out(out, extra);
        ++diag.integrations;
    }
    final_cache_.insert(key, std::make_shared<const ReprSet>(ReprSet{out}));
    return out;
}

QueryResult Engine::answer(const Query& q) const {
    validate_query(q, *net_);
    const Network& net = *net_;

    // Evidence in a component that no target or given node lives in is
    // independent of the answer.
    std::set<std::size_t> comps;
    for (const NodeId& id : unite(q.targets, q.given)) comps.insert(net.component_of(id));
    EvidenceMap evidence;
    for (const auto& [id, v] : q.evidence)
        if (comps.contains(net.component_of(id))) evidence.emplace(id, v);

    IdSet e_root, e_member, y_root, y_member;
    for (const auto& [id, v] : evidence) (net.is_root(id) ? e_root : e_member).insert(id);
    for (const NodeId& id : q.given) (net.is_root(id) ? y_root : y_member).insert(id);

    IdSet linked;  // handled as links, never folded
    if (options_.evidence_path == EvidencePath::Auto) {
        linked = e_root;
        if (e_member.empty() && y_member.empty()) linked.insert(y_root.begin(), y_root.end());
    }

    IdSet mentioned = unite(q.targets, q.given);
    for (const auto& [id, v] : evidence) mentioned.insert(id);
    const LMRequest req{difference(net.ancestral_closure(mentioned), linked), difference(mentioned, linked)};

    QueryResult result;
    result.request = req;
    Diagnostics& diag = result.diagnostics;
    CombinedRepr repr = resolve_final(req, diag);

    EvidenceMap substitute;
    for (const NodeId& id : intersect(e_root, linked))
        if (repr.references(id)) substitute.emplace(id, evidence.at(id));
    if (!substitute.empty()) {
        repr = substitute_evidence(repr, substitute);
        ++diag.substitutions;
    }

    const IdSet cond_on = difference(mentioned, unite(q.targets, linked));
    if (!cond_on.empty()) {
        EvidenceMap values;
        for (const auto& [id, v] : evidence)
            if (cond_on.contains(id)) values.emplace(id, v);
        repr = condition(repr, cond_on, values, options_.tolerances);
        ++diag.conditionings;
    }

    // Present targets in id order and a link for every given node.
    repr = reorder(repr, std::vector<NodeId>(q.targets.begin(), q.targets.end()));
    if (!q.given.empty()) {
        std::vector<ExternalLink> links;
        for (const NodeId& y : q.given) {
            if (const ExternalLink* e = repr.find_external(y)) links.push_back(*e);
            else links.push_back({y, Matrix(repr.dim(), net.node(y).dim)});
        }
        std::vector<std::pair<NodeId, std::size_t>> blocks;
        for (const MemberBlock& b : repr.members()) blocks.emplace_back(b.id, b.dim);
        repr = CombinedRepr(blocks, repr.mean(), repr.noise_cov(), std::move(links), options_.tolerances);
    }
    result.answer = std::move(repr);
    diag.cache_entries = cache_entries();
    return result;
}

void Session::add_evidence(const EvidenceMap& values) {
    const Network& net = engine_->network();
    for (const auto& [id, v] : values) {
        if (!net.contains(id)) throw Error(ErrorKind::UnknownNode, "unknown evidence node '" + id + "'");
        if (v.size() != net.node(id).dim) throw Error(ErrorKind::ShapeError, "evidence for '" + id + "' has wrong length");
    }
    for (const auto& [id, v] : values) evidence_[id] = v;
}

void Session::retract_evidence(const IdSet& ids) {
    for (const NodeId& id : ids)
        if (!engine_->network().contains(id)) throw Error(ErrorKind::UnknownNode, "unknown evidence node '" + id + "'");
    for (const NodeId& id : ids) evidence_.erase(id);
}

QueryResult Session::ask(const IdSet& targets, const IdSet& given) const {
    return engine_->answer(Query{targets, given, evidence_});
}

}  // namespace lgspi
