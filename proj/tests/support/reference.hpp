#pragma once

// Test-side reference computations. Nothing here calls the engine's matrix
// layer or the library oracle: joint moments come from explicit directed-path
// enumeration and conditioning from a full Eigen inverse.

#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lgspi/network.hpp"

namespace lgspi::testing {

using Dense = Eigen::MatrixXd;
using DenseVec = Eigen::VectorXd;

inline Dense to_dense(const Matrix& m) {
    Dense d(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) d(i, j) = m(i, j);
    return d;
}

inline DenseVec to_dense(const Vector& v) {
    DenseVec d(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) d(i) = v[i];
    return d;
}

inline double max_abs(const Dense& d) { return d.size() == 0 ? 0.0 : d.cwiseAbs().maxCoeff(); }

// The desk network: a1 -> c1 -> c2 <- a2.
inline Network desk_network() {
    std::vector<NodeSpec> nodes;
    nodes.push_back({"a1", 1, {1.0}, Matrix{{1.0}}, {}});
    nodes.push_back({"a2", 1, {0.0}, Matrix{{2.0}}, {}});
    nodes.push_back({"c1", 1, {0.0}, Matrix{{0.5}}, {{"a1", Matrix{{2.0}}}}});
    nodes.push_back({"c2", 1, {0.0}, Matrix{{1.0}}, {{"c1", Matrix{{1.0}}}, {"a2", Matrix{{3.0}}}}});
    return Network(std::move(nodes));
}

// Sum over directed paths from -> ... -> to of the right-to-left product of
// link matrices (identity when from == to, zero when unreachable).
inline Dense path_sum(const Network& net, const NodeId& from, const NodeId& to) {
    const std::size_t rows = net.node(to).dim, cols = net.node(from).dim;
    if (from == to) return Dense::Identity(rows, cols);
    Dense total = Dense::Zero(rows, cols);
    // Walk backwards from `to`: every path ends with some arc p -> to.
    for (const ParentLink& p : net.node(to).parents) total += to_dense(p.link) * path_sum(net, from, p.id);
    return total;
}

// Number of distinct directed paths between two nodes.
inline std::size_t count_paths(const Network& net, const NodeId& from, const NodeId& to) {
    if (from == to) return 1;
    std::size_t n = 0;
    for (const ParentLink& p : net.node(to).parents) n += count_paths(net, from, p.id);
    return n;
}

struct DenseJoint {
    std::vector<NodeId> order;  // node ids, sorted
    std::map<NodeId, std::size_t> offset;
    DenseVec mean;
    Dense cov;

    std::vector<int> indices(const std::vector<NodeId>& ids, const Network& net) const {
        std::vector<int> idx;
        for (const NodeId& id : ids)
            for (std::size_t k = 0; k < net.node(id).dim; ++k) idx.push_back(static_cast<int>(offset.at(id) + k));
        return idx;
    }
};

// x_v = sum_j T(j -> v) w_j over all nodes j, where w_j ~ N(mean_j, Q_j)
// independently, so mu_v = sum_j T(j->v) mean_j and
// Cov(x_u, x_v) = sum_j T(j->u) Q_j T(j->v)'.
inline DenseJoint path_sum_joint(const Network& net) {
    DenseJoint jt;
    std::size_t off = 0;
    for (const NodeSpec& n : net.nodes()) {
        jt.order.push_back(n.id);
        jt.offset[n.id] = off;
        off += n.dim;
    }
    jt.mean = DenseVec::Zero(off);
    jt.cov = Dense::Zero(off, off);
    std::map<std::pair<NodeId, NodeId>, Dense> T;
    for (const NodeSpec& j : net.nodes())
        for (const NodeSpec& v : net.nodes()) T[{j.id, v.id}] = path_sum(net, j.id, v.id);
    for (const NodeSpec& j : net.nodes()) {
        const DenseVec wm = to_dense(j.mean);
        const Dense Q = to_dense(j.noise_cov);
        for (const NodeSpec& u : net.nodes()) {
            const Dense& Tu = T[{j.id, u.id}];
            jt.mean.segment(jt.offset[u.id], u.dim) += Tu * wm;
            for (const NodeSpec& v : net.nodes())
                jt.cov.block(jt.offset[u.id], jt.offset[v.id], u.dim, v.dim) += Tu * Q * T[{j.id, v.id}].transpose();
        }
    }
    return jt;
}

struct DenseAnswer {
    DenseVec mean;
    Dense cov;
    Dense gain_given;  // d(mean) / d(given), columns in given-id order
};

// Conditions the path-sum joint with an explicit inverse of the whole
// conditioning block. Given ids and evidence ids are both conditioned on;
// the given columns of the gain are returned as the symbolic link and the
// mean is evaluated at given = 0.
inline DenseAnswer dense_condition(const Network& net, const DenseJoint& jt, const std::vector<NodeId>& targets,
                                   const std::vector<NodeId>& given, const std::map<NodeId, Vector>& evidence) {
    std::vector<NodeId> cond = given;
    std::vector<NodeId> ev_ids;
    for (const auto& [id, v] : evidence) ev_ids.push_back(id), cond.push_back(id);
    const auto xi = jt.indices(targets, net);
    const auto ci = jt.indices(cond, net);
    const auto gi = jt.indices(given, net);
    DenseVec e = DenseVec::Zero(static_cast<Eigen::Index>(ci.size()));
    Eigen::Index pos = static_cast<Eigen::Index>(gi.size());
    for (const auto& [id, v] : evidence)
        for (double x : v) e(pos++) = x;

    DenseAnswer out;
    const DenseVec mx = jt.mean(xi);
    const Dense Sxx = jt.cov(xi, xi);
    if (ci.empty()) {
        out.mean = mx;
        out.cov = Sxx;
        return out;
    }
    const Dense Sxc = jt.cov(xi, ci);
    const Dense Scc = jt.cov(ci, ci);
    const Dense G = Sxc * Scc.inverse();
    out.mean = mx + G * (e - jt.mean(ci));
    out.cov = Sxx - G * Sxc.transpose();
    out.gain_given = G.leftCols(static_cast<Eigen::Index>(gi.size()));
    return out;
}

// A uniformly random topological order of the nodes in `subset`.
inline std::vector<NodeId> random_topological_order(const Network& net, const IdSet& subset, std::mt19937_64& rng) {
    std::map<NodeId, std::size_t> pending;
    for (const NodeId& id : subset) {
        std::size_t k = 0;
        for (const NodeId& p : net.parents(id)) k += subset.contains(p);
        pending[id] = k;
    }
    std::vector<NodeId> out;
    while (out.size() < subset.size()) {
        std::vector<NodeId> ready;
        for (const auto& [id, k] : pending)
            if (k == 0) ready.push_back(id);
        const NodeId pick = ready[std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng)];
        pending.erase(pick);
        out.push_back(pick);
        for (const NodeId& c : net.children(pick))
            if (pending.contains(c)) --pending[c];
    }
    return out;
}

inline std::filesystem::path data_dir() { return LGSPI_TEST_DATA_DIR; }

}  // namespace lgspi::testing
