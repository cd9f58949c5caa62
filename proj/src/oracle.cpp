#include "lgspi/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdio>
#include <random>

#include "lgspi/errors.hpp"

namespace lgspi {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_eigen(const Matrix& m) {
    MatrixXd e(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
    return e;
}

Matrix from_eigen(const MatrixXd& e) {
    Matrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    return m;
}

std::vector<Eigen::Index> indices_of(const JointMoments& jm, const IdSet& ids) {
    std::vector<Eigen::Index> idx;
    for (const NodeId& id : ids) {
        const MemberBlock& b = jm.block(id);
        for (std::size_t k = 0; k < b.dim; ++k) idx.push_back(static_cast<Eigen::Index>(b.offset + k));
    }
    return idx;
}

MatrixXd gather(const MatrixXd& m, const std::vector<Eigen::Index>& rows, const std::vector<Eigen::Index>& cols) {
    MatrixXd out(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(rows[r], cols[c]);
    return out;
}

VectorXd gather(const VectorXd& v, const std::vector<Eigen::Index>& idx) {
    VectorXd out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
    return out;
}

}  // namespace

const MemberBlock& JointMoments::block(const NodeId& id) const {
    for (const MemberBlock& b : layout)
        if (b.id == id) return b;
    throw Error(ErrorKind::UnknownNode, "unknown node '" + id + "'");
}

JointMoments joint_moments(const Network& net) {
    JointMoments jm;
    std::size_t offset = 0;
    for (const NodeId& id : net.topological_order()) {
        const std::size_t dim = net.node(id).dim;
        jm.layout.push_back({id, dim, offset});
        offset += dim;
    }
    const auto n = static_cast<Eigen::Index>(offset);

    MatrixXd a = MatrixXd::Identity(n, n);  // I - B
    MatrixXd noise = MatrixXd::Zero(n, n);
    VectorXd wbar(n);
    for (const MemberBlock& b : jm.layout) {
        const NodeSpec& node = net.node(b.id);
        const auto o = static_cast<Eigen::Index>(b.offset);
        const auto d = static_cast<Eigen::Index>(b.dim);
        noise.block(o, o, d, d) = to_eigen(node.noise_cov);
        for (std::size_t k = 0; k < b.dim; ++k) wbar(o + static_cast<Eigen::Index>(k)) = node.mean[k];
        for (const ParentLink& p : node.parents) {
            const MemberBlock& pb = jm.block(p.id);
            a.block(o, static_cast<Eigen::Index>(pb.offset), d, static_cast<Eigen::Index>(pb.dim)) -= to_eigen(p.link);
        }
    }

    const auto tri = a.triangularView<Eigen::UnitLower>();
    const VectorXd mu = tri.solve(wbar);
    const MatrixXd left = tri.solve(noise);                         // A^-1 D
    MatrixXd sigma = tri.solve(MatrixXd(left.transpose()));         // A^-1 (A^-1 D)^T
    sigma = 0.5 * (sigma + sigma.transpose()).eval();

    jm.mean.assign(mu.data(), mu.data() + mu.size());
    jm.cov = from_eigen(sigma);
    return jm;
}

OracleAnswer oracle_query(const JointMoments& jm, const IdSet& targets, const IdSet& given,
                          const EvidenceMap& evidence, const Tolerances& tol) {
    const MatrixXd sigma = to_eigen(jm.cov);
    const VectorXd mu = Eigen::Map<const VectorXd>(jm.mean.data(), static_cast<Eigen::Index>(jm.mean.size()));

    IdSet evidence_ids;
    for (const auto& [id, v] : evidence) evidence_ids.insert(id);

    // Conditioning set: given blocks first, then evidence blocks.
    const auto xi = indices_of(jm, targets);
    const auto yi = indices_of(jm, given);
    const auto ei = indices_of(jm, evidence_ids);
    std::vector<Eigen::Index> ci = yi;
    ci.insert(ci.end(), ei.begin(), ei.end());

    VectorXd mean_x = gather(mu, xi);
    MatrixXd cov_x = gather(sigma, xi, xi);
    MatrixXd gain(xi.size(), ci.size());

    if (!ci.empty()) {
        const MatrixXd s_cc = gather(sigma, ci, ci);
        const MatrixXd s_xc = gather(sigma, xi, ci);
        const double min_eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(s_cc, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
        if (!(min_eig > tol.pd_evidence * std::abs(s_cc.trace())))
            throw Error(ErrorKind::DegenerateEvidence, "oracle conditioning block is singular");
        const Eigen::LLT<MatrixXd> llt(s_cc);
        gain = llt.solve(s_xc.transpose()).transpose();

        VectorXd deviation(ci.size());
        const VectorXd mu_c = gather(mu, ci);
        for (std::size_t k = 0; k < yi.size(); ++k) deviation(static_cast<Eigen::Index>(k)) = -mu_c(static_cast<Eigen::Index>(k));
        std::size_t k = yi.size();
        for (const auto& [id, v] : evidence) {
            if (v.size() != jm.block(id).dim) throw Error(ErrorKind::ShapeError, "evidence for '" + id + "' has wrong length");
            for (double val : v) {
                deviation(static_cast<Eigen::Index>(k)) = val - mu_c(static_cast<Eigen::Index>(k));
                ++k;
            }
        }
        mean_x += gain * deviation;
        cov_x -= gain * s_xc.transpose();
        cov_x = 0.5 * (cov_x + cov_x.transpose()).eval();
    }

    OracleAnswer out;
    std::size_t offset = 0;
    for (const NodeId& id : targets) {
        const std::size_t d = jm.block(id).dim;
        out.layout.push_back({id, d, offset});
        offset += d;
    }
    out.mean.assign(mean_x.data(), mean_x.data() + mean_x.size());
    out.cov = from_eigen(cov_x);
    std::size_t col = 0;
    for (const NodeId& id : given) {
        const auto d = static_cast<Eigen::Index>(jm.block(id).dim);
        out.links.push_back({id, from_eigen(gain.block(0, static_cast<Eigen::Index>(col), gain.rows(), d))});
        col += static_cast<std::size_t>(d);
    }
    return out;
}

Network random_network(std::uint64_t seed, const RandomNetworkParams& params) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };

    const std::size_t n = std::max<std::size_t>(params.n_nodes, 1);
    std::vector<NodeId> ids;
    for (std::size_t i = 0; i < n; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "n%02zu", i);
        ids.emplace_back(buf);
    }
    std::vector<NodeId> order = ids;
    std::shuffle(order.begin(), order.end(), rng);

    std::map<NodeId, std::size_t> dims;
    std::vector<NodeSpec> specs;
    for (std::size_t k = 0; k < n; ++k) {
        NodeSpec spec;
        spec.id = order[k];
        spec.dim = pick(1, std::max<std::size_t>(params.max_dim, 1));
        dims[spec.id] = spec.dim;
        spec.mean.resize(spec.dim);
        for (double& m : spec.mean) m = uniform(-3.0, 3.0);

        Matrix a(spec.dim, spec.dim);
        for (std::size_t r = 0; r < spec.dim; ++r)
            for (std::size_t c = 0; c < spec.dim; ++c) a(r, c) = uniform(-1.0, 1.0);
        spec.noise_cov = Matrix(spec.dim, spec.dim);
        for (std::size_t r = 0; r < spec.dim; ++r)
            for (std::size_t c = 0; c < spec.dim; ++c) {
                double s = r == c ? 0.1 : 0.0;
                for (std::size_t p = 0; p < spec.dim; ++p) s += a(r, p) * a(c, p);
                spec.noise_cov(r, c) = s;
            }

        std::vector<NodeId> earlier(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
        std::shuffle(earlier.begin(), earlier.end(), rng);
        const std::size_t n_parents = pick(0, std::min(params.max_parents, earlier.size()));
        for (std::size_t p = 0; p < n_parents; ++p) {
            Matrix link(spec.dim, dims[earlier[p]]);
            for (std::size_t r = 0; r < link.rows(); ++r)
                for (std::size_t c = 0; c < link.cols(); ++c) link(r, c) = uniform(-2.0, 2.0);
            spec.parents.push_back({earlier[p], std::move(link)});
        }
        specs.push_back(std::move(spec));
    }
    return Network(std::move(specs));
}

}  // namespace lgspi
