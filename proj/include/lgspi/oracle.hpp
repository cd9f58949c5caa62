#pragma once

// Dense reference answers. The full joint Gaussian of a network is
//
//     mu    = (I - B)^-1 wbar
//     Sigma = (I - B)^-1 blockdiag(Q_i) (I - B)^-T
//
// with B the block lower-triangular link matrix over a topological stacking;
// both come from unit-triangular solves. Queries are answered by ordinary
// marginalization and Schur-complement conditioning. This path shares no
// code with the engine's matrix layer (it runs on Eigen).

#include <cstdint>
#include <optional>
#include <vector>

#include "lgspi/gaussian_repr.hpp"
#include "lgspi/network.hpp"

namespace lgspi {

struct JointMoments {
    std::vector<MemberBlock> layout;  // topological order
    Vector mean;
    Matrix cov;

    const MemberBlock& block(const NodeId& id) const;
};

JointMoments joint_moments(const Network& net);

struct OracleAnswer {
    std::vector<MemberBlock> layout;  // targets in id order
    Vector mean;
    Matrix cov;
    std::vector<ExternalLink> links;  // given nodes in id order; K = S_xy S_yy^-1 part of the gain
};

// P(X | Y, E = e*). Throws DegenerateEvidence when the conditioning block is
// not positive definite (min eigenvalue <= pd_evidence * trace).
OracleAnswer oracle_query(const JointMoments& jm, const IdSet& targets, const IdSet& given = {},
                          const EvidenceMap& evidence = {}, const Tolerances& tol = default_tolerances());

struct RandomNetworkParams {
    std::size_t n_nodes = 6;
    std::size_t max_parents = 3;
    std::size_t max_dim = 3;
};

// Deterministic in seed: random topological order, up to max_parents earlier
// nodes as parents, links uniform in [-2, 2], noise covariance A A^T + 0.1 I
// with A uniform in [-1, 1], means uniform in [-3, 3]. Ids are n00, n01, ...
Network random_network(std::uint64_t seed, const RandomNetworkParams& params);

}  // namespace lgspi
