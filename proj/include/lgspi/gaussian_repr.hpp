#pragma once

// Generalized linear-Gaussian distributions and the three inference
// operations on them.
//
// A CombinedRepr describes a stacked member vector
//
//     m = mean + sum_e K_e * e + w,    w ~ Normal(0, noise_cov)
//
// conditional on the external variables e, with w independent of every
// external. A single network node lifts to a one-member repr whose externals
// are its parents; multiplying reprs combines nodes into one joint block.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lgspi/linalg.hpp"
#include "lgspi/network.hpp"

namespace lgspi {

struct MemberBlock {
    NodeId id;
    std::size_t dim = 0;
    std::size_t offset = 0;

    bool operator==(const MemberBlock&) const = default;
};

struct ExternalLink {
    NodeId id;
    Matrix K;  // total member dim x external dim

    std::size_t dim() const noexcept { return K.cols(); }
    bool operator==(const ExternalLink&) const = default;
};

using EvidenceMap = std::map<NodeId, Vector>;

class CombinedRepr {
public:
    // The empty repr: zero members, the identity for multiply.
    CombinedRepr() = default;

    // Validates block layout, member/external disjointness, shapes and
    // symmetry of noise_cov. PSD is not checked here.
    CombinedRepr(const std::vector<std::pair<NodeId, std::size_t>>& members, Vector mean, Matrix noise_cov,
                 std::vector<ExternalLink> externals, const Tolerances& tol = default_tolerances());

    const std::vector<MemberBlock>& members() const noexcept { return members_; }
    const Vector& mean() const noexcept { return mean_; }
    const Matrix& noise_cov() const noexcept { return noise_cov_; }
    const std::vector<ExternalLink>& externals() const noexcept { return externals_; }

    std::size_t dim() const noexcept { return mean_.size(); }
    bool empty() const noexcept { return members_.empty(); }

    bool has_member(const NodeId& id) const;
    const MemberBlock* find_member(const NodeId& id) const;
    const ExternalLink* find_external(const NodeId& id) const;
    bool references(const NodeId& id) const { return find_external(id) != nullptr; }

    std::vector<NodeId> member_ids() const;
    std::vector<NodeId> external_ids() const;

    bool operator==(const CombinedRepr&) const = default;

private:
    struct Unchecked {};
    CombinedRepr(Unchecked, std::vector<MemberBlock> members, Vector mean, Matrix noise_cov,
                 std::vector<ExternalLink> externals)
        : members_(std::move(members)),
          mean_(std::move(mean)),
          noise_cov_(std::move(noise_cov)),
          externals_(std::move(externals)) {}

    friend CombinedRepr lift(const NodeSpec&);
    friend CombinedRepr multiply(const CombinedRepr&, const CombinedRepr&, const Tolerances&);
    friend CombinedRepr integrate_out(const CombinedRepr&, const IdSet&);
    friend CombinedRepr substitute_evidence(const CombinedRepr&, const EvidenceMap&);
    friend CombinedRepr condition(const CombinedRepr&, const IdSet&, const EvidenceMap&, const Tolerances&);
    friend CombinedRepr reorder(const CombinedRepr&, const std::vector<NodeId>&);

    std::vector<MemberBlock> members_;
    Vector mean_;
    Matrix noise_cov_;
    std::vector<ExternalLink> externals_;
};

// Single-member repr copied field for field from the node.
CombinedRepr lift(const NodeSpec& node);

// Node combination. `incoming` may reference members of `upstream` through
// its externals; the reverse is a CombinabilityError. The result stacks
// upstream over incoming:
//
//     mean = [m_u; T m_u + m_i]
//     cov  = [[Q_u, Q_u T'], [T Q_u, T Q_u T' + Q_i]]
//
// where T collects incoming's links into upstream members. Upstream externals
// propagate through T; external links with the same id are summed.
CombinedRepr multiply(const CombinedRepr& upstream, const CombinedRepr& incoming,
                      const Tolerances& tol = default_tolerances());

// Marginalize members away by deleting their slots. Throws UnknownMember.
CombinedRepr integrate_out(const CombinedRepr& repr, const IdSet& victims);

// Fix external variables to observed values: mean += K_e e*, link removed,
// noise_cov untouched. Throws UnknownExternal / ShapeError.
CombinedRepr substitute_evidence(const CombinedRepr& repr, const EvidenceMap& values);

// Gaussian conditioning of a fully resolved repr (no externals) on member
// blocks `on`. Blocks with a value in `values` are fixed; blocks without one
// become symbolic externals of the result. Throws ExternalsPresent,
// UnknownMember, ShapeError, DegenerateEvidence.
CombinedRepr condition(const CombinedRepr& repr, const IdSet& on, const EvidenceMap& values = {},
                       const Tolerances& tol = default_tolerances());

// Same distribution with members permuted into `order` (a permutation of the
// member ids) and externals sorted by id.
CombinedRepr reorder(const CombinedRepr& repr, const std::vector<NodeId>& order);

// Mean/covariance sub-blocks for a subset of members, in the given order.
std::vector<std::size_t> scalar_indices(const CombinedRepr& repr, const std::vector<NodeId>& ids);

}  // namespace lgspi
