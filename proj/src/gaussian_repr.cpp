#include "lgspi/gaussian_repr.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "lgspi/errors.hpp"

namespace lgspi {
namespace {

std::vector<MemberBlock> layout(const std::vector<std::pair<NodeId, std::size_t>>& members) {
    std::vector<MemberBlock> out;
    std::size_t offset = 0;
    for (const auto& [id, dim] : members) {
        out.push_back({id, dim, offset});
        offset += dim;
    }
    return out;
}

// Scalar indices of all members except the victims.
std::vector<std::size_t> surviving_indices(const std::vector<MemberBlock>& members, const IdSet& victims,
                                           std::vector<MemberBlock>& kept) {
    std::vector<std::size_t> idx;
    std::size_t offset = 0;
    for (const MemberBlock& b : members) {
        if (victims.contains(b.id)) continue;
        for (std::size_t k = 0; k < b.dim; ++k) idx.push_back(b.offset + k);
        kept.push_back({b.id, b.dim, offset});
        offset += b.dim;
    }
    return idx;
}

}  // namespace

CombinedRepr::CombinedRepr(const std::vector<std::pair<NodeId, std::size_t>>& members, Vector mean,
                           Matrix noise_cov, std::vector<ExternalLink> externals, const Tolerances& tol)
    : members_(layout(members)), mean_(std::move(mean)), noise_cov_(std::move(noise_cov)), externals_(std::move(externals)) {
    std::set<NodeId> seen;
    std::size_t total = 0;
    for (const MemberBlock& b : members_) {
        if (!seen.insert(b.id).second) throw Error(ErrorKind::MemberClash, "member '" + b.id + "' appears twice");
        if (b.dim == 0) throw Error(ErrorKind::ShapeError, "member '" + b.id + "' has dim 0");
        total += b.dim;
    }
    if (mean_.size() != total) throw Error(ErrorKind::ShapeError, "mean length does not match member dims");
    if (noise_cov_.rows() != total || noise_cov_.cols() != total)
        throw Error(ErrorKind::ShapeError, "noise_cov does not match member dims");
    if (asymmetry(noise_cov_) > tol.symmetry) throw Error(ErrorKind::CovarianceError, "noise_cov is not symmetric");
    std::set<NodeId> ext_seen;
    for (const ExternalLink& e : externals_) {
        if (seen.contains(e.id)) throw Error(ErrorKind::MemberClash, "'" + e.id + "' is both member and external");
        if (!ext_seen.insert(e.id).second) throw Error(ErrorKind::MemberClash, "external '" + e.id + "' appears twice");
        if (e.K.rows() != total || e.K.cols() == 0)
            throw Error(ErrorKind::ShapeError, "link to '" + e.id + "' has wrong shape");
    }
}

bool CombinedRepr::has_member(const NodeId& id) const { return find_member(id) != nullptr; }

const MemberBlock* CombinedRepr::find_member(const NodeId& id) const {
    for (const MemberBlock& b : members_)
        if (b.id == id) return &b;
    return nullptr;
}

const ExternalLink* CombinedRepr::find_external(const NodeId& id) const {
    for (const ExternalLink& e : externals_)
        if (e.id == id) return &e;
    return nullptr;
}

std::vector<NodeId> CombinedRepr::member_ids() const {
    std::vector<NodeId> out;
    for (const MemberBlock& b : members_) out.push_back(b.id);
    return out;
}

std::vector<NodeId> CombinedRepr::external_ids() const {
    std::vector<NodeId> out;
    for (const ExternalLink& e : externals_) out.push_back(e.id);
    return out;
}

CombinedRepr lift(const NodeSpec& node) {
    std::vector<ExternalLink> ext;
    for (const ParentLink& p : node.parents) ext.push_back({p.id, p.link});
    return CombinedRepr(CombinedRepr::Unchecked{}, {{node.id, node.dim, 0}}, node.mean, node.noise_cov, std::move(ext));
}

CombinedRepr multiply(const CombinedRepr& up, const CombinedRepr& in, const Tolerances& tol) {
    if (in.empty() && in.externals().empty()) return up;
    if (up.empty() && up.externals().empty()) return in;

    for (const MemberBlock& b : in.members())
        if (up.has_member(b.id)) throw Error(ErrorKind::MemberClash, "member '" + b.id + "' is in both operands");
    for (const ExternalLink& e : up.externals())
        if (in.has_member(e.id))
            throw Error(ErrorKind::CombinabilityError,
                        "upstream references incoming member '" + e.id + "'; multiply order is not combinable");

    const std::size_t nu = up.dim();
    const std::size_t ni = in.dim();
    const std::size_t n = nu + ni;

    // Implicit relation of the incoming block on the upstream block.
    Matrix t(ni, nu);
    for (const ExternalLink& e : in.externals())
        if (const MemberBlock* b = up.find_member(e.id)) t.set_block(0, b->offset, e.K);

    Vector mean(n);
    std::copy(up.mean().begin(), up.mean().end(), mean.begin());
    const Vector t_mu = matvec(t, up.mean());
    for (std::size_t i = 0; i < ni; ++i) mean[nu + i] = t_mu[i] + in.mean()[i];

    const Matrix t_q = matmul(t, up.noise_cov());  // T Q_u
    Matrix lower = matmul_nt(t_q, t);               // T Q_u T'
    Matrix cov(n, n);
    cov.set_block(0, 0, up.noise_cov());
    cov.set_block(nu, 0, t_q);
    cov.set_block(0, nu, t_q.transpose());
    cov.set_block(nu, nu, lower + in.noise_cov());
    // T Q_u T' is symmetric in exact arithmetic only.
    for (std::size_t r = nu; r < n; ++r)
        for (std::size_t c = r + 1; c < n; ++c) cov(r, c) = cov(c, r);

    std::vector<ExternalLink> ext;
    ext.reserve(up.externals().size() + in.externals().size());
    for (const ExternalLink& e : up.externals()) {
        Matrix k(n, e.dim());
        k.set_block(0, 0, e.K);
        k.set_block(nu, 0, matmul(t, e.K));
        ext.push_back({e.id, std::move(k)});
    }
    for (const ExternalLink& e : in.externals()) {
        if (up.has_member(e.id)) continue;
        auto it = std::find_if(ext.begin(), ext.end(), [&](const ExternalLink& x) { return x.id == e.id; });
        if (it != ext.end()) {
            if (it->dim() != e.dim()) throw Error(ErrorKind::ShapeError, "external '" + e.id + "' has two widths");
            it->K.add_block(nu, 0, e.K);
        } else {
            Matrix k(n, e.dim());
            k.set_block(nu, 0, e.K);
            ext.push_back({e.id, std::move(k)});
        }
    }

    std::vector<MemberBlock> members = up.members();
    for (const MemberBlock& b : in.members()) members.push_back({b.id, b.dim, nu + b.offset});

    if (tol.check_psd_on_multiply && !is_psd(cov, tol))
        throw Error(ErrorKind::CovarianceError, "combined noise covariance lost positive semidefiniteness");

    return CombinedRepr(CombinedRepr::Unchecked{}, std::move(members), std::move(mean), std::move(cov),
                        std::move(ext));
}

CombinedRepr integrate_out(const CombinedRepr& repr, const IdSet& victims) {
    if (victims.empty()) return repr;
    for (const NodeId& v : victims)
        if (!repr.has_member(v)) throw Error(ErrorKind::UnknownMember, "cannot integrate non-member '" + v + "'");

    std::vector<MemberBlock> kept;
    const std::vector<std::size_t> idx = surviving_indices(repr.members(), victims, kept);

    std::vector<ExternalLink> ext;
    for (const ExternalLink& e : repr.externals()) ext.push_back({e.id, select_rows(e.K, idx)});
    return CombinedRepr(CombinedRepr::Unchecked{}, std::move(kept), select(repr.mean(), idx),
                        select(repr.noise_cov(), idx, idx), std::move(ext));
}

CombinedRepr substitute_evidence(const CombinedRepr& repr, const EvidenceMap& values) {
    if (values.empty()) return repr;
    for (const auto& [id, v] : values) {
        const ExternalLink* e = repr.find_external(id);
        if (!e) throw Error(ErrorKind::UnknownExternal, "'" + id + "' is not an external of this repr");
        if (v.size() != e->dim())
            throw Error(ErrorKind::ShapeError, "evidence for '" + id + "' has length " + std::to_string(v.size()) +
                                                   ", expected " + std::to_string(e->dim()));
    }
    Vector mean = repr.mean();
    std::vector<ExternalLink> ext;
    for (const ExternalLink& e : repr.externals()) {
        auto it = values.find(e.id);
        if (it == values.end()) {
            ext.push_back(e);
            continue;
        }
        const Vector shift = matvec(e.K, it->second);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += shift[i];
    }
    return CombinedRepr(CombinedRepr::Unchecked{}, repr.members(), std::move(mean), repr.noise_cov(), std::move(ext));
}

CombinedRepr condition(const CombinedRepr& repr, const IdSet& on, const EvidenceMap& values, const Tolerances& tol) {
    if (on.empty()) return repr;
    if (!repr.externals().empty())
        throw Error(ErrorKind::ExternalsPresent, "conditioning requires a repr without external links");
    for (const NodeId& id : on)
        if (!repr.has_member(id)) throw Error(ErrorKind::UnknownMember, "cannot condition on non-member '" + id + "'");
    for (const auto& [id, v] : values) {
        if (!on.contains(id)) throw Error(ErrorKind::UnknownMember, "value given for '" + id + "' which is not conditioned on");
        if (v.size() != repr.find_member(id)->dim)
            throw Error(ErrorKind::ShapeError, "evidence for '" + id + "' has wrong length");
    }

    std::vector<MemberBlock> kept;
    const std::vector<std::size_t> x_idx = surviving_indices(repr.members(), on, kept);
    std::vector<std::size_t> e_idx;
    // (id, dim, offset within the evidence block) in member order
    std::vector<MemberBlock> e_blocks;
    for (const MemberBlock& b : repr.members()) {
        if (!on.contains(b.id)) continue;
        e_blocks.push_back({b.id, b.dim, e_idx.size()});
        for (std::size_t k = 0; k < b.dim; ++k) e_idx.push_back(b.offset + k);
    }

    const Matrix& s = repr.noise_cov();
    const Matrix s_ee = select(s, e_idx, e_idx);
    const Matrix s_ex = select(s, e_idx, x_idx);
    const double scale = std::abs(s_ee.trace());
    if (!(min_eigenvalue(s_ee) > tol.pd_evidence * scale))
        throw Error(ErrorKind::DegenerateEvidence, "evidence covariance block is singular");

    Matrix gain;  // K = S_xe S_ee^-1, x rows by e cols
    try {
        gain = cholesky_solve(cholesky(s_ee), s_ex).transpose();
    } catch (const std::domain_error&) {
        throw Error(ErrorKind::DegenerateEvidence, "evidence covariance block is not positive definite");
    }

    Vector mean = select(repr.mean(), x_idx);
    std::vector<ExternalLink> ext;
    for (const MemberBlock& b : e_blocks) {
        const Matrix k = gain.block(0, b.offset, x_idx.size(), b.dim);
        const Vector mu_e(repr.mean().begin() + static_cast<std::ptrdiff_t>(repr.find_member(b.id)->offset),
                          repr.mean().begin() + static_cast<std::ptrdiff_t>(repr.find_member(b.id)->offset + b.dim));
        auto it = values.find(b.id);
        const Vector shift = it != values.end() ? matvec(k, sub(it->second, mu_e)) : matvec(k, mu_e);
        const double sign = it != values.end() ? 1.0 : -1.0;
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += sign * shift[i];
        if (it == values.end()) ext.push_back({b.id, k});
    }

    Matrix cov = select(s, x_idx, x_idx) - matmul(gain, s_ex);
    for (std::size_t r = 0; r < cov.rows(); ++r)
        for (std::size_t c = r + 1; c < cov.cols(); ++c) cov(r, c) = cov(c, r);

    return CombinedRepr(CombinedRepr::Unchecked{}, std::move(kept), std::move(mean), std::move(cov), std::move(ext));
}

CombinedRepr reorder(const CombinedRepr& repr, const std::vector<NodeId>& order) {
    if (order.size() != repr.members().size())
        throw Error(ErrorKind::UnknownMember, "reorder needs a permutation of the members");
    std::vector<MemberBlock> blocks;
    std::size_t offset = 0;
    for (const NodeId& id : order) {
        const MemberBlock* b = repr.find_member(id);
        if (!b) throw Error(ErrorKind::UnknownMember, "'" + id + "' is not a member");
        blocks.push_back({id, b->dim, offset});
        offset += b->dim;
    }
    const std::vector<std::size_t> idx = scalar_indices(repr, order);
    std::vector<ExternalLink> ext;
    for (const ExternalLink& e : repr.externals()) ext.push_back({e.id, select_rows(e.K, idx)});
    std::sort(ext.begin(), ext.end(), [](const ExternalLink& a, const ExternalLink& b) { return a.id < b.id; });
    return CombinedRepr(CombinedRepr::Unchecked{}, std::move(blocks), select(repr.mean(), idx),
                        select(repr.noise_cov(), idx, idx), std::move(ext));
}

std::vector<std::size_t> scalar_indices(const CombinedRepr& repr, const std::vector<NodeId>& ids) {
    std::vector<std::size_t> idx;
    for (const NodeId& id : ids) {
        const MemberBlock* b = repr.find_member(id);
        if (!b) throw Error(ErrorKind::UnknownMember, "'" + id + "' is not a member");
        for (std::size_t k = 0; k < b->dim; ++k) idx.push_back(b->offset + k);
    }
    return idx;
}

}  // namespace lgspi
