#pragma once

#include <complex>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "weilfq/bundle.hpp"
#include "weilfq/cyclo.hpp"
#include "weilfq/errors.hpp"
#include "weilfq/gauss.hpp"
#include "weilfq/lag.hpp"
#include "weilfq/linalg.hpp"
#include "weilfq/rng.hpp"
#include "weilfq/symp.hpp"

namespace weilfq {

/**
 * The projective Weil representation attached to a base point L0:
 * rho(g) = gamma_{L0, gL0} . tau_g on the fiber E_{L0}. Kept projective on
 * purpose -- the cocycle is the object of interest, not a nuisance to
 * normalize away.
 *
 * The per-element cache is filled idempotently (a key always maps to the
 * identical matrix), so concurrent duplicate fills would be benign.
 */
class WeilRep {
public:
    WeilRep(const SympSpace& space, PsiChar psi, Lagrangian base)
        : space_(&space), psi_(std::move(psi)), l0_(std::move(base)), fiber0_(space, l0_) {}

    static WeilRep standard(const SympSpace& space, const PsiChar& psi) {
        return WeilRep(space, psi, Lagrangian(space, space.frame_q()));
    }

    const SympSpace& space() const { return *space_; }
    const PsiChar& psi() const { return psi_; }
    const Lagrangian& base_point() const { return l0_; }
    int dim() const { return fiber0_.dim(); }

    const ScaledMatrix& rho(const SpElement& g) const {
        std::string key = g.serialize();
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        Lagrangian gl0 = act(*space_, g, l0_);
        Fiber target(*space_, gl0);
        ScaledMatrix tau = tau_matrix(*space_, psi_, g, fiber0_, target);
        ScaledMatrix gamma = gamma_matrix(*space_, psi_, l0_, gl0);
        ScaledMatrix r = scaled_mul(gamma, tau);
        return cache_.emplace(std::move(key), std::move(r)).first->second;
    }

    CMat rho_complex(const SpElement& g) const { return CMat::from_scaled(rho(g)); }

    /// Trace of rho(g) in the complex embedding.
    Cx character(const SpElement& g) const {
        const ScaledMatrix& r = rho(g);
        Cx t = 0.0;
        for (int i = 0; i < r.rows(); ++i) t += r.embed(i, i);
        return t;
    }

    /// Exact unitarity: value(rho) value(rho)^dagger = Id.
    bool rho_unitary_exact(const SpElement& g) const {
        const ScaledMatrix& r = rho(g);
        ScaledMatrix prod = scaled_mul(r, r.conj_transpose());
        return scaled_eq_exact(prod, ScaledMatrix::identity(r.p(), r.q(), r.rows(), 0));
    }

private:
    const SympSpace* space_;
    PsiChar psi_;
    Lagrangian l0_;
    Fiber fiber0_;
    mutable std::unordered_map<std::string, ScaledMatrix> cache_;
};

/**
 * The cocycle value c(g, h): the unique scalar with
 * rho(g) rho(h) = c(g, h) rho(gh).
 *
 * Geometric form: the connection's composition law gives
 * c(g, h) = unit part of S_{ghL0}(gL0, L0), which by the invariance and
 * symmetry of the triple sum equals unit(S_{L0}(ghL0, gL0)). Note the
 * argument order: the sum S_{L0}(gL0, ghL0) is its complex conjugate (the
 * triple sum conjugates when the last two slots swap), so the orientation
 * matters; gauss_unit_* below keeps both on hand.
 */
struct CocycleValue {
    Cx c_operator;        // extracted from the operator ratio
    CycInt gauss_sum;     // S_{L0}(ghL0, gL0)
    int modulus_exp = 0;  // k with |S|^2 = q^k
    bool exact = false;   // operator identity verified exactly (parity permitting)
    Cx gauss_unit() const;
    Cx gauss_unit_swapped_order;  // unit(S_{L0}(gL0, ghL0)) = conj of the true cocycle
    long long q = 0;
};

inline Cx CocycleValue::gauss_unit() const {
    return gauss_sum.embed() / std::pow(static_cast<double>(q), 0.5 * modulus_exp);
}

/// The Gauss-phase side of the cocycle alone: S_{L0}(ghL0, gL0) and its
/// modulus exponent. Cheap (no fiber matrices), used where only the scalar
/// is needed, e.g. exhaustive 2-cocycle identity sweeps.
struct GaussCocycle {
    CycInt s;
    int k = 0;
};

inline GaussCocycle gauss_cocycle(const SympSpace& w, const PsiChar& psi, const Lagrangian& l0,
                                  const SpElement& g, const SpElement& h) {
    Lagrangian gl0 = act(w, g, l0);
    Lagrangian ghl0 = act(w, g * h, l0);
    return GaussCocycle{geometric_gauss(w, psi, l0, ghl0, gl0),
                        modulus_exponent(w, l0, ghl0, gl0)};
}

inline CocycleValue cocycle(const WeilRep& rep, const SpElement& g, const SpElement& h,
                            double tol = 1e-9) {
    const SympSpace& w = rep.space();
    const ScaledMatrix& rg = rep.rho(g);
    const ScaledMatrix& rh = rep.rho(h);
    const ScaledMatrix& rgh = rep.rho(g * h);
    ScaledMatrix prod = scaled_mul(rg, rh);

    // Operator-side scalar from the maximum-modulus entry of rho(gh).
    int bi = 0, bj = 0;
    double best = -1.0;
    for (int i = 0; i < rgh.rows(); ++i)
        for (int j = 0; j < rgh.cols(); ++j) {
            double v = std::abs(rgh.embed(i, j));
            if (v > best) { best = v; bi = i; bj = j; }
        }
    if (best <= 0.0) throw InternalInconsistency("cocycle: rho(gh) vanished");
    Cx c_op = prod.embed(bi, bj) / rgh.embed(bi, bj);

    // Full-matrix verification of proportionality.
    for (int i = 0; i < rgh.rows(); ++i)
        for (int j = 0; j < rgh.cols(); ++j)
            if (std::abs(prod.embed(i, j) - c_op * rgh.embed(i, j)) > tol)
                throw NotProportional("cocycle: rho(g)rho(h) is not proportional to rho(gh)");

    CocycleValue out;
    out.c_operator = c_op;
    out.q = w.spec()->q;

    Lagrangian gl0 = act(w, g, rep.base_point());
    Lagrangian ghl0 = act(w, g * h, rep.base_point());
    out.gauss_sum = geometric_gauss(w, rep.psi(), rep.base_point(), ghl0, gl0);
    out.modulus_exp = modulus_exponent(w, rep.base_point(), ghl0, gl0);
    CycInt swapped = geometric_gauss(w, rep.psi(), rep.base_point(), gl0, ghl0);
    out.gauss_unit_swapped_order =
        swapped.embed() / std::pow(static_cast<double>(out.q), 0.5 * out.modulus_exp);

    // Exact identity rho(g) rho(h) = q^{-k/2} S . rho(gh) when parity permits.
    int shift = -out.modulus_exp;
    if (((prod.e() - (rgh.e() + shift)) % 2 + 2) % 2 == 0) {
        out.exact = scaled_eq_exact(prod, scaled_scalar_mul(out.gauss_sum, rgh, shift));
    }
    return out;
}

/**
 * Two-cocycle identity c(g,h) c(gh,k) = c(g,hk) c(h,k), computed on the
 * Gauss-phase side (the operator-vs-Gauss agreement is a separate check).
 * Verified exactly through cross-multiplied Gauss sums when the combined
 * modulus exponents have even parity, numerically at tol otherwise.
 */
inline bool cocycle_identity_check(const WeilRep& rep, const SpElement& g, const SpElement& h,
                                   const SpElement& k, double tol = 1e-9) {
    const SympSpace& w = rep.space();
    const PsiChar& psi = rep.psi();
    const Lagrangian& l0 = rep.base_point();
    GaussCocycle c12 = gauss_cocycle(w, psi, l0, g, h);
    GaussCocycle c12_3 = gauss_cocycle(w, psi, l0, g * h, k);
    GaussCocycle c1_23 = gauss_cocycle(w, psi, l0, g, h * k);
    GaussCocycle c23 = gauss_cocycle(w, psi, l0, h, k);
    int ka = c12.k + c12_3.k;
    int kb = c1_23.k + c23.k;
    CycInt lhs = c12.s * c12_3.s;
    CycInt rhs = c1_23.s * c23.s;
    if ((ka + kb) % 2 == 0) {
        // unit(lhs) = unit(rhs)  <=>  lhs conj(rhs) = q^((ka+kb)/2).
        long long target = 1;
        for (int i = 0; i < (ka + kb) / 2; ++i) target *= w.spec()->q;
        return lhs * rhs.conj() == CycInt(psi.p(), target);
    }
    const double qd = static_cast<double>(w.spec()->q);
    Cx l = lhs.embed() / std::pow(qd, 0.5 * ka);
    Cx r = rhs.embed() / std::pow(qd, 0.5 * kb);
    return std::abs(l - r) <= tol;
}

/// chi(g) for a list of elements, in order.
inline std::vector<Cx> character(const WeilRep& rep, const std::vector<SpElement>& elements) {
    std::vector<Cx> out;
    out.reserve(elements.size());
    for (const auto& g : elements) out.push_back(rep.character(g));
    return out;
}

// ---------------------------------------------------------------------------
// Commutant machinery
// ---------------------------------------------------------------------------

namespace detail_commutant {

/// Stacked Sylvester system rows for T U = U T, vec(T) ordered row-major.
inline CMat sylvester_stack(const std::vector<CMat>& ops) {
    const int n = ops.front().rows();
    const int nn = n * n;
    CMat stack(static_cast<int>(ops.size()) * nn, nn);
    int row0 = 0;
    for (const auto& u : ops) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const int r = row0 + i * n + j;
                for (int b = 0; b < n; ++b) stack.at(r, i * n + b) += u.at(b, j);
                for (int a = 0; a < n; ++a) stack.at(r, a * n + j) -= u.at(i, a);
            }
        row0 += nn;
    }
    return stack;
}

}  // namespace detail_commutant

/**
 * Commutant dimension by the literal stacked linear system: nullspace of
 * { T : T U_j = U_j T }, rank decided at `tol` via singular values.
 * Quadratic in memory (n^2 unknowns), intended for n up to ~16.
 */
inline int commutant_dim_dense(const std::vector<CMat>& ops, double tol = 1e-7) {
    if (ops.empty()) throw Error("commutant_dim_dense: no operators");
    CMat stack = detail_commutant::sylvester_stack(ops);
    RankResult r = rank_nullspace(stack, tol);
    return stack.cols() - r.rank;
}

/**
 * Commutant dimension via a spectral block reduction. A random hermitian
 * element R of the algebra generated by the operators is diagonalized; any
 * commuting T preserves R's eigenspaces, so the Sylvester system restricts
 * exactly to block-diagonal unknowns, shrinking n^2 unknowns to
 * sum of (cluster multiplicities)^2. The reduction is lossless whatever the
 * clustering (coarser clusters only add unknowns), and the reconstructed
 * commutant basis is residual-checked against the original operators.
 */
inline int commutant_dim_blocked(const std::vector<CMat>& ops, double tol = 1e-7,
                                 std::uint64_t seed = 0xC0FFEEULL) {
    if (ops.empty()) throw Error("commutant_dim_blocked: no operators");
    const int n = ops.front().rows();
    Rng rng(seed);

    // Random self-adjoint element of the generated algebra.
    std::vector<CMat> words = ops;
    const std::size_t extra = 2 * ops.size() + 4;
    for (std::size_t i = 0; i < extra; ++i) {
        const CMat& x = words[rng.below(words.size())];
        const CMat& y = ops[rng.below(ops.size())];
        words.push_back(x * y);
    }
    CMat r(n, n);
    for (const auto& wmat : words) {
        Cx coef(0.25 + rng.unit(), 0.25 + rng.unit());
        r = r + wmat.scaled(coef) + wmat.dagger().scaled(std::conj(coef));
    }
    HermEig eig = hermitian_eig(r);

    // Cluster eigenvalues by gaps well above the numerical noise floor.
    double spread = std::max(1.0, std::abs(eig.values.back() - eig.values.front()));
    std::vector<int> cluster_of(static_cast<std::size_t>(n), 0);
    std::vector<int> cluster_size;
    int cur = 0;
    cluster_size.push_back(0);
    for (int i = 0; i < n; ++i) {
        if (i > 0 && eig.values[static_cast<std::size_t>(i)] -
                             eig.values[static_cast<std::size_t>(i - 1)] >
                         1e-6 * spread) {
            ++cur;
            cluster_size.push_back(0);
        }
        cluster_of[static_cast<std::size_t>(i)] = cur;
        ++cluster_size[static_cast<std::size_t>(cur)];
    }
    const int nc = cur + 1;
    std::vector<int> offset(static_cast<std::size_t>(nc), 0);  // first column of each cluster
    for (int c = 1; c < nc; ++c)
        offset[static_cast<std::size_t>(c)] =
            offset[static_cast<std::size_t>(c - 1)] + cluster_size[static_cast<std::size_t>(c - 1)];

    // Unknown layout: t_c is m_c x m_c, flattened cluster by cluster.
    std::vector<int> unknown_base(static_cast<std::size_t>(nc), 0);
    int total_unknowns = 0;
    for (int c = 0; c < nc; ++c) {
        unknown_base[static_cast<std::size_t>(c)] = total_unknowns;
        total_unknowns += cluster_size[static_cast<std::size_t>(c)] * cluster_size[static_cast<std::size_t>(c)];
    }

    // Rotate operators into the eigenbasis.
    std::vector<CMat> b;
    b.reserve(ops.size());
    for (const auto& u : ops) b.push_back(eig.vectors.dagger() * u * eig.vectors);

    // Constraint rows t_{c1} B[c1,c2] - B[c1,c2] t_{c2} = 0, folded into a
    // square factor by batched QR so the full stack never sits in memory.
    const int batch_cap = std::max(2 * total_unknowns, 2048);
    CMat factor(0, 0);
    CMat batch(batch_cap + total_unknowns, total_unknowns);
    int batch_fill = 0;
    if (factor.rows() == 0) factor = CMat(0, total_unknowns);

    auto flush = [&]() {
        if (batch_fill == 0) return;
        CMat stacked(factor.rows() + batch_fill, total_unknowns);
        for (int i = 0; i < factor.rows(); ++i)
            for (int j = 0; j < total_unknowns; ++j) stacked.at(i, j) = factor.at(i, j);
        for (int i = 0; i < batch_fill; ++i)
            for (int j = 0; j < total_unknowns; ++j)
                stacked.at(factor.rows() + i, j) = batch.at(i, j);
        factor = (stacked.rows() > total_unknowns) ? qr_compress(stacked) : stacked;
        batch_fill = 0;
    };

    for (const auto& bu : b) {
        for (int c1 = 0; c1 < nc; ++c1)
            for (int c2 = 0; c2 < nc; ++c2) {
                const int m1 = cluster_size[static_cast<std::size_t>(c1)];
                const int m2 = cluster_size[static_cast<std::size_t>(c2)];
                const int o1 = offset[static_cast<std::size_t>(c1)];
                const int o2 = offset[static_cast<std::size_t>(c2)];
                for (int rr = 0; rr < m1; ++rr)
                    for (int ss = 0; ss < m2; ++ss) {
                        for (int j = 0; j < total_unknowns; ++j) batch.at(batch_fill, j) = 0.0;
                        bool any = false;
                        // sum_x t_{c1}[rr,x] B[o1+x, o2+ss]
                        for (int x = 0; x < m1; ++x) {
                            Cx val = bu.at(o1 + x, o2 + ss);
                            if (std::abs(val) < 1e-14) continue;
                            batch.at(batch_fill, unknown_base[static_cast<std::size_t>(c1)] + rr * m1 + x) += val;
                            any = true;
                        }
                        // - sum_y B[o1+rr, o2+y] t_{c2}[y,ss]
                        for (int y = 0; y < m2; ++y) {
                            Cx val = bu.at(o1 + rr, o2 + y);
                            if (std::abs(val) < 1e-14) continue;
                            batch.at(batch_fill, unknown_base[static_cast<std::size_t>(c2)] + y * m2 + ss) -= val;
                            any = true;
                        }
                        if (!any) continue;
                        if (++batch_fill >= batch_cap) flush();
                    }
            }
    }
    flush();

    RankResult rank = rank_nullspace(factor, tol);
    const int dim = total_unknowns - rank.rank;

    // Residual check: rebuild each nullspace vector as a full matrix and test
    // commutation against the original operators.
    for (int j = 0; j < dim; ++j) {
        CMat t(n, n);
        for (int c = 0; c < nc; ++c) {
            const int mc = cluster_size[static_cast<std::size_t>(c)];
            const int oc = offset[static_cast<std::size_t>(c)];
            for (int rr = 0; rr < mc; ++rr)
                for (int ss = 0; ss < mc; ++ss)
                    t.at(oc + rr, oc + ss) =
                        rank.nullspace.at(unknown_base[static_cast<std::size_t>(c)] + rr * mc + ss, j);
        }
        CMat full = eig.vectors * t * eig.vectors.dagger();
        for (const auto& u : ops) {
            CMat resid = full * u - u * full;
            if (resid.frob_norm() > 1e-6 * std::max(1.0, full.frob_norm() * u.frob_norm()))
                throw RankUnstable("commutant_dim_blocked: reconstructed commutant fails residual check");
        }
    }
    return dim;
}

/**
 * Dimension of { T : T rho(g) = rho(g) T for all generators }. Scalars
 * cancel in the conjugation, so the answer is well defined for the
 * projective representation. Dense route for small fibers, spectral block
 * route above that; both decide rank at `tol` via singular values.
 */
inline int commutant_dim(const WeilRep& rep, const std::vector<SpElement>& generators,
                         double tol = 1e-7) {
    std::vector<CMat> ops;
    ops.reserve(generators.size());
    for (const auto& g : generators) ops.push_back(rep.rho_complex(g));
    if (rep.dim() <= 12) return commutant_dim_dense(ops, tol);
    return commutant_dim_blocked(ops, tol);
}

}  // namespace weilfq
