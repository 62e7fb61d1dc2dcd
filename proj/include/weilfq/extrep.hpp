#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "weilfq/bundle.hpp"
#include "weilfq/errors.hpp"
#include "weilfq/fqmat.hpp"
#include "weilfq/lag.hpp"
#include "weilfq/linalg.hpp"
#include "weilfq/rng.hpp"
#include "weilfq/symp.hpp"
#include "weilfq/weil.hpp"

namespace weilfq {

/**
 * The symplectic space built from exterior powers of V = F_q^n:
 * degrees 1, 3, ..., n-1 for even n and 1, 2, ..., n-1 for odd n, paired by
 *
 *   A(w, z) = (w ^ z)_n          (n even)
 *   A(w, z) = (w ^ z~)_n         (n odd),  z~ = sum_i (-1)^i z_i,
 *
 * under e_1 ^ ... ^ e_n |-> 1. The wedge-monomial basis is ordered by
 * ascending degree, lexicographic index tuples within a degree; that single
 * ordering choice fixes every sign, and the alternating/nondegeneracy test
 * validates the sign convention rather than hand-chased identities.
 *
 * Alongside the raw wedge coordinates the space carries a symplectic basis
 * (std_basis rows, found by Gram-Schmidt on the wedge Gram matrix), so the
 * lagrangian and fiber machinery applies verbatim in standard coordinates.
 */
class ExtSpace {
public:
    ExtSpace(std::shared_ptr<const FieldSpec> field, int n)
        : field_(std::move(field)), n_(n) {
        if (n < 2) throw Error("ExtSpace: n must be at least 2");
        if (n % 2 == 0) {
            for (int d = 1; d < n; d += 2) degrees_.push_back(d);
        } else {
            for (int d = 1; d < n; ++d) degrees_.push_back(d);
        }
        for (int d : degrees_) {
            degree_offset_.push_back(static_cast<int>(monomials_.size()));
            std::vector<int> idx(static_cast<std::size_t>(d));
            for (int i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = i;
            while (true) {
                monomials_.push_back(idx);
                int pos = d - 1;
                while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - d + pos) --pos;
                if (pos < 0) break;
                ++idx[static_cast<std::size_t>(pos)];
                for (int j = pos + 1; j < d; ++j)
                    idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
            }
        }
        d_total_ = static_cast<int>(monomials_.size());
        if (d_total_ % 2 != 0)
            throw InternalInconsistency("ExtSpace: total dimension is odd");

        const FieldSpec* k = field_.get();
        gram_ = FqMatrix(k, d_total_, d_total_);
        for (int i = 0; i < d_total_; ++i)
            for (int j = 0; j < d_total_; ++j) gram_.at(i, j) = pair_monomials(i, j);

        auto omega = [this](const FqMatrix& x, const FqMatrix& y) {
            FqMatrix r = (x * gram_) * y.transpose();
            return r.at(0, 0);
        };
        std_basis_ = detail::symplectic_basis(k, FqMatrix::identity(k, d_total_), omega);
        std_basis_inv_ = std_basis_.inverse();
    }

    const FieldSpec* spec() const { return field_.get(); }
    std::shared_ptr<const FieldSpec> field_ptr() const { return field_; }
    int n() const { return n_; }
    int dim() const { return d_total_; }
    const std::vector<int>& degrees() const { return degrees_; }
    const FqMatrix& gram() const { return gram_; }
    const FqMatrix& std_basis() const { return std_basis_; }
    const FqMatrix& std_basis_inv() const { return std_basis_inv_; }

    int blocks() const { return static_cast<int>(degrees_.size()); }
    int block_offset(int block) const { return degree_offset_[static_cast<std::size_t>(block)]; }
    int block_size(int block) const {
        const int next = (block + 1 < static_cast<int>(degree_offset_.size()))
                             ? degree_offset_[static_cast<std::size_t>(block + 1)]
                             : d_total_;
        return next - degree_offset_[static_cast<std::size_t>(block)];
    }

    /// 0-based sorted index tuple of the wedge monomial at a global index.
    const std::vector<int>& monomial(int global_index) const {
        return monomials_[static_cast<std::size_t>(global_index)];
    }

    int monomial_index(const std::vector<int>& sorted_indices) const {
        for (int i = 0; i < d_total_; ++i)
            if (monomials_[static_cast<std::size_t>(i)] == sorted_indices) return i;
        throw Error("ExtSpace: monomial not found");
    }

    /// A(w, z) on raw wedge coordinates (length-D rows).
    FieldElement form_ext(const FqMatrix& w, const FqMatrix& z) const {
        if (w.cols() != d_total_ || z.cols() != d_total_)
            throw DimensionMismatch("ExtSpace::form_ext: coordinate length mismatch");
        FqMatrix r = (w * gram_) * z.transpose();
        return r.at(0, 0);
    }

    /// Change of coordinates: standard row coords x <-> ext row vector x * std_basis.
    FqMatrix to_std(const FqMatrix& w) const { return w * std_basis_inv_; }
    FqMatrix to_ext(const FqMatrix& x) const { return x * std_basis_; }

private:
    std::shared_ptr<const FieldSpec> field_;
    int n_;
    int d_total_ = 0;
    std::vector<int> degrees_;
    std::vector<int> degree_offset_;
    std::vector<std::vector<int>> monomials_;
    FqMatrix gram_;
    FqMatrix std_basis_, std_basis_inv_;

    // (e_S ^ e_T)_n with the odd-n dual sign folded in.
    FieldElement pair_monomials(int i, int j) const {
        const FieldSpec* k = field_.get();
        const auto& s = monomials_[static_cast<std::size_t>(i)];
        const auto& t = monomials_[static_cast<std::size_t>(j)];
        if (s.size() + t.size() != static_cast<std::size_t>(n_)) return FieldElement(k);
        std::vector<int> concat = s;
        concat.insert(concat.end(), t.begin(), t.end());
        std::vector<bool> seen(static_cast<std::size_t>(n_), false);
        for (int x : concat) {
            if (seen[static_cast<std::size_t>(x)]) return FieldElement(k);
            seen[static_cast<std::size_t>(x)] = true;
        }
        int inversions = 0;
        for (std::size_t a = 0; a < concat.size(); ++a)
            for (std::size_t b = a + 1; b < concat.size(); ++b)
                if (concat[a] > concat[b]) ++inversions;
        int sign = (inversions % 2 == 0) ? 1 : -1;
        if (n_ % 2 == 1 && static_cast<int>(t.size()) % 2 == 1) sign = -sign;  // z~ dual sign
        return FieldElement(k, sign);
    }
};

/// ext_form on raw wedge coordinates.
inline FieldElement ext_form(const ExtSpace& ext, const FqMatrix& w, const FqMatrix& z) {
    return ext.form_ext(w, z);
}

inline FieldElement fq_determinant(const FqMatrix& g) {
    const FieldSpec* k = g.spec();
    if (g.rows() != g.cols()) throw DimensionMismatch("fq_determinant: not square");
    FqMatrix a = g;
    FieldElement det(k, 1);
    const int n = a.rows();
    for (int c = 0; c < n; ++c) {
        int sel = -1;
        for (int i = c; i < n; ++i)
            if (!a.at(i, c).is_zero()) { sel = i; break; }
        if (sel < 0) return FieldElement(k);
        if (sel != c) {
            for (int j = 0; j < n; ++j) std::swap(a.at(sel, j), a.at(c, j));
            det = -det;
        }
        det = det * a.at(c, c);
        const FieldElement inv = a.at(c, c).inverse();
        for (int i = c + 1; i < n; ++i) {
            if (a.at(i, c).is_zero()) continue;
            const FieldElement f = a.at(i, c) * inv;
            for (int j = c; j < n; ++j) a.at(i, j) = a.at(i, j) - f * a.at(c, j);
        }
    }
    return det;
}

/**
 * Block-diagonal wedge-power action of g on ext coordinates, as a column
 * matrix: block d is (det g[S, T])_{S,T}. Multiplicative by Cauchy-Binet.
 * Requires det g = 1 (NotUnimodular otherwise); unimodularity is what makes
 * the action preserve the top-degree identification and hence the form.
 */
inline FqMatrix ext_matrix_of(const ExtSpace& ext, const FqMatrix& g) {
    const FieldSpec* k = ext.spec();
    const int n = ext.n();
    if (g.rows() != n || g.cols() != n)
        throw DimensionMismatch("ext_matrix_of: g must be n x n");
    if (!(fq_determinant(g) == FieldElement(k, 1)))
        throw NotUnimodular("ext_matrix_of: det(g) != 1");

    FqMatrix e(k, ext.dim(), ext.dim());
    for (int b = 0; b < ext.blocks(); ++b) {
        const int off = ext.block_offset(b);
        const int sz = ext.block_size(b);
        for (int c = 0; c < sz; ++c)
            for (int r = 0; r < sz; ++r) {
                const auto& rows = ext.monomial(off + r);
                const auto& cols = ext.monomial(off + c);
                const int d = static_cast<int>(rows.size());
                FqMatrix sub(k, d, d);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        sub.at(i, j) = g.at(rows[static_cast<std::size_t>(i)],
                                            cols[static_cast<std::size_t>(j)]);
                e.at(off + r, off + c) = fq_determinant(sub);
            }
    }
    return e;
}

/// The embedded element acting on standard coordinates of `std_space`.
inline SpElement embed_sl(const ExtSpace& ext, const SympSpace& std_space, const FqMatrix& g) {
    FqMatrix e = ext_matrix_of(ext, g);
    // Row coords x (std) <-> ext row w = x * B.  x' = x * B E^T B^{-1}, and
    // SpElement wants the column matrix M with x' = x M^T.
    FqMatrix mt = ext.std_basis() * e.transpose() * ext.std_basis_inv();
    return SpElement(std_space, mt.transpose());
}

/// Elementary SL(n, q) generators E_ij(b), b ranging over an F_p-basis of F_q.
inline std::vector<FqMatrix> sl_generators(const FieldSpec* k, int n) {
    std::vector<FqMatrix> gens;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            for (int b = 0; b < k->f; ++b) {
                std::vector<int> coeffs(static_cast<std::size_t>(k->f), 0);
                coeffs[static_cast<std::size_t>(b)] = 1;
                FqMatrix e = FqMatrix::identity(k, n);
                e.at(i, j) = FieldElement::from_coeffs(k, coeffs);
                gens.push_back(e);
            }
        }
    return gens;
}

/**
 * The restricted representation: the Weil representation of the standard-
 * coordinate image of the exterior space, precomposed with the SL(n)
 * embedding. Owns the symplectic space the WeilRep points into.
 */
struct ExtRestriction {
    ExtSpace ext;
    std::unique_ptr<SympSpace> space;
    std::unique_ptr<WeilRep> rep;
    std::vector<FqMatrix> sl_gens;         // n x n generators of SL(n, q)
    std::vector<SpElement> embedded_gens;  // their images in Sp(D)

    ExtRestriction(std::shared_ptr<const FieldSpec> field, int n, const PsiChar& psi)
        : ext(field, n) {
        space = std::make_unique<SympSpace>(field, ext.dim() / 2);
        rep = std::make_unique<WeilRep>(*space, psi,
                                        Lagrangian(*space, space->frame_q()));
        sl_gens = sl_generators(field.get(), n);
        for (const auto& g : sl_gens) embedded_gens.push_back(embed_sl(ext, *space, g));
    }

    long long fiber_dim() const {
        long long f = 1;
        for (int i = 0; i < ext.dim() / 2; ++i) f *= ext.spec()->q;
        return f;
    }

    const ScaledMatrix& rho_embedded(const FqMatrix& g) const {
        return rep->rho(embed_sl(ext, *space, g));
    }
};

/**
 * Symplectic centralizer of the embedded SL(n) image, and the intertwiners
 * it induces. The commuting algebra { x : x Lambda(g) = Lambda(g) x } is
 * solved block-pair by block-pair over F_q (the wedge action is block
 * diagonal, so the Sylvester system decouples); Sp-elements inside it are
 * found by brute force over the algebra when q^dim fits under `cap`, then
 * transported to intertwiners Phi = gamma_{L0, phi L0} . tau_phi.
 */
struct Intertwiner {
    FqMatrix phi_ext;     // column matrix on wedge coordinates
    SpElement phi_std;    // the same map on standard coordinates
    ScaledMatrix op;      // Phi acting on the fiber
};

struct CentralizerResult {
    std::vector<FqMatrix> algebra_basis;  // basis of the commuting algebra (ext coords)
    std::vector<Intertwiner> intertwiners;
    bool complete = true;  // false when sampling replaced full enumeration
};

inline CentralizerResult centralizer_intertwiners(const ExtRestriction& r, long long cap = 20000,
                                                  std::uint64_t seed = 1) {
    const FieldSpec* k = r.ext.spec();
    const int nb = r.ext.blocks();
    const int dim = r.ext.dim();
    CentralizerResult out;

    // Wedge matrices of the generators once.
    std::vector<FqMatrix> gen_ext;
    for (const auto& g : r.sl_gens) gen_ext.push_back(ext_matrix_of(r.ext, g));

    // Solve each block cell X_{ij}: X E_j = E_i X.
    for (int bi = 0; bi < nb; ++bi)
        for (int bj = 0; bj < nb; ++bj) {
            const int ri = r.ext.block_size(bi), rj = r.ext.block_size(bj);
            const int oi = r.ext.block_offset(bi), oj = r.ext.block_offset(bj);
            const int unknowns = ri * rj;
            // Constraint columns: one per (generator, entry (a, b)).
            FqMatrix cols(k, unknowns, static_cast<int>(gen_ext.size()) * unknowns);
            int colbase = 0;
            for (const auto& e : gen_ext) {
                for (int a = 0; a < ri; ++a)
                    for (int b = 0; b < rj; ++b) {
                        const int col = colbase + a * rj + b;
                        for (int c = 0; c < rj; ++c)
                            cols.at(a * rj + c, col) = cols.at(a * rj + c, col) + e.at(oj + c, oj + b);
                        for (int c = 0; c < ri; ++c)
                            cols.at(c * rj + b, col) = cols.at(c * rj + b, col) - e.at(oi + a, oi + c);
                    }
                colbase += unknowns;
            }
            FqMatrix sols = cols.kernel_left();
            for (int s = 0; s < sols.rows(); ++s) {
                FqMatrix basis_elem(k, dim, dim);
                for (int a = 0; a < ri; ++a)
                    for (int b = 0; b < rj; ++b)
                        basis_elem.at(oi + a, oj + b) = sols.at(s, a * rj + b);
                out.algebra_basis.push_back(std::move(basis_elem));
            }
        }

    // Enumerate (or sample) the algebra, keeping symplectic units.
    const int adim = static_cast<int>(out.algebra_basis.size());
    long long total = 1;
    bool overflow = false;
    for (int i = 0; i < adim; ++i) {
        total *= k->q;
        if (total > cap) { overflow = true; break; }
    }
    Rng rng(seed);
    const long long n_try = overflow ? cap : total;
    out.complete = !overflow;

    for (long long it = 0; it < n_try; ++it) {
        FqMatrix x(k, dim, dim);
        long long t = it;
        for (int i = 0; i < adim; ++i) {
            long long ci = overflow ? static_cast<long long>(rng.below(static_cast<std::uint64_t>(k->q)))
                                    : t % k->q;
            t /= k->q;
            if (ci == 0) continue;
            FieldElement c = FieldElement::from_index(k, ci);
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b)
                    x.at(a, b) = x.at(a, b) + c * out.algebra_basis[static_cast<std::size_t>(i)].at(a, b);
        }
        // Symplectic for the wedge form: X^T G X = G (column matrix).
        if (!(x.transpose() * r.ext.gram() * x == r.ext.gram())) continue;
        FqMatrix mt = r.ext.std_basis() * x.transpose() * r.ext.std_basis_inv();
        Intertwiner iw{x, SpElement(*r.space, mt.transpose()), ScaledMatrix()};
        iw.op = r.rep->rho(iw.phi_std);
        out.intertwiners.push_back(std::move(iw));
    }
    return out;
}

/// Checks Phi rho(h) = lambda rho(h) Phi with |lambda| = 1, numerically.
inline bool intertwines_up_to_unit(const WeilRep& rep, const ScaledMatrix& phi,
                                   const SpElement& h, double tol = 1e-9) {
    CMat a = CMat::from_scaled(phi) * rep.rho_complex(h);
    CMat b = rep.rho_complex(h) * CMat::from_scaled(phi);
    int bi = 0, bj = 0;
    double best = -1.0;
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j)
            if (std::abs(b.at(i, j)) > best) { best = std::abs(b.at(i, j)); bi = i; bj = j; }
    if (best <= tol) return false;
    Cx lambda = a.at(bi, bj) / b.at(bi, bj);
    if (std::abs(std::abs(lambda) - 1.0) > tol) return false;
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j)
            if (std::abs(a.at(i, j) - lambda * b.at(i, j)) > tol) return false;
    return true;
}

struct SlReport {
    int n = 0;
    long long q = 0;
    int dim_w = 0;           // D
    long long fiber_dim = 0;  // q^(D/2)
    int commutant_dim = 0;
    int span_dim = 0;
    double ratio = 0.0;
    int intertwiner_count = 0;
    bool intertwiners_complete = true;
    bool phi_commutation_ok = true;
    bool cocycle_trivial_on_h = true;  // over the sampled pairs below
    int cocycle_pairs_checked = 0;
};

/**
 * End-to-end commutant report for SL(n, q) acting through the exterior
 * space. `sample_checks` bounds the number of generators used in the
 * per-intertwiner commutation checks and the number of cocycle pairs
 * sampled on H x H; the commutant and span dimensions are always computed.
 * The span/commutant ratio is reported, never asserted.
 */
inline SlReport commutant_report(const ExtRestriction& r, int sample_checks = 0,
                                 double tol = 1e-7) {
    SlReport rep;
    rep.n = r.ext.n();
    rep.q = r.ext.spec()->q;
    rep.dim_w = r.ext.dim();
    rep.fiber_dim = r.fiber_dim();

    rep.commutant_dim = commutant_dim(*r.rep, r.embedded_gens, tol);

    CentralizerResult cent = centralizer_intertwiners(r);
    rep.intertwiner_count = static_cast<int>(cent.intertwiners.size());
    rep.intertwiners_complete = cent.complete;

    std::vector<CMat> phis;
    for (const auto& iw : cent.intertwiners) phis.push_back(CMat::from_scaled(iw.op));
    rep.span_dim = span_rank(phis, tol);
    rep.ratio = rep.commutant_dim > 0
                    ? static_cast<double>(rep.span_dim) / static_cast<double>(rep.commutant_dim)
                    : 0.0;

    const int gen_count = static_cast<int>(r.embedded_gens.size());
    const int use = (sample_checks > 0 && sample_checks < gen_count) ? sample_checks : gen_count;
    for (const auto& iw : cent.intertwiners)
        for (int gi = 0; gi < use; ++gi)
            if (!intertwines_up_to_unit(*r.rep, iw.op, r.embedded_gens[static_cast<std::size_t>(gi)]))
                rep.phi_commutation_ok = false;

    // Is the restricted cocycle trivial on the sampled pairs?
    Rng rng(2024);
    const int pairs = (sample_checks > 0) ? sample_checks : 20;
    for (int it = 0; it < pairs; ++it) {
        SpElement g = r.embedded_gens[rng.below(r.embedded_gens.size())];
        SpElement h = r.embedded_gens[rng.below(r.embedded_gens.size())];
        for (int reps = 0; reps < 3; ++reps) {
            g = g * r.embedded_gens[rng.below(r.embedded_gens.size())];
            h = h * r.embedded_gens[rng.below(r.embedded_gens.size())];
        }
        CocycleValue c = cocycle(*r.rep, g, h);
        ++rep.cocycle_pairs_checked;
        if (std::abs(c.c_operator - Cx(1.0, 0.0)) > 1e-9) rep.cocycle_trivial_on_h = false;
    }
    return rep;
}

}  // namespace weilfq
