#pragma once

#include <optional>
#include <vector>

#include "weilfq/cyclo.hpp"
#include "weilfq/errors.hpp"
#include "weilfq/lag.hpp"
#include "weilfq/rng.hpp"
#include "weilfq/symp.hpp"

namespace weilfq {

/**
 * The quadratic form behind a geometric Gauss sum: on the domain
 * L n (L' + L''), each zeta splits as zeta' + zeta'' with zeta' in L',
 * zeta'' in L'', and Q(zeta) = A(zeta', zeta''). The value does not depend
 * on the split (any two splits differ by an element of L' n L'', which
 * pairs to zero with both components); eval_with_offset exposes alternate
 * splits so tests can exercise exactly that.
 */
class QuadFormOnSubspace {
public:
    QuadFormOnSubspace(const SympSpace& space, const Lagrangian& l, const Lagrangian& lp,
                       const Lagrangian& lpp)
        : space_(&space), bp_(lp.basis()), bpp_(lpp.basis()),
          stacked_(FqMatrix::vstack(lp.basis(), lpp.basis())),
          domain_(intersect_row_spaces(l.basis(), sum_row_spaces(lp.basis(), lpp.basis()))),
          overlap_(intersect_row_spaces(lp.basis(), lpp.basis())) {}

    const FqMatrix& domain() const { return domain_; }
    const FqMatrix& overlap() const { return overlap_; }

    FieldElement eval(const FqMatrix& zeta) const {
        FqMatrix zp = component_prime(zeta);
        return form(*space_, zp, zeta - zp);
    }

    /// Same value computed from the split shifted by `delta` in L' n L''.
    FieldElement eval_with_offset(const FqMatrix& zeta, const FqMatrix& delta) const {
        FqMatrix zp = component_prime(zeta) + delta;
        return form(*space_, zp, zeta - zp);
    }

private:
    const SympSpace* space_;
    FqMatrix bp_, bpp_, stacked_, domain_, overlap_;

    FqMatrix component_prime(const FqMatrix& zeta) const {
        auto sol = stacked_.solve_left(zeta);
        if (!sol)
            throw InternalInconsistency("QuadFormOnSubspace: domain vector outside L' + L''");
        FqMatrix coeffs = sol->block(0, 0, 1, bp_.rows());
        return coeffs * bp_;
    }
};

/**
 * Geometric Gauss sum S_L(L', L'') = sum over zeta in L n (L' + L'') of
 * psi(A(zeta', zeta'')). Exact in Z[zeta_p].
 */
inline CycInt geometric_gauss(const SympSpace& space, const PsiChar& psi, const Lagrangian& l,
                              const Lagrangian& lp, const Lagrangian& lpp) {
    QuadFormOnSubspace quad(space, l, lp, lpp);
    RowSpaceRange range(quad.domain());
    CycInt s(psi.p());
    for (long long i = 0; i < range.size(); ++i)
        s = s + psi(quad.eval(range.vector_at(i)));
    return s;
}

/**
 * Classical Gauss sum S(Q) = sum over x in F_q^r of psi(x s x^T) for a
 * symmetric matrix s. The empty form (r = 0) sums over the single empty
 * vector and equals 1.
 */
inline CycInt classical_gauss(const PsiChar& psi, const FqMatrix& s) {
    if (s.rows() != s.cols()) throw DimensionMismatch("classical_gauss: matrix not square");
    if (s != s.transpose()) throw NotSymmetric("classical_gauss: matrix not symmetric");
    const FieldSpec* k = psi.field();
    const int r = s.rows();
    long long count = 1;
    for (int i = 0; i < r; ++i) count *= k->q;
    CycInt out(psi.p());
    for (long long idx = 0; idx < count; ++idx) {
        FqMatrix x(k, 1, r);
        long long t = idx;
        for (int j = 0; j < r; ++j) {
            x.at(0, j) = FieldElement::from_index(k, t % k->q);
            t /= k->q;
        }
        FqMatrix v = x * s * x.transpose();
        out = out + psi(v.at(0, 0));
    }
    return out;
}

/// S_{L_{a,b}}(<P>, <Q>) computed on the coordinate side as S(a b^T).
inline CycInt gauss_via_coords(const SympSpace& space, const PsiChar& psi, const LagCoords& c) {
    (void)space;
    return classical_gauss(psi, c.a * c.b.transpose());
}

/**
 * Geometric Gauss sum through the quotient reduction: with U = L' + L''
 * and R = L' n L'', the subspace Ltilde = L n (L' + L'') + R is again
 * lagrangian in W, Ltilde/R is lagrangian in U/R, and
 *
 *   S^W_L(L', L'') = |L n L' n L''| * S^{U/R}_{Ltilde/R}(L'/R, L''/R).
 *
 * Throws InternalInconsistency if Ltilde fails the lagrangian check, which
 * would falsify the reduction identity itself.
 */
inline CycInt gauss_via_reduction(const SympSpace& space, const PsiChar& psi, const Lagrangian& l,
                                  const Lagrangian& lp, const Lagrangian& lpp) {
    const FieldSpec* k = space.spec();
    FqMatrix sum = sum_row_spaces(lp.basis(), lpp.basis());
    FqMatrix overlap = intersect_row_spaces(lp.basis(), lpp.basis());
    FqMatrix core = intersect_row_spaces(l.basis(), sum);
    FqMatrix ltilde_basis = sum_row_spaces(core, overlap);

    std::optional<Lagrangian> ltilde;
    try {
        ltilde.emplace(space, ltilde_basis);
    } catch (const Error&) {
        throw InternalInconsistency("gauss_via_reduction: Ltilde is not lagrangian");
    }

    SympQuotient quo = quotient_symplectic(space, sum, overlap);

    auto push = [&](const FqMatrix& basis) {
        FqMatrix img = quo.project(basis).row_space();
        return Lagrangian(quo.space, img);
    };
    Lagrangian lt_bar = push(ltilde->basis());
    Lagrangian lp_bar = push(lp.basis());
    Lagrangian lpp_bar = push(lpp.basis());

    CycInt reduced = geometric_gauss(quo.space, psi, lt_bar, lp_bar, lpp_bar);

    FqMatrix lmeet = intersect_row_spaces(l.basis(), overlap);  // L n (L' n L'')
    long long factor = 1;
    for (int i = 0; i < lmeet.rows(); ++i) factor *= k->q;
    return reduced * factor;
}

/**
 * Exponent k with |S_L(L', L'')|^2 = q^k:
 * k = dim(L n L'') + dim(L' n L) + m - dim(L'' n L').
 */
inline int modulus_exponent(const SympSpace& space, const Lagrangian& l, const Lagrangian& lp,
                            const Lagrangian& lpp) {
    return dim_meet(l, lpp) + dim_meet(lp, l) + space.m - dim_meet(lpp, lp);
}

}  // namespace weilfq
