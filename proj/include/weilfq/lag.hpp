#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "weilfq/errors.hpp"
#include "weilfq/fqmat.hpp"
#include "weilfq/symp.hpp"

namespace weilfq {

/**
 * Maximal totally isotropic subspace, held as the RREF of an m x 2m basis
 * matrix. RREF is the canonical representative, so equality and ordering
 * are plain matrix comparisons.
 */
class Lagrangian {
public:
    Lagrangian() = default;

    Lagrangian(const SympSpace& space, const FqMatrix& any_basis) : basis_(any_basis.row_space()) {
        if (basis_.rows() != space.m)
            throw DimensionMismatch("Lagrangian: basis rank must equal m");
        FqMatrix iso = basis_ * space.gram * basis_.transpose();
        if (!iso.is_zero())
            throw Error("Lagrangian: subspace is not totally isotropic");
    }

    const FqMatrix& basis() const { return basis_; }
    int m() const { return basis_.rows(); }

    bool operator==(const Lagrangian& o) const { return basis_ == o.basis_; }
    bool operator!=(const Lagrangian& o) const { return !(*this == o); }

    bool contains(const FqMatrix& v) const { return basis_.row_in_span(v); }

    std::string serialize() const { return basis_.serialize(); }

private:
    FqMatrix basis_;
};

/**
 * Matrix-pair coordinates (a, b): the lagrangian spanned by the rows of
 * a*P + b*Q, i.e. the row space of the m x 2m block [a b]. Valid exactly
 * when [a b] has rank m and a b^T is symmetric. The stored representative
 * keeps [a b] in RREF, which quotients out the left GL(m) ambiguity
 * (a, b) ~ (c a, c b) for invertible c -- invertibility of c is required
 * here even though sources sometimes leave it implicit, since a singular c
 * drops the rank.
 */
struct LagCoords {
    FqMatrix a;
    FqMatrix b;

    bool operator==(const LagCoords& o) const { return a == o.a && b == o.b; }
};

inline Lagrangian from_coords(const SympSpace& space, const FqMatrix& a, const FqMatrix& b) {
    if (a.rows() != space.m || a.cols() != space.m || b.rows() != space.m || b.cols() != space.m)
        throw DimensionMismatch("from_coords: a, b must be m x m");
    FqMatrix ab = FqMatrix::hstack(a, b);
    if (ab.rank() != space.m)
        throw NotCoprime("from_coords: [a b] has rank below m");
    if (a * b.transpose() != b * a.transpose())
        throw NotSymmetric("from_coords: a b^T is not symmetric");
    return Lagrangian(space, ab);
}

inline Lagrangian from_coords(const SympSpace& space, const LagCoords& c) {
    return from_coords(space, c.a, c.b);
}

inline LagCoords to_coords(const SympSpace& space, const Lagrangian& l) {
    LagCoords c{l.basis().block(0, 0, space.m, space.m),
                l.basis().block(0, space.m, space.m, space.m)};
    return c;
}

/// g(L): RREF of the image basis.
inline Lagrangian act(const SympSpace& space, const SpElement& g, const Lagrangian& l) {
    return Lagrangian(space, g.apply(l.basis()));
}

/**
 * Coordinate form of the action: [a b] is right-multiplied by the row
 * action matrix of g and re-canonicalized. Agreement with the direct
 * action (from_coords . act_coords = act . from_coords) is pinned by tests;
 * that agreement is the contract fixing the matrix side.
 */
inline LagCoords act_coords(const SympSpace& space, const SpElement& g, const LagCoords& c) {
    FqMatrix ab = FqMatrix::hstack(c.a, c.b);
    FqMatrix moved = g.apply(ab).row_space();
    return LagCoords{moved.block(0, 0, space.m, space.m),
                     moved.block(0, space.m, space.m, space.m)};
}

struct MeetJoin {
    FqMatrix meet;
    FqMatrix join;
    int dim_meet = 0;
    int dim_join = 0;
};

inline MeetJoin meet_join(const Lagrangian& l1, const Lagrangian& l2) {
    MeetJoin r{intersect_row_spaces(l1.basis(), l2.basis()),
               sum_row_spaces(l1.basis(), l2.basis()), 0, 0};
    r.dim_meet = r.meet.rows();
    r.dim_join = r.join.rows();
    return r;
}

inline int dim_meet(const Lagrangian& l1, const Lagrangian& l2) {
    return intersect_row_spaces(l1.basis(), l2.basis()).rows();
}

/**
 * Complete, duplicate-free census of lagrangians, enumerated through RREF
 * pivot patterns of the Grassmannian of m-subspaces and filtered by total
 * isotropy. Sorted by serialized canonical form, so the order is stable
 * across runs. Count is prod_{i=1..m} (q^i + 1).
 */
inline std::vector<Lagrangian> enumerate_lagrangians(const SympSpace& space) {
    const FieldSpec* k = space.spec();
    const int n = space.dim(), m = space.m;
    std::vector<Lagrangian> out;

    std::vector<int> cols(static_cast<std::size_t>(m));
    // Iterate pivot-column subsets in lexicographic order.
    std::function<void(int, int)> rec = [&](int start, int chosen) {
        if (chosen == m) {
            // Free entries live at (row i, col j) with j > cols[i], j not a pivot.
            std::vector<std::pair<int, int>> free_pos;
            for (int i = 0; i < m; ++i)
                for (int j = cols[static_cast<std::size_t>(i)] + 1; j < n; ++j)
                    if (std::find(cols.begin(), cols.end(), j) == cols.end())
                        free_pos.emplace_back(i, j);
            long long count = 1;
            for (std::size_t t = 0; t < free_pos.size(); ++t) count *= k->q;
            for (long long idx = 0; idx < count; ++idx) {
                FqMatrix basis(k, m, n);
                for (int i = 0; i < m; ++i)
                    basis.at(i, cols[static_cast<std::size_t>(i)]) = FieldElement(k, 1);
                long long t = idx;
                for (const auto& [i, j] : free_pos) {
                    basis.at(i, j) = FieldElement::from_index(k, t % k->q);
                    t /= k->q;
                }
                FqMatrix iso = basis * space.gram * basis.transpose();
                if (iso.is_zero()) out.emplace_back(space, basis);
            }
            return;
        }
        for (int c = start; c <= n - (m - chosen); ++c) {
            cols[static_cast<std::size_t>(chosen)] = c;
            rec(c + 1, chosen + 1);
        }
    };
    rec(0, 0);

    std::sort(out.begin(), out.end(),
              [](const Lagrangian& x, const Lagrangian& y) { return x.serialize() < y.serialize(); });
    return out;
}

inline long long lagrangian_census(long long q, int m) {
    long long n = 1, qi = 1;
    for (int i = 1; i <= m; ++i) {
        qi *= q;
        n *= (qi + 1);
    }
    return n;
}

/// rank of u = (u_1, ..., u_m) as the dimension of the span of its components.
inline int module_rank(const FqMatrix& u) { return u.rank(); }

/// Matrix-valued pairing B(u, v) = (A(u_i, v_j))_{ij} of two m-tuples.
inline FqMatrix module_form(const SympSpace& space, const FqMatrix& u, const FqMatrix& v) {
    FqMatrix r(space.spec(), u.rows(), v.rows());
    for (int i = 0; i < u.rows(); ++i)
        for (int j = 0; j < v.rows(); ++j) r.at(i, j) = form(space, u.row(i), v.row(j));
    return r;
}

}  // namespace weilfq
