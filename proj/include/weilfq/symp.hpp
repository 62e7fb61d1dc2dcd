#pragma once

#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "weilfq/errors.hpp"
#include "weilfq/fqmat.hpp"
#include "weilfq/galois.hpp"

namespace weilfq {

/**
 * Nondegenerate symplectic space (W, A) of dimension 2m over F_q, in the
 * standard basis p_1..p_m, q_1..q_m with A(p_i, q_j) = delta_ij and both
 * frames isotropic. Immutable; elements of W are row vectors of length 2m.
 */
struct SympSpace {
    std::shared_ptr<const FieldSpec> field;
    int m = 0;
    FqMatrix gram;  // J = [[0, I], [-I, 0]]

    SympSpace(std::shared_ptr<const FieldSpec> field_, int m_)
        : field(std::move(field_)), m(m_), gram(field.get(), 2 * m_, 2 * m_) {
        const FieldSpec* k = field.get();
        for (int i = 0; i < m; ++i) {
            gram.at(i, m + i) = FieldElement(k, 1);
            gram.at(m + i, i) = FieldElement(k, -1);
        }
    }

    int dim() const { return 2 * m; }
    const FieldSpec* spec() const { return field.get(); }

    FqMatrix zero_vector() const { return FqMatrix(spec(), 1, dim()); }

    FqMatrix basis_vector(int i) const {
        FqMatrix v(spec(), 1, dim());
        v.at(0, i) = FieldElement(spec(), 1);
        return v;
    }

    /// Rows of the isotropic frame P = (p_1, ..., p_m).
    FqMatrix frame_p() const {
        FqMatrix f(spec(), m, dim());
        for (int i = 0; i < m; ++i) f.at(i, i) = FieldElement(spec(), 1);
        return f;
    }

    /// Rows of the isotropic frame Q = (q_1, ..., q_m).
    FqMatrix frame_q() const {
        FqMatrix f(spec(), m, dim());
        for (int i = 0; i < m; ++i) f.at(i, m + i) = FieldElement(spec(), 1);
        return f;
    }
};

/// A(u, v) = u J v^T for row vectors u, v.
inline FieldElement form(const SympSpace& space, const FqMatrix& u, const FqMatrix& v) {
    if (u.cols() != space.dim() || v.cols() != space.dim())
        throw DimensionMismatch("form: vectors must have length 2m");
    FqMatrix r = (u * space.gram) * v.transpose();
    return r.at(0, 0);
}

/**
 * Element of Sp(A), stored as the matrix M of the abstract left action
 * g(x) = x * M^T on row vectors. With that convention the membership test
 * is the textbook M^T J M = J, products compose as plain matrix products,
 * and act(g*h, x) = act(g, act(h, x)).
 */
class SpElement {
public:
    SpElement() = default;

    SpElement(const SympSpace& space, FqMatrix mat)
        : mat_(std::move(mat)), mat_t_(mat_.transpose()), inv_t_(mat_.inverse().transpose()) {
        (void)space;
    }

    static SpElement identity(const SympSpace& space) {
        return SpElement(space, FqMatrix::identity(space.spec(), space.dim()));
    }

    const FqMatrix& matrix() const { return mat_; }

    SpElement operator*(const SpElement& o) const {
        SpElement r;
        r.mat_ = mat_ * o.mat_;
        r.mat_t_ = o.mat_t_ * mat_t_;   // (MN)^T  = N^T M^T
        r.inv_t_ = inv_t_ * o.inv_t_;   // (MN)^-T = M^-T N^-T
        return r;
    }

    SpElement inverse() const {
        SpElement r;
        r.mat_ = inv_t_.transpose();
        r.mat_t_ = inv_t_;
        r.inv_t_ = mat_t_;
        return r;
    }

    /// g(x) for a row vector (or a stack of row vectors) x.
    FqMatrix apply(const FqMatrix& x) const { return x * mat_t_; }

    FqMatrix apply_inverse(const FqMatrix& x) const { return x * inv_t_; }

    bool operator==(const SpElement& o) const { return mat_ == o.mat_; }

    std::string serialize() const { return mat_.serialize(); }

private:
    FqMatrix mat_;
    FqMatrix mat_t_;   // cached transpose (the row-action matrix)
    FqMatrix inv_t_;   // cached transpose of the inverse
};

inline bool is_symplectic(const SympSpace& space, const FqMatrix& g) {
    if (g.rows() != space.dim() || g.cols() != space.dim()) return false;
    return g.transpose() * space.gram * g == space.gram;
}

inline bool is_symplectic(const SympSpace& space, const SpElement& g) {
    return is_symplectic(space, g.matrix());
}

/**
 * Symplectic transvection x -> x + lambda * A(x, v) * v. Always lands in
 * Sp(A); lambda = 0 or v = 0 degenerate to the identity.
 */
inline SpElement transvection(const SympSpace& space, const FqMatrix& v, const FieldElement& lambda) {
    // Column matrix of the map: M = I + lambda * v^T (v J^T).
    FqMatrix vjt = v * space.gram.transpose();      // 1 x 2m
    FqMatrix outer = v.transpose() * vjt;           // 2m x 2m
    FqMatrix mat = FqMatrix::identity(space.spec(), space.dim()) + outer.scaled(lambda);
    return SpElement(space, mat);
}

/// All transvection generators T_v(1), one v per projective direction.
inline std::vector<SpElement> transvection_generators(const SympSpace& space) {
    std::vector<SpElement> gens;
    const FieldSpec* k = space.spec();
    long long total = 1;
    for (int i = 0; i < space.dim(); ++i) total *= k->q;
    for (long long idx = 1; idx < total; ++idx) {
        FqMatrix v(k, 1, space.dim());
        long long t = idx;
        for (int j = 0; j < space.dim(); ++j) {
            v.at(0, j) = FieldElement::from_index(k, t % k->q);
            t /= k->q;
        }
        // Keep one representative per line: first nonzero coordinate = 1.
        FieldElement lead(k);
        for (int j = 0; j < space.dim(); ++j)
            if (!v.at(0, j).is_zero()) { lead = v.at(0, j); break; }
        if (!(lead == FieldElement(k, 1))) continue;
        gens.push_back(transvection(space, v, FieldElement(k, 1)));
    }
    return gens;
}

/**
 * BFS closure of a generating set under multiplication. Returns the full
 * group when its order is at most cap, otherwise throws CapExceeded.
 */
inline std::vector<SpElement> group_closure(const SympSpace& space,
                                            const std::vector<SpElement>& generators,
                                            long long cap) {
    std::vector<SpElement> elems;
    std::unordered_set<std::string> seen;
    SpElement id = SpElement::identity(space);
    elems.push_back(id);
    seen.insert(id.serialize());
    std::size_t head = 0;
    while (head < elems.size()) {
        SpElement cur = elems[head++];
        for (const SpElement& g : generators) {
            SpElement nxt = cur * g;
            std::string key = nxt.serialize();
            if (seen.insert(std::move(key)).second) {
                if (static_cast<long long>(elems.size()) + 1 > cap)
                    throw CapExceeded("group_closure: order exceeds cap " + std::to_string(cap));
                elems.push_back(std::move(nxt));
            }
        }
    }
    return elems;
}

/// q^(m^2) * prod_{i=1..m} (q^(2i) - 1).
inline long long sp_group_order(long long q, int m) {
    long long order = 1;
    for (int i = 0; i < m * m; ++i) order *= q;
    long long q2i = 1;
    for (int i = 1; i <= m; ++i) {
        q2i *= q * q;
        order *= (q2i - 1);
    }
    return order;
}

/**
 * Quotient of a coisotropic configuration: U a subspace, R = rad(A|_U).
 * The result is a standard-basis symplectic space of dimension
 * dim U - dim R together with mutually consistent projection/section maps
 * (projection . section = identity).
 */
struct SympQuotient {
    SympSpace space;                 // the quotient, in standard coordinates
    FqMatrix section;                // (2k x 2m): row i = image of quotient basis vector i in W
    FqMatrix projection_full;        // (2m x 2k): w |-> w * projection_full, valid for w in U

    FqMatrix project(const FqMatrix& w) const { return w * projection_full; }
    FqMatrix lift(const FqMatrix& wbar) const { return wbar * section; }
};

namespace detail {

/**
 * Symplectic Gram-Schmidt: given row vectors `basis` spanning a subspace on
 * which `gram_of` restricts nondegenerately, returns rows t_1..t_2k such
 * that the form matrix becomes the standard J.
 */
inline FqMatrix symplectic_basis(const FieldSpec* k, FqMatrix basis,
                                 const std::function<FieldElement(const FqMatrix&, const FqMatrix&)>& omega) {
    std::vector<FqMatrix> pool;
    for (int i = 0; i < basis.rows(); ++i) pool.push_back(basis.row(i));
    std::vector<FqMatrix> ps, qs;
    while (!pool.empty()) {
        FqMatrix e = pool.front();
        pool.erase(pool.begin());
        if (e.is_zero()) continue;
        int partner = -1;
        for (std::size_t j = 0; j < pool.size(); ++j)
            if (!omega(e, pool[j]).is_zero()) { partner = static_cast<int>(j); break; }
        if (partner < 0)
            throw NotCoisotropicPair("symplectic_basis: restricted form is degenerate");
        FqMatrix fv = pool[static_cast<std::size_t>(partner)];
        pool.erase(pool.begin() + partner);
        fv = fv.scaled(omega(e, fv).inverse());  // now omega(e, fv) = 1
        // Reduce the rest into the orthogonal complement of span(e, fv).
        for (auto& v : pool) {
            FieldElement a = omega(v, fv), b = omega(v, e);
            // v' = v - a e + b fv  has omega(v', e) = omega(v', fv) = 0.
            v = v - e.scaled(a) + fv.scaled(b);
        }
        ps.push_back(e);
        qs.push_back(fv);
    }
    FqMatrix out(k, static_cast<int>(ps.size() + qs.size()), basis.cols());
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (int j = 0; j < basis.cols(); ++j) out.at(static_cast<int>(i), j) = ps[i].at(0, j);
    for (std::size_t i = 0; i < qs.size(); ++i)
        for (int j = 0; j < basis.cols(); ++j)
            out.at(static_cast<int>(ps.size() + i), j) = qs[i].at(0, j);
    return out;
}

}  // namespace detail

inline SympQuotient quotient_symplectic(const SympSpace& space, const FqMatrix& u_basis,
                                        const FqMatrix& r_basis) {
    const FieldSpec* k = space.spec();
    FqMatrix u = u_basis.row_space();
    FqMatrix r = r_basis.row_space();

    // R must be exactly the radical of A restricted to U.
    FqMatrix pairing(k, u.rows(), u.rows());
    for (int i = 0; i < u.rows(); ++i)
        for (int j = 0; j < u.rows(); ++j) pairing.at(i, j) = form(space, u.row(i), u.row(j));
    FqMatrix rad_coords = pairing.kernel_left();
    FqMatrix radical = (rad_coords.rows() > 0 ? (rad_coords * u).row_space() : FqMatrix(k, 0, space.dim()));
    if (radical != r)
        throw NotCoisotropicPair("quotient_symplectic: R is not the radical of the restricted form");

    if ((u.rows() - r.rows()) % 2 != 0)
        throw InternalInconsistency("quotient_symplectic: quotient dimension is odd");
    const int key = (u.rows() - r.rows()) / 2;

    // Complement of R inside U: greedily extend R's row space by rows of U.
    FqMatrix complement(k, 0, space.dim());
    FqMatrix span = r;
    for (int i = 0; i < u.rows() && complement.rows() < 2 * key; ++i) {
        if (span.rows() > 0 && span.row_in_span(u.row(i))) continue;
        complement = (complement.rows() == 0) ? u.row(i) : FqMatrix::vstack(complement, u.row(i));
        span = sum_row_spaces(span, u.row(i));
    }

    auto omega = [&space](const FqMatrix& x, const FqMatrix& y) { return form(space, x, y); };
    FqMatrix section(k, 0, space.dim());
    SympSpace qspace(space.field, key);
    if (key > 0) {
        // The induced form is nondegenerate on any complement of R in U, so
        // Gram-Schmidt directly on the complement yields the section rows.
        section = detail::symplectic_basis(k, complement, omega);
    }

    // Full basis (section rows, then R, then a complement of U in W) for the
    // coordinate projection.
    FqMatrix full = section;
    if (r.rows() > 0) full = (full.rows() == 0) ? r : FqMatrix::vstack(full, r);
    FqMatrix spanw = full.rows() > 0 ? full.row_space() : FqMatrix(k, 0, space.dim());
    for (int i = 0; i < space.dim() && full.rows() < space.dim(); ++i) {
        FqMatrix ei = space.basis_vector(i);
        if (spanw.rows() > 0 && spanw.row_in_span(ei)) continue;
        full = (full.rows() == 0) ? ei : FqMatrix::vstack(full, ei);
        spanw = sum_row_spaces(spanw, ei);
    }
    FqMatrix full_inv = full.inverse();
    // w * full_inv gives coordinates over (section | R | rest); keep the first 2k.
    FqMatrix proj = full_inv.block(0, 0, space.dim(), 2 * key);

    SympQuotient out{std::move(qspace), std::move(section), std::move(proj)};
    return out;
}

}  // namespace weilfq
