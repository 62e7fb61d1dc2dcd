#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "weilfq/errors.hpp"
#include "weilfq/galois.hpp"

namespace weilfq {

/**
 * Dense matrix over F_q with exact row-reduction primitives.
 *
 * Vectors throughout the library are rows (1 x n matrices); subspaces are
 * row spaces, canonicalized by reduced row-echelon form.
 */
class FqMatrix {
public:
    FqMatrix() = default;

    FqMatrix(const FieldSpec* spec, int rows, int cols)
        : spec_(spec), rows_(rows), cols_(cols),
          a_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), FieldElement(spec)) {}

    static FqMatrix identity(const FieldSpec* spec, int n) {
        FqMatrix m(spec, n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = FieldElement(spec, 1);
        return m;
    }

    static FqMatrix row_vector(const FieldSpec* spec, const std::vector<FieldElement>& v) {
        FqMatrix m(spec, 1, static_cast<int>(v.size()));
        for (int j = 0; j < m.cols_; ++j) m.at(0, j) = v[static_cast<std::size_t>(j)];
        return m;
    }

    const FieldSpec* spec() const { return spec_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    FieldElement& at(int i, int j) {
        return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)];
    }
    const FieldElement& at(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)];
    }

    bool operator==(const FqMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) return false;
        for (std::size_t k = 0; k < a_.size(); ++k)
            if (a_[k] != o.a_[k]) return false;
        return true;
    }
    bool operator!=(const FqMatrix& o) const { return !(*this == o); }

    FqMatrix operator*(const FqMatrix& o) const {
        if (cols_ != o.rows_) throw DimensionMismatch("FqMatrix::mul: inner dimensions differ");
        FqMatrix r(spec_, rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const FieldElement& aik = at(i, k);
                if (aik.is_zero()) continue;
                for (int j = 0; j < o.cols_; ++j)
                    r.at(i, j) = r.at(i, j) + aik * o.at(k, j);
            }
        return r;
    }

    FqMatrix operator+(const FqMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("FqMatrix::add: shapes differ");
        FqMatrix r = *this;
        for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = r.a_[k] + o.a_[k];
        return r;
    }

    FqMatrix operator-(const FqMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("FqMatrix::sub: shapes differ");
        FqMatrix r = *this;
        for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = r.a_[k] - o.a_[k];
        return r;
    }

    FqMatrix operator-() const {
        FqMatrix r = *this;
        for (auto& x : r.a_) x = -x;
        return r;
    }

    FqMatrix scaled(const FieldElement& c) const {
        FqMatrix r = *this;
        for (auto& x : r.a_) x = x * c;
        return r;
    }

    FqMatrix transpose() const {
        FqMatrix r(spec_, cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    bool is_zero() const {
        for (const auto& x : a_)
            if (!x.is_zero()) return false;
        return true;
    }

    FqMatrix row(int i) const {
        FqMatrix r(spec_, 1, cols_);
        for (int j = 0; j < cols_; ++j) r.at(0, j) = at(i, j);
        return r;
    }

    std::vector<FieldElement> row_vec(int i) const {
        std::vector<FieldElement> v;
        v.reserve(static_cast<std::size_t>(cols_));
        for (int j = 0; j < cols_; ++j) v.push_back(at(i, j));
        return v;
    }

    static FqMatrix vstack(const FqMatrix& a, const FqMatrix& b) {
        if (a.cols_ != b.cols_) throw DimensionMismatch("FqMatrix::vstack: column counts differ");
        FqMatrix r(a.spec_, a.rows_ + b.rows_, a.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
        for (int i = 0; i < b.rows_; ++i)
            for (int j = 0; j < b.cols_; ++j) r.at(a.rows_ + i, j) = b.at(i, j);
        return r;
    }

    static FqMatrix hstack(const FqMatrix& a, const FqMatrix& b) {
        if (a.rows_ != b.rows_) throw DimensionMismatch("FqMatrix::hstack: row counts differ");
        FqMatrix r(a.spec_, a.rows_, a.cols_ + b.cols_);
        for (int i = 0; i < a.rows_; ++i) {
            for (int j = 0; j < a.cols_; ++j) r.at(i, j) = a.at(i, j);
            for (int j = 0; j < b.cols_; ++j) r.at(i, a.cols_ + j) = b.at(i, j);
        }
        return r;
    }

    FqMatrix block(int r0, int c0, int nr, int nc) const {
        FqMatrix r(spec_, nr, nc);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j) r.at(i, j) = at(r0 + i, c0 + j);
        return r;
    }

    /// In-place reduced row echelon form. Returns the pivot column list.
    std::vector<int> rref_in_place() {
        std::vector<int> pivots;
        int r = 0;
        for (int c = 0; c < cols_ && r < rows_; ++c) {
            int sel = -1;
            for (int i = r; i < rows_; ++i)
                if (!at(i, c).is_zero()) { sel = i; break; }
            if (sel < 0) continue;
            if (sel != r)
                for (int j = 0; j < cols_; ++j) std::swap(at(sel, j), at(r, j));
            const FieldElement inv = at(r, c).inverse();
            for (int j = c; j < cols_; ++j) at(r, j) = at(r, j) * inv;
            for (int i = 0; i < rows_; ++i) {
                if (i == r || at(i, c).is_zero()) continue;
                const FieldElement m = at(i, c);
                for (int j = c; j < cols_; ++j) at(i, j) = at(i, j) - m * at(r, j);
            }
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    int rank() const {
        FqMatrix t = *this;
        return static_cast<int>(t.rref_in_place().size());
    }

    /// Canonical basis of the row space: RREF with zero rows dropped.
    FqMatrix row_space() const {
        FqMatrix t = *this;
        auto piv = t.rref_in_place();
        FqMatrix r(spec_, static_cast<int>(piv.size()), cols_);
        for (int i = 0; i < r.rows(); ++i)
            for (int j = 0; j < cols_; ++j) r.at(i, j) = t.at(i, j);
        return r;
    }

    /**
     * Solves x * A = b for a row vector x (any one solution).
     * Returns nullopt when inconsistent.
     */
    std::optional<FqMatrix> solve_left(const FqMatrix& b) const {
        // Transpose to the column problem A^T x^T = b^T.
        FqMatrix aug = hstack(transpose(), b.transpose());
        auto piv = aug.rref_in_place();
        const int nc = rows_;
        FqMatrix x(spec_, 1, nc);
        for (std::size_t k = 0; k < piv.size(); ++k) {
            if (piv[k] == nc) return std::nullopt;  // pivot in the augmented column
            x.at(0, piv[k]) = aug.at(static_cast<int>(k), nc);
        }
        return x;
    }

    bool row_in_span(const FqMatrix& v) const { return solve_left(v).has_value(); }

    /// Basis (as rows) of { x : x * A = 0 }.
    FqMatrix kernel_left() const {
        FqMatrix t = transpose();
        auto piv = t.rref_in_place();
        std::vector<bool> is_piv(static_cast<std::size_t>(rows_), false);
        for (int c : piv) is_piv[static_cast<std::size_t>(c)] = true;
        FqMatrix k(spec_, rows_ - static_cast<int>(piv.size()), rows_);
        int kr = 0;
        for (int c = 0; c < rows_; ++c) {
            if (is_piv[static_cast<std::size_t>(c)]) continue;
            k.at(kr, c) = FieldElement(spec_, 1);
            for (std::size_t i = 0; i < piv.size(); ++i)
                k.at(kr, piv[i]) = -t.at(static_cast<int>(i), c);
            ++kr;
        }
        return k;
    }

    FqMatrix inverse() const {
        if (rows_ != cols_) throw DimensionMismatch("FqMatrix::inverse: not square");
        FqMatrix aug = hstack(*this, identity(spec_, rows_));
        auto piv = aug.rref_in_place();
        if (static_cast<int>(piv.size()) != rows_)
            throw Error("FqMatrix::inverse: matrix is singular");
        return aug.block(0, rows_, rows_, rows_);
    }

    std::string serialize() const {
        std::ostringstream os;
        os << rows_ << 'x' << cols_ << ':';
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) {
                if (i || j) os << ',';
                os << to_plain_string(at(i, j));
            }
        return os.str();
    }

private:
    const FieldSpec* spec_ = nullptr;
    int rows_ = 0, cols_ = 0;
    std::vector<FieldElement> a_;
};

/// Row space of the intersection of two row spaces.
inline FqMatrix intersect_row_spaces(const FqMatrix& a, const FqMatrix& b) {
    if (a.rows() == 0 || b.rows() == 0) return FqMatrix(a.spec(), 0, a.cols());
    FqMatrix stacked = FqMatrix::vstack(a, b);
    FqMatrix ker = stacked.kernel_left();  // (u, v) with u*a + v*b = 0
    FqMatrix gen(a.spec(), ker.rows(), a.cols());
    for (int i = 0; i < ker.rows(); ++i) {
        FqMatrix u = ker.block(i, 0, 1, a.rows());
        FqMatrix w = u * a;
        for (int j = 0; j < a.cols(); ++j) gen.at(i, j) = w.at(0, j);
    }
    return gen.row_space();
}

inline FqMatrix sum_row_spaces(const FqMatrix& a, const FqMatrix& b) {
    return FqMatrix::vstack(a, b).row_space();
}

/**
 * Iterates every vector of the row space of `basis` (q^rank of them),
 * in the deterministic order given by coefficient value indices with the
 * first basis row most significant.
 */
class RowSpaceRange {
public:
    explicit RowSpaceRange(const FqMatrix& basis) : basis_(basis) {
        count_ = 1;
        for (int i = 0; i < basis.rows(); ++i) count_ *= basis.spec()->q;
    }

    long long size() const { return count_; }

    FqMatrix vector_at(long long idx) const {
        const FieldSpec* spec = basis_.spec();
        FqMatrix v(spec, 1, basis_.cols());
        for (int i = basis_.rows() - 1; i >= 0; --i) {
            FieldElement c = FieldElement::from_index(spec, idx % spec->q);
            idx /= spec->q;
            if (!c.is_zero())
                for (int j = 0; j < basis_.cols(); ++j)
                    v.at(0, j) = v.at(0, j) + c * basis_.at(i, j);
        }
        return v;
    }

private:
    FqMatrix basis_;
    long long count_ = 1;
};

}  // namespace weilfq
