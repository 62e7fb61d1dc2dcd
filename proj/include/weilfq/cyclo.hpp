#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "weilfq/errors.hpp"
#include "weilfq/galois.hpp"

namespace weilfq {

/**
 * Integer of the cyclotomic ring Z[zeta_p], p an odd prime.
 *
 * Stored on the Z-basis 1, zeta, ..., zeta^(p-2); the relation
 * 1 + zeta + ... + zeta^(p-1) = 0 is applied eagerly, so the coefficient
 * vector is canonical and equality is coefficient-wise. Coefficients are
 * 64-bit: every quantity in play is a sum of at most q^(2m) roots of unity
 * and their small products, far below overflow at desk scale.
 */
class CycInt {
public:
    CycInt() = default;

    explicit CycInt(int p) : p_(p), c_(static_cast<std::size_t>(p - 1), 0) {}

    CycInt(int p, long long integer_value) : CycInt(p) { c_[0] = integer_value; }

    /// zeta_p^k (k taken mod p).
    static CycInt root_of_unity(int p, long long k) {
        CycInt z(p);
        long long e = k % p;
        if (e < 0) e += p;
        if (e == p - 1) {
            for (auto& x : z.c_) x = -1;  // zeta^(p-1) = -(1 + zeta + ... + zeta^(p-2))
        } else {
            z.c_[static_cast<std::size_t>(e)] = 1;
        }
        return z;
    }

    int p() const { return p_; }
    const std::vector<long long>& coeffs() const { return c_; }

    bool is_zero() const {
        for (long long x : c_)
            if (x != 0) return false;
        return true;
    }

    bool is_rational_integer() const {
        for (std::size_t i = 1; i < c_.size(); ++i)
            if (c_[i] != 0) return false;
        return true;
    }

    long long rational_value() const {
        if (!is_rational_integer()) throw Error("CycInt::rational_value: value is not rational");
        return c_[0];
    }

    bool operator==(const CycInt& o) const { return p_ == o.p_ && c_ == o.c_; }
    bool operator!=(const CycInt& o) const { return !(*this == o); }

    CycInt operator+(const CycInt& o) const {
        check_same(o);
        CycInt r = *this;
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
        return r;
    }

    CycInt operator-(const CycInt& o) const {
        check_same(o);
        CycInt r = *this;
        for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] -= o.c_[i];
        return r;
    }

    CycInt operator-() const {
        CycInt r = *this;
        for (auto& x : r.c_) x = -x;
        return r;
    }

    CycInt operator*(const CycInt& o) const {
        check_same(o);
        // Convolution with exponents folded mod p, then canonical reduction.
        std::vector<long long> acc(static_cast<std::size_t>(p_), 0);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == 0) continue;
            for (std::size_t j = 0; j < o.c_.size(); ++j) {
                if (o.c_[j] == 0) continue;
                acc[(i + j) % static_cast<std::size_t>(p_)] += c_[i] * o.c_[j];
            }
        }
        return from_exponent_accumulator(p_, acc);
    }

    CycInt operator*(long long k) const {
        CycInt r = *this;
        for (auto& x : r.c_) x *= k;
        return r;
    }

    /// Galois conjugation zeta -> zeta^(-1) (complex conjugation).
    CycInt conj() const {
        std::vector<long long> acc(static_cast<std::size_t>(p_), 0);
        for (std::size_t i = 0; i < c_.size(); ++i)
            acc[(static_cast<std::size_t>(p_) - i) % static_cast<std::size_t>(p_)] += c_[i];
        return from_exponent_accumulator(p_, acc);
    }

    CycInt norm_sq() const { return *this * conj(); }

    std::complex<double> embed() const {
        std::complex<double> s(0.0, 0.0);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == 0) continue;
            s += static_cast<double>(c_[i]) *
                 std::polar(1.0, 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(p_));
        }
        return s;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (i) os << ',';
            os << c_[i];
        }
        os << ']';
        return os.str();
    }

private:
    int p_ = 3;
    std::vector<long long> c_;

    void check_same(const CycInt& o) const {
        if (p_ != o.p_) throw DimensionMismatch("CycInt: mixed character orders");
    }

    static CycInt from_exponent_accumulator(int p, const std::vector<long long>& acc) {
        CycInt r(p);
        const long long top = acc[static_cast<std::size_t>(p - 1)];
        for (int i = 0; i < p - 1; ++i) r.c_[static_cast<std::size_t>(i)] = acc[static_cast<std::size_t>(i)] - top;
        return r;
    }
};

/**
 * Fixed nontrivial additive character psi_a(x) = zeta_p^Tr(a*x) of F_q.
 * The scale a (a unit) selects among the q-1 nontrivial characters; the
 * default a = 1 is used everywhere unless a run asks otherwise.
 */
class PsiChar {
public:
    explicit PsiChar(std::shared_ptr<const FieldSpec> field)
        : field_(std::move(field)), scale_(FieldElement(field_.get(), 1)) {}

    PsiChar(std::shared_ptr<const FieldSpec> field, const FieldElement& scale)
        : field_(std::move(field)), scale_(scale) {
        if (scale_.is_zero()) throw Error("PsiChar: scale must be a unit");
    }

    const FieldSpec* field() const { return field_.get(); }
    std::shared_ptr<const FieldSpec> field_ptr() const { return field_; }
    const FieldElement& scale() const { return scale_; }
    int p() const { return field_->p; }

    CycInt operator()(const FieldElement& x) const {
        return CycInt::root_of_unity(field_->p, trace(scale_ * x));
    }

private:
    std::shared_ptr<const FieldSpec> field_;
    FieldElement scale_;
};

/// Cyclotomic integer carrying a global scale q^(e/2).
struct ScaledCyc {
    CycInt value;
    int e = 0;
};

/**
 * Matrix over Z[zeta_p] with a global scale q^(e/2); the denoted value is
 * q^(e/2) * entries. Half-integer powers of q are encoded by the parity of
 * e, never by ring elements, so all entry arithmetic stays exact.
 *
 * Row/column labels name the basis (coset representatives) each index
 * refers to; scaled_mul checks label compatibility when both sides carry
 * labels.
 */
class ScaledMatrix {
public:
    ScaledMatrix() = default;

    ScaledMatrix(int p, long long q, int rows, int cols, int e = 0)
        : p_(p), q_(q), rows_(rows), cols_(cols), e_(e),
          a_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), CycInt(p)) {}

    static ScaledMatrix identity(int p, long long q, int n, int e = 0) {
        ScaledMatrix m(p, q, n, n, e);
        for (int i = 0; i < n; ++i) m.at(i, i) = CycInt(p, 1);
        return m;
    }

    int p() const { return p_; }
    long long q() const { return q_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int e() const { return e_; }
    void set_e(int e) { e_ = e; }

    std::vector<std::string>& row_labels() { return row_labels_; }
    std::vector<std::string>& col_labels() { return col_labels_; }
    const std::vector<std::string>& row_labels() const { return row_labels_; }
    const std::vector<std::string>& col_labels() const { return col_labels_; }

    CycInt& at(int i, int j) {
        return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)];
    }
    const CycInt& at(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j)];
    }

    ScaledMatrix conj_transpose() const {
        ScaledMatrix r(p_, q_, cols_, rows_, e_);
        r.row_labels_ = col_labels_;
        r.col_labels_ = row_labels_;
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j).conj();
        return r;
    }

    /// Entrywise value q^(e/2) * entry embedded into C.
    std::complex<double> embed(int i, int j) const {
        return at(i, j).embed() * std::pow(static_cast<double>(q_), 0.5 * e_);
    }

    double max_abs() const {
        double m = 0.0;
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m = std::max(m, std::abs(embed(i, j)));
        return m;
    }

    std::string serialize() const {
        std::ostringstream os;
        os << rows_ << 'x' << cols_ << "@e" << e_ << ':';
        for (std::size_t k = 0; k < a_.size(); ++k) {
            if (k) os << ';';
            os << a_[k].to_string();
        }
        return os.str();
    }

private:
    int p_ = 3;
    long long q_ = 3;
    int rows_ = 0, cols_ = 0;
    int e_ = 0;
    std::vector<CycInt> a_;
    std::vector<std::string> row_labels_, col_labels_;
};

/// Exact operator composition; exponents add.
inline ScaledMatrix scaled_mul(const ScaledMatrix& a, const ScaledMatrix& b) {
    if (a.cols() != b.rows() || a.p() != b.p() || a.q() != b.q())
        throw DimensionMismatch("scaled_mul: inner dimensions or base rings differ");
    if (!a.col_labels().empty() && !b.row_labels().empty() && a.col_labels() != b.row_labels())
        throw DimensionMismatch("scaled_mul: inner index labels differ");
    ScaledMatrix r(a.p(), a.q(), a.rows(), b.cols(), a.e() + b.e());
    r.row_labels() = a.row_labels();
    r.col_labels() = b.col_labels();
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const CycInt& aik = a.at(i, k);
            if (aik.is_zero()) continue;
            for (int j = 0; j < b.cols(); ++j) {
                const CycInt& bkj = b.at(k, j);
                if (bkj.is_zero()) continue;
                r.at(i, j) = r.at(i, j) + aik * bkj;
            }
        }
    return r;
}

/// c * A with an extra exponent shift: value becomes q^((e+shift)/2) * c * entries.
inline ScaledMatrix scaled_scalar_mul(const CycInt& c, const ScaledMatrix& a, int e_shift = 0) {
    ScaledMatrix r = a;
    r.set_e(a.e() + e_shift);
    for (int i = 0; i < r.rows(); ++i)
        for (int j = 0; j < r.cols(); ++j) r.at(i, j) = r.at(i, j) * c;
    return r;
}

/**
 * Exact equality of denoted values. Requires e_A = e_B (mod 2); the side
 * with the smaller exponent is multiplied by an integer power of q and the
 * integer matrices are compared. Throws ParityMismatch when the exponents
 * differ in parity (the caller falls back to numeric comparison).
 */
inline bool scaled_eq_exact(const ScaledMatrix& a, const ScaledMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("scaled_eq_exact: shapes differ");
    if (((a.e() - b.e()) % 2 + 2) % 2 != 0)
        throw ParityMismatch("scaled_eq_exact: exponents differ in parity");
    long long mul_a = 1, mul_b = 1;
    int diff = (a.e() - b.e()) / 2;
    for (; diff > 0; --diff) mul_a *= a.q();   // a carries the larger scale
    for (; diff < 0; ++diff) mul_b *= a.q();
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (a.at(i, j) * mul_a != b.at(i, j) * mul_b) return false;
    return true;
}

inline bool scaled_eq_numeric(const ScaledMatrix& a, const ScaledMatrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch("scaled_eq_numeric: shapes differ");
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (std::abs(a.embed(i, j) - b.embed(i, j)) > tol) return false;
    return true;
}

/// Exact when parity permits, else numeric at tol.
inline bool scaled_eq(const ScaledMatrix& a, const ScaledMatrix& b, double tol = 1e-9) {
    try {
        return scaled_eq_exact(a, b);
    } catch (const ParityMismatch&) {
        return scaled_eq_numeric(a, b, tol);
    }
}

}  // namespace weilfq
