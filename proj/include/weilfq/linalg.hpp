#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "weilfq/cyclo.hpp"
#include "weilfq/errors.hpp"

namespace weilfq {

using Cx = std::complex<double>;

/// Dense complex matrix; just enough numerics for commutant solves.
class CMat {
public:
    CMat() = default;
    CMat(int r, int c) : r_(r), c_(c), a_(static_cast<std::size_t>(r) * static_cast<std::size_t>(c)) {}

    static CMat identity(int n) {
        CMat m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
        return m;
    }

    static CMat from_scaled(const ScaledMatrix& s) {
        CMat m(s.rows(), s.cols());
        for (int i = 0; i < s.rows(); ++i)
            for (int j = 0; j < s.cols(); ++j) m.at(i, j) = s.embed(i, j);
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }

    Cx& at(int i, int j) { return a_[static_cast<std::size_t>(i) * c_ + static_cast<std::size_t>(j)]; }
    const Cx& at(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * c_ + static_cast<std::size_t>(j)];
    }

    CMat operator*(const CMat& o) const {
        if (c_ != o.r_) throw DimensionMismatch("CMat::mul: inner dimensions differ");
        CMat r(r_, o.c_);
        for (int i = 0; i < r_; ++i)
            for (int k = 0; k < c_; ++k) {
                const Cx aik = at(i, k);
                if (aik == Cx(0.0, 0.0)) continue;
                for (int j = 0; j < o.c_; ++j) r.at(i, j) += aik * o.at(k, j);
            }
        return r;
    }

    CMat operator+(const CMat& o) const {
        CMat r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
        return r;
    }

    CMat operator-(const CMat& o) const {
        CMat r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
        return r;
    }

    CMat scaled(Cx z) const {
        CMat r = *this;
        for (auto& x : r.a_) x *= z;
        return r;
    }

    CMat dagger() const {
        CMat r(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) r.at(j, i) = std::conj(at(i, j));
        return r;
    }

    Cx trace() const {
        Cx t = 0.0;
        for (int i = 0; i < std::min(r_, c_); ++i) t += at(i, i);
        return t;
    }

    double frob_norm() const {
        double s = 0.0;
        for (const auto& x : a_) s += std::norm(x);
        return std::sqrt(s);
    }

    double max_abs() const {
        double s = 0.0;
        for (const auto& x : a_) s = std::max(s, std::abs(x));
        return s;
    }

private:
    int r_ = 0, c_ = 0;
    std::vector<Cx> a_;
};

struct HermEig {
    std::vector<double> values;  // ascending
    CMat vectors;                // columns are eigenvectors
};

/**
 * Cyclic Jacobi eigendecomposition for Hermitian matrices. Plenty accurate
 * for the sizes in play (n <= a few hundred); eigenvalues come back
 * ascending with matching eigenvector columns.
 */
inline HermEig hermitian_eig(CMat a) {
    const int n = a.rows();
    if (a.cols() != n) throw DimensionMismatch("hermitian_eig: not square");
    CMat v = CMat::identity(n);

    auto offdiag = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += std::norm(a.at(i, j));
        return std::sqrt(s);
    };

    double base = a.frob_norm();
    if (base == 0.0) base = 1.0;
    for (int sweep = 0; sweep < 60 && offdiag() > 1e-13 * base; ++sweep) {
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                Cx apq = a.at(p, q);
                double abs_apq = std::abs(apq);
                if (abs_apq < 1e-300) continue;
                double app = a.at(p, p).real();
                double aqq = a.at(q, q).real();
                Cx phase = apq / abs_apq;  // e^{i phi}
                double tau = (aqq - app) / (2.0 * abs_apq);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                // Unitary U: identity except
                //   U[p][p] = c, U[p][q] = s,
                //   U[q][p] = -s * conj(phase), U[q][q] = c * conj(phase).
                Cx upp = c, upq = s;
                Cx uqp = -s * std::conj(phase), uqq = c * std::conj(phase);
                // A <- U^H A U: columns first, then rows.
                for (int i = 0; i < n; ++i) {
                    Cx aip = a.at(i, p), aiq = a.at(i, q);
                    a.at(i, p) = aip * upp + aiq * uqp;
                    a.at(i, q) = aip * upq + aiq * uqq;
                }
                for (int j = 0; j < n; ++j) {
                    Cx apj = a.at(p, j), aqj = a.at(q, j);
                    a.at(p, j) = std::conj(upp) * apj + std::conj(uqp) * aqj;
                    a.at(q, j) = std::conj(upq) * apj + std::conj(uqq) * aqj;
                }
                for (int i = 0; i < n; ++i) {
                    Cx vip = v.at(i, p), viq = v.at(i, q);
                    v.at(i, p) = vip * upp + viq * uqp;
                    v.at(i, q) = vip * upq + viq * uqq;
                }
            }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return a.at(x, x).real() < a.at(y, y).real(); });
    HermEig out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors = CMat(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[static_cast<std::size_t>(j)] = a.at(order[static_cast<std::size_t>(j)],
                                                       order[static_cast<std::size_t>(j)]).real();
        for (int i = 0; i < n; ++i)
            out.vectors.at(i, j) = v.at(i, order[static_cast<std::size_t>(j)]);
    }
    return out;
}

struct SvdResult {
    std::vector<double> singular_values;  // descending
    CMat v;                               // right singular vectors, columns
};

/**
 * One-sided Jacobi SVD: orthogonalizes the columns of A by plane rotations
 * and reads the singular values off as column norms. Unlike the A^H A
 * eigenvalue route this resolves small singular values at machine
 * precision, which the 1e-7 rank tolerance needs.
 */
inline SvdResult svd_one_sided(CMat a) {
    const int rows = a.rows(), cols = a.cols();
    CMat v = CMat::identity(cols);

    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (int i = 0; i < cols - 1; ++i)
            for (int j = i + 1; j < cols; ++j) {
                double nii = 0.0, njj = 0.0;
                Cx nij = 0.0;
                for (int r = 0; r < rows; ++r) {
                    nii += std::norm(a.at(r, i));
                    njj += std::norm(a.at(r, j));
                    nij += std::conj(a.at(r, i)) * a.at(r, j);
                }
                double abs_nij = std::abs(nij);
                if (abs_nij <= 1e-30 || abs_nij * abs_nij <= 1e-30 * nii * njj) continue;
                rotated = true;
                Cx phase = nij / abs_nij;
                double tau = (njj - nii) / (2.0 * abs_nij);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;
                Cx uii = c, uij = s;
                Cx uji = -s * std::conj(phase), ujj = c * std::conj(phase);
                for (int r = 0; r < rows; ++r) {
                    Cx ai = a.at(r, i), aj = a.at(r, j);
                    a.at(r, i) = ai * uii + aj * uji;
                    a.at(r, j) = ai * uij + aj * ujj;
                }
                for (int r = 0; r < cols; ++r) {
                    Cx vi = v.at(r, i), vj = v.at(r, j);
                    v.at(r, i) = vi * uii + vj * uji;
                    v.at(r, j) = vi * uij + vj * ujj;
                }
            }
        if (!rotated) break;
    }

    std::vector<double> sv(static_cast<std::size_t>(cols));
    for (int j = 0; j < cols; ++j) {
        double s = 0.0;
        for (int r = 0; r < rows; ++r) s += std::norm(a.at(r, j));
        sv[static_cast<std::size_t>(j)] = std::sqrt(s);
    }
    std::vector<int> order(static_cast<std::size_t>(cols));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return sv[static_cast<std::size_t>(x)] > sv[static_cast<std::size_t>(y)];
    });
    SvdResult out;
    out.singular_values.resize(static_cast<std::size_t>(cols));
    out.v = CMat(cols, cols);
    for (int j = 0; j < cols; ++j) {
        out.singular_values[static_cast<std::size_t>(j)] = sv[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
        for (int i = 0; i < cols; ++i)
            out.v.at(i, j) = v.at(i, order[static_cast<std::size_t>(j)]);
    }
    return out;
}

struct RankResult {
    int rank = 0;
    std::vector<double> singular_values;  // descending
    CMat nullspace;                       // columns span the nullspace
};

/**
 * Rank and nullspace of A at a relative singular-value tolerance. Throws
 * RankUnstable when singular values crowd the decision band
 * (tol/10, tol*10) * sigma_max instead of guessing.
 */
inline RankResult rank_nullspace(const CMat& a, double tol) {
    SvdResult svd = svd_one_sided(a);
    const int u = a.cols();
    RankResult out;
    out.singular_values = svd.singular_values;
    double smax = out.singular_values.empty() ? 0.0 : out.singular_values[0];
    if (smax == 0.0) {
        out.rank = 0;
        out.nullspace = CMat::identity(u);
        return out;
    }
    int null_dim = 0;
    for (double s : out.singular_values) {
        double rel = s / smax;
        if (rel > tol / 10.0 && rel < tol * 10.0)
            throw RankUnstable("rank_nullspace: singular value near the tolerance band");
        if (rel <= tol) ++null_dim;
    }
    out.rank = u - null_dim;
    out.nullspace = CMat(u, null_dim);
    for (int j = 0; j < null_dim; ++j)
        for (int i = 0; i < u; ++i) out.nullspace.at(i, j) = svd.v.at(i, u - null_dim + j);
    return out;
}

/**
 * Householder QR compression: returns an upper-trapezoidal u x u matrix
 * with the same singular values (and right singular space) as the input.
 * Used to fold tall constraint stacks into square factors batch by batch.
 */
inline CMat qr_compress(const CMat& a) {
    const int rows = a.rows(), cols = a.cols();
    if (rows <= cols) return a;
    CMat r = a;
    for (int k = 0; k < cols; ++k) {
        // Householder vector for column k below row k.
        double norm2 = 0.0;
        for (int i = k; i < rows; ++i) norm2 += std::norm(r.at(i, k));
        double norm = std::sqrt(norm2);
        if (norm < 1e-300) continue;
        Cx akk = r.at(k, k);
        double abs_akk = std::abs(akk);
        Cx alpha = (abs_akk > 0 ? -(akk / abs_akk) * norm : Cx(-norm, 0.0));
        std::vector<Cx> vvec(static_cast<std::size_t>(rows - k));
        vvec[0] = akk - alpha;
        for (int i = k + 1; i < rows; ++i) vvec[static_cast<std::size_t>(i - k)] = r.at(i, k);
        double vnorm2 = 0.0;
        for (const auto& z : vvec) vnorm2 += std::norm(z);
        if (vnorm2 < 1e-300) continue;
        for (int j = k; j < cols; ++j) {
            Cx dot = 0.0;
            for (int i = k; i < rows; ++i)
                dot += std::conj(vvec[static_cast<std::size_t>(i - k)]) * r.at(i, j);
            Cx coef = 2.0 * dot / vnorm2;
            for (int i = k; i < rows; ++i)
                r.at(i, j) -= coef * vvec[static_cast<std::size_t>(i - k)];
        }
    }
    CMat out(cols, cols);
    for (int i = 0; i < cols; ++i)
        for (int j = i; j < cols; ++j) out.at(i, j) = r.at(i, j);
    return out;
}

/// Rank of the span of a family of matrices (flattened as columns).
inline int span_rank(const std::vector<CMat>& ops, double tol) {
    if (ops.empty()) return 0;
    const int k = static_cast<int>(ops.size());
    const int nn = ops[0].rows() * ops[0].cols();
    CMat flat(nn, k);
    for (int j = 0; j < k; ++j) {
        const CMat& m = ops[static_cast<std::size_t>(j)];
        int idx = 0;
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) flat.at(idx++, j) = m.at(r, c);
    }
    SvdResult svd = svd_one_sided(flat);
    double smax = svd.singular_values.empty() ? 0.0 : svd.singular_values[0];
    if (smax <= 0.0) return 0;
    int rank = 0;
    for (double s : svd.singular_values)
        if (s > tol * smax) ++rank;
    return rank;
}

}  // namespace weilfq
