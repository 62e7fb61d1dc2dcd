#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "weilfq/errors.hpp"

namespace weilfq {

// Extension degrees are capped at compile time so elements stay inline.
inline constexpr int kMaxExtensionDegree = 4;

/**
 * Description of a finite field F_q, q = p^f with p an odd prime.
 *
 * The modulus is the lexicographically smallest monic irreducible of
 * degree f over Z_p (coefficient tuples compared low degree first), so a
 * given (p, f) always names the same field. Immutable after construction;
 * safe to share across threads.
 */
struct FieldSpec {
    int p = 0;                  // odd prime characteristic
    int f = 1;                  // extension degree
    long long q = 0;            // p^f
    std::vector<int> modulus;   // monic, length f+1, coefficients low to high

    bool operator==(const FieldSpec& o) const { return p == o.p && f == o.f; }
};

namespace detail {

inline bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; static_cast<long long>(d) * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Remainder of a mod m over Z_p; both low-to-high, m monic.
inline std::vector<int> poly_mod(std::vector<int> a, const std::vector<int>& m, int p) {
    const int dm = static_cast<int>(m.size()) - 1;
    while (static_cast<int>(a.size()) > dm) {
        const int lead = a.back();
        const int shift = static_cast<int>(a.size()) - 1 - dm;
        if (lead != 0) {
            for (int i = 0; i <= dm; ++i) {
                int& c = a[static_cast<std::size_t>(i + shift)];
                c = ((c - lead * m[static_cast<std::size_t>(i)]) % p + p) % p;
            }
        }
        a.pop_back();
    }
    return a;
}

inline std::vector<int> poly_mul_mod(const std::vector<int>& a, const std::vector<int>& b,
                                     const std::vector<int>& m, int p) {
    std::vector<int> c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    return poly_mod(std::move(c), m, p);
}

// Divisibility test for monic divisor d of a over Z_p.
inline bool poly_divides(const std::vector<int>& d, std::vector<int> a, int p) {
    a = poly_mod(std::move(a), d, p);
    for (int c : a)
        if (c != 0) return false;
    return true;
}

inline bool poly_irreducible(const std::vector<int>& m, int p) {
    const int deg = static_cast<int>(m.size()) - 1;
    if (deg == 1) return true;
    // Trial division by every monic polynomial of degree 1..deg/2.
    for (int dd = 1; 2 * dd <= deg; ++dd) {
        long long count = 1;
        for (int i = 0; i < dd; ++i) count *= p;
        for (long long idx = 0; idx < count; ++idx) {
            std::vector<int> d(static_cast<std::size_t>(dd) + 1, 0);
            long long t = idx;
            for (int i = 0; i < dd; ++i) {
                d[static_cast<std::size_t>(i)] = static_cast<int>(t % p);
                t /= p;
            }
            d[static_cast<std::size_t>(dd)] = 1;
            if (poly_divides(d, m, p)) return false;
        }
    }
    return true;
}

}  // namespace detail

/**
 * Builds the canonical F_{p^f}. Throws NotPrime / EvenCharacteristic on bad
 * input: the whole construction requires odd characteristic (division by 2
 * appears in the connection identities), so p = 2 is rejected here rather
 * than deferred.
 */
inline std::shared_ptr<const FieldSpec> make_field(int p, int f) {
    if (!detail::is_prime(p)) throw NotPrime("make_field: p = " + std::to_string(p) + " is not prime");
    if (p == 2) throw EvenCharacteristic("make_field: characteristic 2 is not supported");
    if (f < 1) throw Error("make_field: extension degree must be >= 1");
    if (f > kMaxExtensionDegree)
        throw Error("make_field: extension degree " + std::to_string(f) + " exceeds supported cap");

    auto spec = std::make_shared<FieldSpec>();
    spec->p = p;
    spec->f = f;
    spec->q = 1;
    for (int i = 0; i < f; ++i) spec->q *= p;

    if (f == 1) {
        spec->modulus = {0, 1};  // x
        return spec;
    }
    // Scan monic degree-f polynomials in lexicographic order of the
    // coefficient tuple (c_0, ..., c_{f-1}), c_0 least significant moving fastest.
    long long count = 1;
    for (int i = 0; i < f; ++i) count *= p;
    for (long long idx = 0; idx < count; ++idx) {
        // Tuple (c_0, ..., c_{f-1}) compared low-degree-first, so c_0 is the
        // most significant digit of idx.
        std::vector<int> m(static_cast<std::size_t>(f) + 1, 0);
        for (int i = 0; i < f; ++i) {
            long long base = 1;
            for (int k = 0; k < f - 1 - i; ++k) base *= p;
            m[static_cast<std::size_t>(i)] = static_cast<int>((idx / base) % p);
        }
        m[static_cast<std::size_t>(f)] = 1;
        if (detail::poly_irreducible(m, p)) {
            spec->modulus = m;
            return spec;
        }
    }
    throw Error("make_field: no irreducible modulus found (unreachable)");
}

/**
 * Element of F_q: a residue-coefficient vector against the field modulus.
 *
 * Holds a raw pointer to its FieldSpec; the spec (owned via shared_ptr by
 * whatever context created it) must outlive the element. All coefficients
 * are kept reduced into [0, p-1], so equality is coefficient equality.
 */
class FieldElement {
public:
    FieldElement() = default;

    explicit FieldElement(const FieldSpec* spec) : spec_(spec) { c_.fill(0); }

    FieldElement(const FieldSpec* spec, long long value) : spec_(spec) {
        c_.fill(0);
        long long v = value % spec->p;
        if (v < 0) v += spec->p;
        c_[0] = static_cast<std::int16_t>(v);
    }

    static FieldElement from_coeffs(const FieldSpec* spec, const std::vector<int>& coeffs) {
        FieldElement x(spec);
        for (int i = 0; i < spec->f && i < static_cast<int>(coeffs.size()); ++i) {
            int v = coeffs[static_cast<std::size_t>(i)] % spec->p;
            if (v < 0) v += spec->p;
            x.c_[static_cast<std::size_t>(i)] = static_cast<std::int16_t>(v);
        }
        return x;
    }

    // Element with value index idx = c_0 + c_1 p + ... (the canonical
    // enumeration order of the field, 0 <= idx < q).
    static FieldElement from_index(const FieldSpec* spec, long long idx) {
        FieldElement x(spec);
        for (int i = 0; i < spec->f; ++i) {
            x.c_[static_cast<std::size_t>(i)] = static_cast<std::int16_t>(idx % spec->p);
            idx /= spec->p;
        }
        return x;
    }

    const FieldSpec* spec() const { return spec_; }

    long long value_index() const {
        long long idx = 0, base = 1;
        for (int i = 0; i < spec_->f; ++i) {
            idx += base * c_[static_cast<std::size_t>(i)];
            base *= spec_->p;
        }
        return idx;
    }

    int coeff(int i) const { return c_[static_cast<std::size_t>(i)]; }

    bool is_zero() const {
        for (int i = 0; i < spec_->f; ++i)
            if (c_[static_cast<std::size_t>(i)] != 0) return false;
        return true;
    }

    bool operator==(const FieldElement& o) const {
        for (int i = 0; i < spec_->f; ++i)
            if (c_[static_cast<std::size_t>(i)] != o.c_[static_cast<std::size_t>(i)]) return false;
        return true;
    }
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

    FieldElement operator+(const FieldElement& o) const {
        FieldElement r(spec_);
        for (int i = 0; i < spec_->f; ++i)
            r.c_[static_cast<std::size_t>(i)] = static_cast<std::int16_t>(
                (c_[static_cast<std::size_t>(i)] + o.c_[static_cast<std::size_t>(i)]) % spec_->p);
        return r;
    }

    FieldElement operator-(const FieldElement& o) const {
        FieldElement r(spec_);
        for (int i = 0; i < spec_->f; ++i)
            r.c_[static_cast<std::size_t>(i)] = static_cast<std::int16_t>(
                (c_[static_cast<std::size_t>(i)] - o.c_[static_cast<std::size_t>(i)] + spec_->p) % spec_->p);
        return r;
    }

    FieldElement operator-() const { return FieldElement(spec_) - *this; }

    FieldElement operator*(const FieldElement& o) const {
        const int p = spec_->p, f = spec_->f;
        if (f == 1) {
            FieldElement r(spec_);
            r.c_[0] = static_cast<std::int16_t>((c_[0] * o.c_[0]) % p);
            return r;
        }
        std::array<int, 2 * kMaxExtensionDegree> prod{};
        for (int i = 0; i < f; ++i)
            for (int j = 0; j < f; ++j)
                prod[static_cast<std::size_t>(i + j)] +=
                    c_[static_cast<std::size_t>(i)] * o.c_[static_cast<std::size_t>(j)];
        // Reduce mod the (monic) modulus.
        for (int d = 2 * f - 2; d >= f; --d) {
            const int lead = prod[static_cast<std::size_t>(d)] % p;
            if (lead != 0) {
                for (int i = 0; i < f; ++i)
                    prod[static_cast<std::size_t>(d - f + i)] -=
                        lead * spec_->modulus[static_cast<std::size_t>(i)];
            }
            prod[static_cast<std::size_t>(d)] = 0;
        }
        FieldElement r(spec_);
        for (int i = 0; i < f; ++i) {
            int v = prod[static_cast<std::size_t>(i)] % p;
            if (v < 0) v += p;
            r.c_[static_cast<std::size_t>(i)] = static_cast<std::int16_t>(v);
        }
        return r;
    }

    FieldElement pow(long long e) const {
        FieldElement base = *this;
        FieldElement r(spec_, 1);
        while (e > 0) {
            if (e & 1) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

    // Multiplicative inverse via Fermat: x^(q-2).
    FieldElement inverse() const {
        if (is_zero()) throw Error("FieldElement::inverse: zero has no inverse");
        return pow(spec_->q - 2);
    }

    FieldElement operator/(const FieldElement& o) const { return *this * o.inverse(); }

    FieldElement frobenius() const { return pow(spec_->p); }

    // Coefficient tuple, low degree first: "[2,1]" is 2 + a in F_9.
    std::string to_string() const {
        std::ostringstream os;
        os << '[';
        for (int i = 0; i < spec_->f; ++i) {
            if (i) os << ',';
            os << c_[static_cast<std::size_t>(i)];
        }
        os << ']';
        return os.str();
    }

private:
    const FieldSpec* spec_ = nullptr;
    std::array<std::int16_t, kMaxExtensionDegree> c_{};

    friend std::string to_plain_string(const FieldElement&);
};

inline std::string to_plain_string(const FieldElement& x) {
    std::ostringstream os;
    for (int i = 0; i < x.spec()->f; ++i) {
        if (i) os << '.';
        os << x.coeff(i);
    }
    return os.str();
}

/**
 * Absolute trace Tr(x) = x + x^p + ... + x^(p^(f-1)), returned as the
 * residue in [0, p-1]. Additive and F_p-linear; surjective onto F_p, which
 * is what makes the induced additive character nontrivial on extensions.
 */
inline int trace(const FieldElement& x) {
    FieldElement acc = x, pw = x;
    for (int i = 1; i < x.spec()->f; ++i) {
        pw = pw.frobenius();
        acc = acc + pw;
    }
    for (int i = 1; i < x.spec()->f; ++i) {
        if (acc.coeff(i) != 0)
            throw InternalInconsistency("trace: result not in the prime field");
    }
    return acc.coeff(0);
}

}  // namespace weilfq
