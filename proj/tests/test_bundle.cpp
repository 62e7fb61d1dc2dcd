#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "weilfq/bundle.hpp"
#include "weilfq/rng.hpp"

using namespace weilfq;

namespace {

struct Setup {
    std::shared_ptr<const FieldSpec> k;
    SympSpace w;
    PsiChar psi;
    std::vector<Lagrangian> all;

    Setup(int p, int f, int m)
        : k(make_field(p, f)), w(k, m), psi(k), all(enumerate_lagrangians(w)) {}
};

SpElement random_word(const SympSpace& space, const std::vector<SpElement>& gens, Rng& rng,
                      int len = 12) {
    SpElement g = SpElement::identity(space);
    for (int i = 0; i < len; ++i) g = g * gens[rng.below(gens.size())];
    return g;
}

long long qpow(long long q, int e) {
    long long r = 1;
    for (int i = 0; i < e; ++i) r *= q;
    return r;
}

/// value(M) value(M)^dagger = I, checked exactly.
bool unitary_under_scale(const ScaledMatrix& g) {
    ScaledMatrix prod = scaled_mul(g, g.conj_transpose());
    return scaled_eq_exact(prod, ScaledMatrix::identity(g.p(), g.q(), g.rows(), 0));
}

}  // namespace

TEST_CASE("fiber representatives enumerate W/L once each") {
    Setup s(3, 1, 2);
    for (const auto& l : s.all) {
        Fiber f(s.w, l);
        CHECK(f.dim() == 9);
        for (int i = 0; i < f.dim(); ++i) {
            CHECK(f.reduce(f.rep(i)) == f.rep(i));
            CHECK(f.rep_index(f.rep(i)) == i);
            for (int j = i + 1; j < f.dim(); ++j)
                CHECK_FALSE(l.contains(f.rep(i) - f.rep(j)));
        }
        RowSpaceRange ws(FqMatrix::identity(s.k.get(), 4));
        for (long long i = 0; i < ws.size(); ++i) {
            FqMatrix v = ws.vector_at(i);
            FqMatrix r = f.reduce(v);
            CHECK(l.contains(v - r));
            CHECK(f.rep_index(r) < f.dim());
        }
    }
}

TEST_CASE("evaluate_basis: normalization, support, covariance") {
    Setup s(3, 1, 1);
    Lagrangian lq(s.w, s.w.frame_q());
    Fiber f(s.w, lq);

    for (int i = 0; i < f.dim(); ++i) {
        CHECK(evaluate_basis(s.psi, f, i, f.rep(i)) == CycInt(3, 1));
        for (int j = 0; j < f.dim(); ++j)
            if (j != i) CHECK(evaluate_basis(s.psi, f, i, f.rep(j)).is_zero());
    }

    // f_0(q_1) = psi(A(0, q_1)) = 1.
    CHECK(evaluate_basis(s.psi, f, f.index_of_class(s.w.zero_vector()), s.w.basis_vector(1)) ==
          CycInt(3, 1));

    // Covariance f_x(x + y) = psi(A(x, y)) on all (x, y).
    RowSpaceRange ys(lq.basis());
    for (int i = 0; i < f.dim(); ++i)
        for (long long yi = 0; yi < ys.size(); ++yi) {
            FqMatrix y = ys.vector_at(yi);
            CHECK(evaluate_basis(s.psi, f, i, f.rep(i) + y) == s.psi(form(s.w, f.rep(i), y)));
        }
}

TEST_CASE("tau is a permutation-with-phase matrix and composes exactly") {
    for (auto [p, m] : {std::pair{3, 1}, std::pair{3, 2}}) {
        Setup s(p, 1, m);
        auto gens = transvection_generators(s.w);
        Rng rng(13);

        SpElement id = SpElement::identity(s.w);
        const Lagrangian& l0 = s.all[0];
        ScaledMatrix tid = tau_matrix(s.w, s.psi, id, l0);
        CHECK(scaled_eq_exact(tid, ScaledMatrix::identity(p, s.k->q, tid.rows(), 0)));

        const int iters = (m == 1) ? 250 : 250;
        for (int it = 0; it < iters; ++it) {
            SpElement g = random_word(s.w, gens, rng);
            SpElement h = random_word(s.w, gens, rng);
            const Lagrangian& l = s.all[rng.below(s.all.size())];
            Lagrangian hl = act(s.w, h, l);

            ScaledMatrix th = tau_matrix(s.w, s.psi, h, l);
            ScaledMatrix tg = tau_matrix(s.w, s.psi, g, hl);
            ScaledMatrix tgh = tau_matrix(s.w, s.psi, g * h, l);
            CHECK(scaled_eq_exact(tgh, scaled_mul(tg, th)));

            CHECK(tgh.col_labels() == Fiber(s.w, l).labels());
            CHECK(tgh.row_labels() == Fiber(s.w, act(s.w, g * h, l)).labels());
            for (int c = 0; c < tgh.cols(); ++c) {
                int nonzero = 0;
                for (int r = 0; r < tgh.rows(); ++r) {
                    if (tgh.at(r, c).is_zero()) continue;
                    ++nonzero;
                    CHECK(tgh.at(r, c).norm_sq() == CycInt(p, 1));
                }
                CHECK(nonzero == 1);
            }
        }
    }
}

TEST_CASE("gamma closed form equals the raw defining sum") {
    Setup s1(3, 1, 1);
    for (const auto& lt : s1.all)
        for (const auto& lf : s1.all)
            CHECK(scaled_eq_exact(gamma_matrix(s1.w, s1.psi, lt, lf),
                                  gamma_matrix_defsum<-1>(s1.w, s1.psi, lt, lf)));

    Setup s2(3, 1, 2);
    Rng rng(5);
    for (int it = 0; it < 40; ++it) {
        const Lagrangian& lt = s2.all[rng.below(s2.all.size())];
        const Lagrangian& lf = s2.all[rng.below(s2.all.size())];
        CHECK(scaled_eq_exact(gamma_matrix(s2.w, s2.psi, lt, lf),
                              gamma_matrix_defsum<-1>(s2.w, s2.psi, lt, lf)));
    }
}

TEST_CASE("gamma entries: scale exponent, nonzero counts, entry norms") {
    Setup s(3, 1, 2);
    Rng rng(9);
    for (int it = 0; it < 60; ++it) {
        const Lagrangian& lt = s.all[rng.below(s.all.size())];
        const Lagrangian& lf = s.all[rng.below(s.all.size())];
        const int d = dim_meet(lf, lt);
        ScaledMatrix g = gamma_matrix(s.w, s.psi, lt, lf);
        CHECK(g.e() == -(s.w.m + d));
        for (int c = 0; c < g.cols(); ++c) {
            int nonzero = 0;
            for (int r = 0; r < g.rows(); ++r) {
                const CycInt& x = g.at(r, c);
                if (x.is_zero()) continue;
                ++nonzero;
                CHECK(x.norm_sq() == CycInt(3, qpow(3, 2 * d)));
            }
            CHECK(nonzero == qpow(3, s.w.m - d));
        }
    }
}

TEST_CASE("gamma_{L,L} is the identity (connection law i)") {
    for (auto [p, m] : {std::pair{3, 1}, std::pair{5, 1}, std::pair{3, 2}}) {
        Setup s(p, 1, m);
        for (const auto& l : s.all) {
            ScaledMatrix g = gamma_matrix(s.w, s.psi, l, l);
            CHECK(scaled_eq_exact(g, ScaledMatrix::identity(p, s.k->q, g.rows(), 0)));
        }
    }
}

TEST_CASE("gamma_{L,L'} gamma_{L',L} = Id on all ordered pairs (connection law ii)") {
    for (auto [p, m] : {std::pair{3, 1}, std::pair{3, 2}}) {
        Setup s(p, 1, m);
        for (const auto& l : s.all)
            for (const auto& lp : s.all) {
                ScaledMatrix back = scaled_mul(gamma_matrix(s.w, s.psi, l, lp),
                                               gamma_matrix(s.w, s.psi, lp, l));
                CHECK(scaled_eq_exact(back,
                                      ScaledMatrix::identity(p, s.k->q, back.rows(), 0)));
            }
    }
}

TEST_CASE("gamma is unitary under its scale") {
    Setup s(3, 1, 2);
    Rng rng(19);
    for (int it = 0; it < 40; ++it) {
        const Lagrangian& lt = s.all[rng.below(s.all.size())];
        const Lagrangian& lf = s.all[rng.below(s.all.size())];
        CHECK(unitary_under_scale(gamma_matrix(s.w, s.psi, lt, lf)));
    }
}

TEST_CASE("composition law with the multiplier, exhaustive at (3,1)") {
    Setup s(3, 1, 1);
    for (const auto& l2 : s.all)
        for (const auto& l1 : s.all)
            for (const auto& l0 : s.all) {
                ScaledMatrix lhs = scaled_mul(gamma_matrix(s.w, s.psi, l2, l1),
                                              gamma_matrix(s.w, s.psi, l1, l0));
                ScaledCyc mu = multiplier(s.w, s.psi, l2, l1, l0);
                ScaledMatrix rhs =
                    scaled_scalar_mul(mu.value, gamma_matrix(s.w, s.psi, l2, l0), mu.e);
                CHECK(scaled_eq_exact(lhs, rhs));
                CHECK(std::abs(std::abs(mu.value.embed()) *
                                   std::pow(static_cast<double>(s.k->q), 0.5 * mu.e) -
                               1.0) < 1e-9);
            }
}

TEST_CASE("mu(L, L, L) = 1") {
    Setup s(3, 1, 2);
    for (const auto& l : s.all) {
        ScaledCyc mu = multiplier(s.w, s.psi, l, l, l);
        CHECK(mu.value == CycInt(3, qpow(3, s.w.m)));
        CHECK(mu.e == -2 * s.w.m);
    }
}

TEST_CASE("composition law sampled at (3,2)") {
    Setup s(3, 1, 2);
    Rng rng(29);
    for (int it = 0; it < 150; ++it) {
        const Lagrangian& l2 = s.all[rng.below(s.all.size())];
        const Lagrangian& l1 = s.all[rng.below(s.all.size())];
        const Lagrangian& l0 = s.all[rng.below(s.all.size())];
        ScaledMatrix lhs = scaled_mul(gamma_matrix(s.w, s.psi, l2, l1),
                                      gamma_matrix(s.w, s.psi, l1, l0));
        ScaledCyc mu = multiplier(s.w, s.psi, l2, l1, l0);
        ScaledMatrix rhs = scaled_scalar_mul(mu.value, gamma_matrix(s.w, s.psi, l2, l0), mu.e);
        CHECK(scaled_eq_exact(lhs, rhs));
    }
}

TEST_CASE("equivariance tau_g gamma = gamma' tau_g, exhaustive pairs at (3,1)") {
    Setup s(3, 1, 1);
    auto gens = transvection_generators(s.w);
    Rng rng(37);
    for (int it = 0; it < 20; ++it) {
        SpElement g = random_word(s.w, gens, rng);
        for (const auto& lt : s.all)
            for (const auto& lf : s.all) {
                ScaledMatrix lhs = scaled_mul(tau_matrix(s.w, s.psi, g, lt),
                                              gamma_matrix(s.w, s.psi, lt, lf));
                ScaledMatrix rhs = scaled_mul(
                    gamma_matrix(s.w, s.psi, act(s.w, g, lt), act(s.w, g, lf)),
                    tau_matrix(s.w, s.psi, g, lf));
                CHECK(scaled_eq_exact(lhs, rhs));
            }
    }
}

TEST_CASE("connection images satisfy the fiber covariance law at (3,1)") {
    Setup s(3, 1, 1);
    for (const auto& lt : s.all)
        for (const auto& lf : s.all)
            for (int col = 0; col < 3; ++col)
                CHECK(connection_image_in_fiber<-1>(s.w, s.psi, lt, lf, col));
}

TEST_CASE("flipping the kernel sign breaks fiber membership (erratum demonstration)") {
    Setup s(3, 1, 1);
    bool all_pass = true;
    for (const auto& lt : s.all)
        for (const auto& lf : s.all)
            for (int col = 0; col < 3; ++col)
                if (!connection_image_in_fiber<+1>(s.w, s.psi, lt, lf, col)) all_pass = false;
    CHECK_FALSE(all_pass);
}

TEST_CASE("bundle identities hold for a non-default character scale") {
    auto k = make_field(3, 1);
    SympSpace w(k, 1);
    PsiChar psi(k, FieldElement(k.get(), 2));
    auto all = enumerate_lagrangians(w);
    for (const auto& l : all)
        for (const auto& lp : all) {
            ScaledMatrix back =
                scaled_mul(gamma_matrix(w, psi, l, lp), gamma_matrix(w, psi, lp, l));
            CHECK(scaled_eq_exact(back, ScaledMatrix::identity(3, 3, back.rows(), 0)));
        }
    for (const auto& lt : all)
        for (const auto& lf : all)
            CHECK(connection_image_in_fiber<-1>(w, psi, lt, lf, 0));
}
