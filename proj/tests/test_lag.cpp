#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <tuple>

#include "weilfq/lag.hpp"
#include "weilfq/rng.hpp"

using namespace weilfq;

namespace {

SpElement random_word(const SympSpace& space, const std::vector<SpElement>& gens, Rng& rng,
                      int len = 14) {
    SpElement g = SpElement::identity(space);
    for (int i = 0; i < len; ++i) g = g * gens[rng.below(gens.size())];
    return g;
}

// p -> q, q -> -p on the m = 1 plane.
SpElement quarter_turn(const SympSpace& w) {
    const FieldSpec* k = w.spec();
    FqMatrix m(k, 2, 2);
    m.at(0, 1) = FieldElement(k, 1);
    m.at(1, 0) = FieldElement(k, -1);
    return SpElement(w, m);
}

}  // namespace

TEST_CASE("census sizes match prod (q^i + 1)") {
    struct Case { int p, f, m; long long expect; };
    for (auto c : {Case{3, 1, 1, 4}, Case{5, 1, 1, 6}, Case{7, 1, 1, 8}, Case{3, 2, 1, 10},
                   Case{3, 1, 2, 40}, Case{5, 1, 2, 156}}) {
        auto k = make_field(c.p, c.f);
        SympSpace w(k, c.m);
        auto all = enumerate_lagrangians(w);
        CHECK(static_cast<long long>(all.size()) == c.expect);
        CHECK(static_cast<long long>(all.size()) == lagrangian_census(k->q, c.m));
        std::set<std::string> uniq;
        for (const auto& l : all) uniq.insert(l.serialize());
        CHECK(uniq.size() == all.size());
    }
}

TEST_CASE("the four lagrangians of (q,m) = (3,1)") {
    auto k = make_field(3, 1);
    SympSpace w(k, 1);
    auto all = enumerate_lagrangians(w);
    REQUIRE(all.size() == 4);
    std::set<std::string> got;
    for (const auto& l : all) got.insert(l.serialize());
    auto line = [&](int a, int b) {
        FqMatrix v(k.get(), 1, 2);
        v.at(0, 0) = FieldElement(k.get(), a);
        v.at(0, 1) = FieldElement(k.get(), b);
        return Lagrangian(w, v).serialize();
    };
    CHECK(got.count(line(1, 0)));  // <p>
    CHECK(got.count(line(0, 1)));  // <q>
    CHECK(got.count(line(1, 1)));  // <p+q>
    CHECK(got.count(line(1, 2)));  // <p+2q>
}

TEST_CASE("coords round-trip on every enumerated lagrangian") {
    for (auto [p, f, m] : {std::tuple{3, 1, 1}, std::tuple{3, 1, 2}, std::tuple{5, 1, 1},
                           std::tuple{3, 2, 1}}) {
        auto k = make_field(p, f);
        SympSpace w(k, m);
        for (const auto& l : enumerate_lagrangians(w)) {
            LagCoords c = to_coords(w, l);
            CHECK(from_coords(w, c) == l);
        }
    }
}

TEST_CASE("from_coords frame examples and error paths") {
    auto k = make_field(3, 1);
    SympSpace w2(k, 2);
    CHECK(from_coords(w2, FqMatrix::identity(k.get(), 2), FqMatrix(k.get(), 2, 2)) ==
          Lagrangian(w2, w2.frame_p()));

    SympSpace w1(k, 1);
    FqMatrix one(k.get(), 1, 1), zero(k.get(), 1, 1);
    one.at(0, 0) = FieldElement(k.get(), 1);
    FqMatrix exp(k.get(), 1, 2);
    exp.at(0, 0) = FieldElement(k.get(), 1);
    exp.at(0, 1) = FieldElement(k.get(), 1);
    CHECK(from_coords(w1, one, one) == Lagrangian(w1, exp));  // <p+q>

    CHECK_THROWS_AS(from_coords(w1, zero, zero), NotCoprime);

    // Symmetry failure needs m >= 2: a = I against a skew b.
    FqMatrix b(k.get(), 2, 2);
    b.at(0, 1) = FieldElement(k.get(), 1);
    b.at(1, 0) = FieldElement(k.get(), -1);
    CHECK_THROWS_AS(from_coords(w2, FqMatrix::identity(k.get(), 2), b), NotSymmetric);
}

TEST_CASE("coords validity matches direct isotropy, brute force at (3,1)") {
    auto k = make_field(3, 1);
    SympSpace w(k, 1);
    int valid = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            FqMatrix ma(k.get(), 1, 1), mb(k.get(), 1, 1);
            ma.at(0, 0) = FieldElement(k.get(), a);
            mb.at(0, 0) = FieldElement(k.get(), b);
            bool ok = true;
            try {
                from_coords(w, ma, mb);
            } catch (const Error&) {
                ok = false;
            }
            // In the plane every line is lagrangian, so validity is (a,b) != 0.
            CHECK(ok == (a != 0 || b != 0));
            if (ok) ++valid;
        }
    CHECK(valid == 8);
}

TEST_CASE("coords validity matches direct isotropy, sampled at (3,2)") {
    auto k = make_field(3, 1);
    SympSpace w(k, 2);
    Rng rng(99);
    for (int it = 0; it < 2000; ++it) {
        FqMatrix a(k.get(), 2, 2), b(k.get(), 2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                a.at(i, j) = FieldElement::from_index(k.get(), rng.below(3));
                b.at(i, j) = FieldElement::from_index(k.get(), rng.below(3));
            }
        bool coords_ok = true;
        try {
            from_coords(w, a, b);
        } catch (const Error&) {
            coords_ok = false;
        }
        FqMatrix ab = FqMatrix::hstack(a, b);
        bool direct_ok = ab.rank() == 2 && (ab * w.gram * ab.transpose()).is_zero();
        CHECK(coords_ok == direct_ok);
    }
}

TEST_CASE("action on lagrangians: identity, quarter turn, transitivity") {
    auto k = make_field(3, 1);
    SympSpace w(k, 1);
    auto all = enumerate_lagrangians(w);
    SpElement id = SpElement::identity(w);
    for (const auto& l : all) CHECK(act(w, id, l) == l);

    SpElement g = quarter_turn(w);
    REQUIRE(is_symplectic(w, g));
    Lagrangian lp(w, w.frame_p());
    Lagrangian lq(w, w.frame_q());
    CHECK(act(w, g, lp) == lq);

    auto grp = group_closure(w, transvection_generators(w), 100);
    std::set<std::string> orbit;
    for (const auto& x : grp) orbit.insert(act(w, x, lp).serialize());
    CHECK(orbit.size() == all.size());
}

TEST_CASE("action is a left action on lagrangians and preserves intersections") {
    auto k = make_field(3, 1);
    SympSpace w(k, 2);
    auto gens = transvection_generators(w);
    auto all = enumerate_lagrangians(w);
    Rng rng(3);
    for (int it = 0; it < 300; ++it) {
        SpElement g = random_word(w, gens, rng);
        SpElement h = random_word(w, gens, rng);
        const Lagrangian& l1 = all[rng.below(all.size())];
        const Lagrangian& l2 = all[rng.below(all.size())];
        CHECK(act(w, g * h, l1) == act(w, g, act(w, h, l1)));
        CHECK(dim_meet(act(w, g, l1), act(w, g, l2)) == dim_meet(l1, l2));
    }
}

TEST_CASE("coordinate action agrees with the direct action") {
    auto k = make_field(3, 1);

    SympSpace w1(k, 1);
    SpElement g = quarter_turn(w1);
    FqMatrix one(k.get(), 1, 1), zero(k.get(), 1, 1);
    one.at(0, 0) = FieldElement(k.get(), 1);
    LagCoords c{one, zero};
    LagCoords moved = act_coords(w1, g, c);
    CHECK(from_coords(w1, moved) == act(w1, g, from_coords(w1, c)));
    CHECK(moved.a == zero);
    CHECK(moved.b == one);

    LagCoords same = act_coords(w1, SpElement::identity(w1), c);
    CHECK(same == c);

    // 1000 random (g, L) pairs at (3,2).
    SympSpace w2(k, 2);
    auto gens = transvection_generators(w2);
    auto all = enumerate_lagrangians(w2);
    Rng rng(17);
    for (int it = 0; it < 1000; ++it) {
        SpElement x = random_word(w2, gens, rng);
        const Lagrangian& l = all[rng.below(all.size())];
        LagCoords lc = to_coords(w2, l);
        CHECK(from_coords(w2, act_coords(w2, x, lc)) == act(w2, x, l));
    }
}

TEST_CASE("meet and join") {
    auto k = make_field(3, 1);
    SympSpace w(k, 2);
    Lagrangian lp(w, w.frame_p());
    Lagrangian lq(w, w.frame_q());

    auto self = meet_join(lp, lp);
    CHECK(self.dim_meet == 2);
    CHECK(self.dim_join == 2);

    auto pq = meet_join(lp, lq);
    CHECK(pq.dim_meet == 0);
    CHECK(pq.dim_join == 4);

    // <p1,p2> n <p1,q2> has dimension 1.
    FqMatrix mixed(k.get(), 2, 4);
    mixed.at(0, 0) = FieldElement(k.get(), 1);
    mixed.at(1, 3) = FieldElement(k.get(), 1);
    auto mj = meet_join(lp, Lagrangian(w, mixed));
    CHECK(mj.dim_meet == 1);
    CHECK(mj.dim_meet + mj.dim_join == 4);

    auto all = enumerate_lagrangians(w);
    for (const auto& l1 : all)
        for (const auto& l2 : all) {
            auto r = meet_join(l1, l2);
            CHECK(r.dim_meet + r.dim_join == 4);
        }
}

TEST_CASE("module pairing of the standard frames") {
    auto k = make_field(3, 1);
    for (int m : {1, 2, 3}) {
        SympSpace w(k, m);
        FqMatrix p = w.frame_p(), q = w.frame_q();
        CHECK(module_form(w, p, q) == FqMatrix::identity(k.get(), m));
        CHECK(module_form(w, q, p) == -FqMatrix::identity(k.get(), m));
        CHECK(module_rank(p) == m);
    }
}

TEST_CASE("module pairing is sesquilinear for matrix scalars") {
    auto k = make_field(3, 1);
    SympSpace w(k, 2);
    Rng rng(31);
    for (int it = 0; it < 200; ++it) {
        FqMatrix u(k.get(), 2, 4), v(k.get(), 2, 4), h(k.get(), 2, 2);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 4; ++j) {
                u.at(i, j) = FieldElement::from_index(k.get(), rng.below(3));
                v.at(i, j) = FieldElement::from_index(k.get(), rng.below(3));
            }
            for (int j = 0; j < 2; ++j) h.at(i, j) = FieldElement::from_index(k.get(), rng.below(3));
        }
        CHECK(module_form(w, h * u, v) == h * module_form(w, u, v));
        CHECK(module_form(w, u, h * v) == module_form(w, u, v) * h.transpose());
        CHECK(module_form(w, v, u) == -module_form(w, u, v).transpose());

        // Scalar compatibility: A(lambda . u, mu . v) = lambda B(u, v) mu^T.
        FqMatrix lam(k.get(), 1, 2), mu(k.get(), 1, 2);
        for (int j = 0; j < 2; ++j) {
            lam.at(0, j) = FieldElement::from_index(k.get(), rng.below(3));
            mu.at(0, j) = FieldElement::from_index(k.get(), rng.below(3));
        }
        FieldElement lhs = form(w, lam * u, mu * v);
        FqMatrix rhs = lam * module_form(w, u, v) * mu.transpose();
        CHECK(lhs == rhs.at(0, 0));
    }
}
