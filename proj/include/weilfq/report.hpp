#pragma once

#include <json.hpp>

#include <algorithm>
#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "weilfq/bundle.hpp"
#include "weilfq/extrep.hpp"
#include "weilfq/gauss.hpp"
#include "weilfq/lag.hpp"
#include "weilfq/rng.hpp"
#include "weilfq/symp.hpp"
#include "weilfq/weil.hpp"

namespace weilfq {

using json = nlohmann::json;

/**
 * One run's parameters. A fixed config (seed included) produces
 * byte-identical reports; worker count never changes output because case
 * results are assembled in case order.
 */
struct RunConfig {
    int p = 3;
    int f = 1;
    long long q = 3;
    int m = 1;
    int n = 0;                    // sl mode when > 0
    long long psi_scale = 1;      // value index of the character scale
    std::string base_point;       // "a;b" row-major value indices, empty = (0, Id)
    long long samples = 0;        // 0 = per-suite default
    std::uint64_t seed = 12345;
    int threads = 1;
    bool csv = false;
};

inline std::pair<int, int> factor_prime_power(long long q) {
    for (int p = 2; static_cast<long long>(p) * p <= q; ++p) {
        if (q % p == 0) {
            int f = 0;
            long long r = q;
            while (r % p == 0) { r /= p; ++f; }
            if (r != 1) throw NotPrime("q = " + std::to_string(q) + " is not a prime power");
            return {p, f};
        }
    }
    return {static_cast<int>(q), 1};
}

struct Session {
    std::shared_ptr<const FieldSpec> field;
    std::unique_ptr<SympSpace> space;
    PsiChar psi;
    RunConfig cfg;

    explicit Session(RunConfig c)
        : field((check_dims(c), make_field(c.p, c.f))),
          space(std::make_unique<SympSpace>(field, c.m)),
          psi(field, FieldElement::from_index(field.get(), c.psi_scale)),
          cfg(c) {
        if (c.psi_scale % field->q == 0) throw Error("psi scale must be a unit");
    }

    static void check_dims(const RunConfig& c) {
        if (c.m < 1) throw Error("m must be at least 1");
        if (c.n != 0 && (c.n < 2 || c.n > 4))
            throw Error("the SL(n) pipeline supports 2 <= n <= 4 at desk scale");
    }

    Lagrangian base_point() const {
        if (cfg.base_point.empty()) return Lagrangian(*space, space->frame_q());
        return parse_base_point(*space, cfg.base_point);
    }

    static Lagrangian parse_base_point(const SympSpace& w, const std::string& text) {
        auto semi = text.find(';');
        if (semi == std::string::npos)
            throw Error("base point must be \"a;b\" with row-major entries");
        auto parse = [&](const std::string& part) {
            FqMatrix mat(w.spec(), w.m, w.m);
            std::istringstream is(part);
            std::string tok;
            int idx = 0;
            while (std::getline(is, tok, ',')) {
                if (idx >= w.m * w.m) throw Error("base point matrix has too many entries");
                mat.at(idx / w.m, idx % w.m) =
                    FieldElement::from_index(w.spec(), std::stoll(tok));
                ++idx;
            }
            if (idx != w.m * w.m) throw Error("base point matrix has too few entries");
            return mat;
        };
        return from_coords(w, parse(text.substr(0, semi)), parse(text.substr(semi + 1)));
    }
};

// ---------------------------------------------------------------------------
// JSON serialization of core values (external report formats)
// ---------------------------------------------------------------------------

inline json field_elem_json(const FieldElement& x) {
    if (x.spec()->f == 1) return x.coeff(0);
    json t = json::array();
    for (int i = 0; i < x.spec()->f; ++i) t.push_back(x.coeff(i));
    return t;
}

inline json matrix_json(const FqMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(field_elem_json(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline FqMatrix matrix_from_json(const FieldSpec* spec, const json& j) {
    const int rows = static_cast<int>(j.size());
    const int cols = rows ? static_cast<int>(j.at(0).size()) : 0;
    FqMatrix m(spec, rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < cols; ++c) {
            const json& cell = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c));
            if (cell.is_array()) {
                std::vector<int> coeffs;
                for (const auto& v : cell) coeffs.push_back(v.get<int>());
                m.at(i, c) = FieldElement::from_coeffs(spec, coeffs);
            } else {
                m.at(i, c) = FieldElement(spec, cell.get<long long>());
            }
        }
    return m;
}

inline json cyc_json(const CycInt& z) {
    json t = json::array();
    for (long long c : z.coeffs()) t.push_back(c);
    return t;
}

inline json complex_json(const Cx& z) { return json::array({z.real(), z.imag()}); }

inline json scaled_matrix_json(const ScaledMatrix& m) {
    json entries = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(cyc_json(m.at(i, j)));
        entries.push_back(std::move(row));
    }
    return json{{"entries", std::move(entries)},
                {"e", m.e()},
                {"row_labels", m.row_labels()},
                {"col_labels", m.col_labels()}};
}

// ---------------------------------------------------------------------------
// Suite runners
// ---------------------------------------------------------------------------

namespace detail_report {

inline SpElement random_word(const SympSpace& space, const std::vector<SpElement>& gens, Rng& rng,
                             int len = 14) {
    SpElement g = SpElement::identity(space);
    for (int i = 0; i < len; ++i) g = g * gens[rng.below(gens.size())];
    return g;
}

/// Deterministic parallel map: out[i] = fn(i), split across threads.
template <typename Fn>
inline std::vector<bool> parallel_flags(long long count, int threads, Fn&& fn) {
    std::vector<bool> out(static_cast<std::size_t>(count), false);
    if (threads <= 1 || count < 64) {
        for (long long i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
        return out;
    }
    std::vector<std::thread> pool;
    const long long chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const long long lo = t * chunk, hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi]() {
            for (long long i = lo; i < hi; ++i) out[static_cast<std::size_t>(i)] = fn(i);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace detail_report

/// Census and coordinate round-trip.
inline json suite_lagrangians(const Session& s) {
    auto all = enumerate_lagrangians(*s.space);
    const long long expected = lagrangian_census(s.field->q, s.cfg.m);
    bool roundtrip = true;
    json failures = json::array();
    for (const auto& l : all) {
        if (!(from_coords(*s.space, to_coords(*s.space, l)) == l)) {
            roundtrip = false;
            if (failures.empty())
                failures.push_back({{"suite", "census_roundtrip"},
                                    {"q", s.field->q},
                                    {"m", s.cfg.m},
                                    {"inputs", {{"L", matrix_json(l.basis())}}}});
        }
    }
    json list = json::array();
    for (const auto& l : all) list.push_back(matrix_json(l.basis()));
    const bool pass = (static_cast<long long>(all.size()) == expected) && roundtrip;
    return json{{"count", all.size()},       {"expected_count", expected},
                {"roundtrip_ok", roundtrip}, {"lagrangians", std::move(list)},
                {"pass", pass},              {"failures", std::move(failures)}};
}

/// Connection laws: identity, inverse, composition multiplier, equivariance.
inline json suite_connection(const Session& s) {
    const SympSpace& w = *s.space;
    auto all = enumerate_lagrangians(w);
    const long long nl = static_cast<long long>(all.size());
    json failures = json::array();
    auto record = [&](const char* suite, json inputs) {
        if (failures.size() < 1)
            failures.push_back({{"suite", suite},
                                {"q", s.field->q},
                                {"m", s.cfg.m},
                                {"psi_scale", s.cfg.psi_scale},
                                {"inputs", std::move(inputs)}});
    };

    // Immutable gamma table over all ordered pairs (by census index).
    std::vector<ScaledMatrix> gammas(static_cast<std::size_t>(nl * nl));
    {
        auto built = detail_report::parallel_flags(nl * nl, s.cfg.threads, [&](long long idx) {
            gammas[static_cast<std::size_t>(idx)] =
                gamma_matrix(w, s.psi, all[static_cast<std::size_t>(idx / nl)],
                             all[static_cast<std::size_t>(idx % nl)]);
            return true;
        });
        (void)built;
    }
    auto gamma_at = [&](long long to, long long from) -> const ScaledMatrix& {
        return gammas[static_cast<std::size_t>(to * nl + from)];
    };
    std::unordered_map<std::string, long long> index_of;
    for (long long i = 0; i < nl; ++i) index_of[all[static_cast<std::size_t>(i)].serialize()] = i;

    // (i) and (ii) on all ordered pairs.
    long long pair_checks = 0;
    bool law_i = true, law_ii = true;
    for (long long i = 0; i < nl; ++i) {
        const ScaledMatrix& g = gamma_at(i, i);
        if (!scaled_eq_exact(g, ScaledMatrix::identity(s.field->p, s.field->q, g.rows(), 0))) {
            law_i = false;
            record("connection_i", {{"L", matrix_json(all[static_cast<std::size_t>(i)].basis())}});
        }
    }
    for (long long i = 0; i < nl; ++i)
        for (long long j = 0; j < nl; ++j) {
            ++pair_checks;
            ScaledMatrix back = scaled_mul(gamma_at(i, j), gamma_at(j, i));
            if (!scaled_eq_exact(back,
                                 ScaledMatrix::identity(s.field->p, s.field->q, back.rows(), 0))) {
                law_ii = false;
                record("connection_ii",
                       {{"L", matrix_json(all[static_cast<std::size_t>(i)].basis())},
                        {"Lp", matrix_json(all[static_cast<std::size_t>(j)].basis())}});
            }
        }

    // (iii): exhaustive when feasible (or when --samples covers the total),
    // sampled otherwise.
    const long long total_triples = nl * nl * nl;
    const long long triple_target = s.cfg.samples > 0 ? s.cfg.samples : 10000;
    const bool exhaustive = s.cfg.samples > 0 ? total_triples <= triple_target
                                              : total_triples <= 64000LL;
    const long long triple_count = exhaustive ? total_triples : triple_target;
    Rng trng(s.cfg.seed);
    std::vector<std::array<long long, 3>> triples;
    triples.reserve(static_cast<std::size_t>(triple_count));
    if (exhaustive) {
        for (long long i = 0; i < nl; ++i)
            for (long long j = 0; j < nl; ++j)
                for (long long k = 0; k < nl; ++k) triples.push_back({i, j, k});
    } else {
        for (long long t = 0; t < triple_count; ++t)
            triples.push_back({static_cast<long long>(trng.below(static_cast<std::uint64_t>(nl))),
                               static_cast<long long>(trng.below(static_cast<std::uint64_t>(nl))),
                               static_cast<long long>(trng.below(static_cast<std::uint64_t>(nl)))});
    }
    auto flags = detail_report::parallel_flags(
        static_cast<long long>(triples.size()), s.cfg.threads, [&](long long idx) {
            const auto& t = triples[static_cast<std::size_t>(idx)];
            const Lagrangian& l2 = all[static_cast<std::size_t>(t[0])];
            const Lagrangian& l1 = all[static_cast<std::size_t>(t[1])];
            const Lagrangian& l0 = all[static_cast<std::size_t>(t[2])];
            ScaledMatrix lhs = scaled_mul(gamma_at(t[0], t[1]), gamma_at(t[1], t[2]));
            ScaledCyc mu = multiplier(w, s.psi, l2, l1, l0);
            ScaledMatrix rhs = scaled_scalar_mul(mu.value, gamma_at(t[0], t[2]), mu.e);
            return scaled_eq_exact(lhs, rhs);
        });
    bool law_iii = true;
    for (std::size_t i = 0; i < flags.size(); ++i)
        if (!flags[i]) {
            law_iii = false;
            const auto& t = triples[i];
            record("connection_iii",
                   {{"L2", matrix_json(all[static_cast<std::size_t>(t[0])].basis())},
                    {"L1", matrix_json(all[static_cast<std::size_t>(t[1])].basis())},
                    {"L0", matrix_json(all[static_cast<std::size_t>(t[2])].basis())}});
            break;
        }

    // Equivariance for sampled group elements over all pairs (or sampled pairs).
    auto gens = transvection_generators(w);
    Rng erng(s.cfg.seed + 1);
    bool equivariance = true;
    const int g_count = 20;
    const long long pair_budget = (nl * nl <= 256) ? nl * nl : 256;
    long long equi_checks = 0;
    for (int gi = 0; gi < g_count && equivariance; ++gi) {
        SpElement g = detail_report::random_word(w, gens, erng);
        for (long long pi = 0; pi < pair_budget && equivariance; ++pi) {
            long long a = (nl * nl <= 256) ? pi / nl : static_cast<long long>(erng.below(static_cast<std::uint64_t>(nl)));
            long long b = (nl * nl <= 256) ? pi % nl : static_cast<long long>(erng.below(static_cast<std::uint64_t>(nl)));
            const Lagrangian& lt = all[static_cast<std::size_t>(a)];
            const Lagrangian& lf = all[static_cast<std::size_t>(b)];
            const long long ga = index_of.at(act(w, g, lt).serialize());
            const long long gb = index_of.at(act(w, g, lf).serialize());
            ScaledMatrix lhs = scaled_mul(tau_matrix(w, s.psi, g, lt), gamma_at(a, b));
            ScaledMatrix rhs = scaled_mul(gamma_at(ga, gb), tau_matrix(w, s.psi, g, lf));
            ++equi_checks;
            if (!scaled_eq_exact(lhs, rhs)) {
                equivariance = false;
                record("equivariance", {{"g", matrix_json(g.matrix())},
                                        {"Lt", matrix_json(lt.basis())},
                                        {"Lf", matrix_json(lf.basis())}});
            }
        }
    }

    // Fiber membership of connection images (pointwise, sampled columns).
    bool membership = true;
    if (s.cfg.m == 1) {
        for (const auto& lt : all)
            for (const auto& lf : all)
                if (!connection_image_in_fiber<-1>(w, s.psi, lt, lf, 0)) {
                    membership = false;
                    record("membership",
                           {{"Lt", matrix_json(lt.basis())}, {"Lf", matrix_json(lf.basis())}});
                }
    }

    const bool pass = law_i && law_ii && law_iii && equivariance && membership;
    json out{{"law_i", law_i},
             {"law_ii", law_ii},
             {"law_iii", law_iii},
             {"law_iii_exhaustive", exhaustive},
             {"law_iii_checked", triples.size()},
             {"pair_checks", pair_checks},
             {"equivariance", equivariance},
             {"equivariance_checked", equi_checks},
             {"membership", membership},
             {"pass", pass},
             {"failures", std::move(failures)}};
    // Sample gamma/tau records for external inspection.
    if (nl >= 2) {
        out["sample_gamma"] = scaled_matrix_json(gamma_at(0, 1));
        Rng grng(s.cfg.seed + 7);
        auto tg = detail_report::random_word(w, transvection_generators(w), grng);
        out["sample_tau"] = scaled_matrix_json(tau_matrix(w, s.psi, tg, all[0]));
    }
    return out;
}

/// Gauss sums: three-method agreement and the modulus law; also the table rows.
inline json suite_gauss(const Session& s, bool with_table) {
    const SympSpace& w = *s.space;
    auto all = enumerate_lagrangians(w);
    const long long nl = static_cast<long long>(all.size());
    Lagrangian lp(w, w.frame_p());
    Lagrangian lq(w, w.frame_q());
    json failures = json::array();

    const long long total = nl * nl * nl;
    const long long budget = s.cfg.samples > 0 ? s.cfg.samples : 10000;
    const bool exhaustive = s.cfg.samples > 0 ? total <= budget : total <= 64000LL;
    const long long count = exhaustive ? total : budget;
    Rng rng(s.cfg.seed + 2);

    bool reduction_ok = true, modulus_ok = true;
    json table = json::array();
    for (long long t = 0; t < count; ++t) {
        long long i, j, k;
        if (exhaustive) {
            i = t / (nl * nl);
            j = (t / nl) % nl;
            k = t % nl;
        } else {
            i = static_cast<long long>(rng.below(static_cast<std::uint64_t>(nl)));
            j = static_cast<long long>(rng.below(static_cast<std::uint64_t>(nl)));
            k = static_cast<long long>(rng.below(static_cast<std::uint64_t>(nl)));
        }
        const Lagrangian& l = all[static_cast<std::size_t>(i)];
        const Lagrangian& l1 = all[static_cast<std::size_t>(j)];
        const Lagrangian& l2 = all[static_cast<std::size_t>(k)];
        CycInt direct = geometric_gauss(w, s.psi, l, l1, l2);
        CycInt reduced = gauss_via_reduction(w, s.psi, l, l1, l2);
        const int kexp = modulus_exponent(w, l, l1, l2);
        long long qk = 1;
        for (int e = 0; e < kexp; ++e) qk *= s.field->q;
        const bool agree = (direct == reduced);
        const bool mod_law = (direct.norm_sq() == CycInt(s.field->p, qk));
        if (!agree) {
            reduction_ok = false;
            if (failures.empty())
                failures.push_back({{"suite", "gauss_triple"},
                                    {"q", s.field->q},
                                    {"m", s.cfg.m},
                                    {"psi_scale", s.cfg.psi_scale},
                                    {"inputs",
                                     {{"L", matrix_json(l.basis())},
                                      {"Lp", matrix_json(l1.basis())},
                                      {"Lpp", matrix_json(l2.basis())}}}});
        }
        if (!mod_law) modulus_ok = false;
        if (with_table)
            table.push_back({{"L", matrix_json(l.basis())},
                             {"Lp", matrix_json(l1.basis())},
                             {"Lpp", matrix_json(l2.basis())},
                             {"S", cyc_json(direct)},
                             {"k", kexp},
                             {"agree", agree && mod_law}});
    }

    // Coordinate route against the standard frames, exhaustively.
    bool coords_ok = true;
    for (const auto& l : all) {
        LagCoords c = to_coords(w, l);
        CycInt via_coords = gauss_via_coords(w, s.psi, c);
        CycInt direct = geometric_gauss(w, s.psi, l, lp, lq);
        const int kexp = modulus_exponent(w, l, lp, lq);
        const int rank_law = 3 * w.m - c.a.rank() - c.b.rank();
        if (!(via_coords == direct) || kexp != rank_law) {
            coords_ok = false;
            if (failures.empty())
                failures.push_back({{"suite", "gauss_coords"},
                                    {"q", s.field->q},
                                    {"m", s.cfg.m},
                                    {"psi_scale", s.cfg.psi_scale},
                                    {"inputs", {{"L", matrix_json(l.basis())}}}});
        }
    }

    const bool pass = reduction_ok && modulus_ok && coords_ok;
    json out{{"triple_agreement", reduction_ok},
             {"modulus_law", modulus_ok},
             {"coords_agreement", coords_ok},
             {"triples_checked", count},
             {"exhaustive", exhaustive},
             {"pass", pass},
             {"failures", std::move(failures)}};
    if (with_table) out["table"] = std::move(table);
    return out;
}

/// Operator cocycle against the Gauss phase, plus the 2-cocycle identity.
inline json suite_cocycle(const Session& s) {
    const SympSpace& w = *s.space;
    WeilRep rep(w, s.psi, s.base_point());
    auto gens = transvection_generators(w);
    json failures = json::array();

    std::vector<SpElement> elems;
    bool full_group = false;
    const long long order = sp_group_order(s.field->q, s.cfg.m);
    if (order <= 400) {
        elems = group_closure(w, gens, order);
        full_group = true;
    } else {
        // Sampled mode: the pair loop is quadratic in this count, so it stays
        // fixed; --samples scales the identity-triple sweep below instead.
        Rng rng(s.cfg.seed + 3);
        for (int i = 0; i < 60; ++i)
            elems.push_back(detail_report::random_word(w, gens, rng));
    }

    bool phase_ok = true, exact_any = false;
    long long pairs = 0;
    double worst = 0.0;
    for (const auto& g : elems)
        for (const auto& h : elems) {
            ++pairs;
            CocycleValue c = cocycle(rep, g, h);
            double dev = std::abs(c.c_operator - c.gauss_unit());
            worst = std::max(worst, dev);
            // The printed-order sum must be the conjugate.
            dev = std::max(dev, std::abs(std::conj(c.c_operator) - c.gauss_unit_swapped_order));
            if (c.exact) exact_any = true;
            if (dev > 1e-9) {
                phase_ok = false;
                if (failures.empty())
                    failures.push_back({{"suite", "cocycle_pair"},
                                        {"q", s.field->q},
                                        {"m", s.cfg.m},
                                        {"psi_scale", s.cfg.psi_scale},
                                        {"inputs",
                                         {{"g", matrix_json(g.matrix())},
                                          {"h", matrix_json(h.matrix())}}}});
            }
        }

    Rng rng(s.cfg.seed + 4);
    bool identity_ok = true;
    const long long triples = s.cfg.samples > 0 ? s.cfg.samples : 2000;
    for (long long t = 0; t < triples; ++t) {
        const SpElement& g = elems[rng.below(elems.size())];
        const SpElement& h = elems[rng.below(elems.size())];
        const SpElement& k = elems[rng.below(elems.size())];
        if (!cocycle_identity_check(rep, g, h, k)) {
            identity_ok = false;
            if (failures.empty())
                failures.push_back({{"suite", "cocycle_identity"},
                                    {"q", s.field->q},
                                    {"m", s.cfg.m},
                                    {"psi_scale", s.cfg.psi_scale},
                                    {"inputs",
                                     {{"g", matrix_json(g.matrix())},
                                      {"h", matrix_json(h.matrix())},
                                      {"k", matrix_json(k.matrix())}}}});
        }
    }

    const bool pass = phase_ok && identity_ok;
    return json{{"full_group", full_group},
                {"elements", elems.size()},
                {"pairs_checked", pairs},
                {"phase_formula", phase_ok},
                {"max_deviation", worst},
                {"exact_path_hit", exact_any},
                {"identity_ok", identity_ok},
                {"identity_triples", triples},
                {"pass", pass},
                {"failures", std::move(failures)}};
}

/// Representation sanity: rho(1), unitarity, commutant for m = 1.
inline json suite_rep(const Session& s) {
    const SympSpace& w = *s.space;
    WeilRep rep(w, s.psi, s.base_point());
    auto gens = transvection_generators(w);
    json failures = json::array();

    bool id_ok = scaled_eq_exact(rep.rho(SpElement::identity(w)),
                                 ScaledMatrix::identity(s.field->p, s.field->q, rep.dim(), 0));

    bool unitary_ok = true;
    const long long order = sp_group_order(s.field->q, s.cfg.m);
    std::vector<SpElement> elems;
    if (order <= 400) {
        elems = group_closure(w, gens, order);
    } else {
        Rng rng(s.cfg.seed + 5);
        for (int i = 0; i < 40; ++i) elems.push_back(detail_report::random_word(w, gens, rng));
    }
    for (const auto& g : elems)
        if (!rep.rho_unitary_exact(g)) {
            unitary_ok = false;
            if (failures.empty())
                failures.push_back({{"suite", "unitarity"},
                                    {"q", s.field->q},
                                    {"m", s.cfg.m},
                                    {"inputs", {{"g", matrix_json(g.matrix())}}}});
        }

    json out{{"rho_identity", id_ok},
             {"unitary", unitary_ok},
             {"elements_checked", elems.size()},
             {"pass", id_ok && unitary_ok}};
    if (s.cfg.m == 1) {
        int cd = commutant_dim(rep, gens);
        out["commutant_dim"] = cd;
        out["commutant_expected"] = 2;
        if (cd != 2) out["pass"] = false;
    }
    out["failures"] = std::move(failures);
    return out;
}

/// Character table over the full group (small orders) or sampled words.
inline json suite_character(const Session& s) {
    const SympSpace& w = *s.space;
    WeilRep rep(w, s.psi, s.base_point());
    auto gens = transvection_generators(w);
    const long long order = sp_group_order(s.field->q, s.cfg.m);
    std::vector<SpElement> elems;
    bool full_group = false;
    if (order <= 60000) {
        elems = group_closure(w, gens, order);
        full_group = true;
    } else {
        Rng rng(s.cfg.seed + 6);
        const long long n_elems = s.cfg.samples > 0 ? s.cfg.samples : 500;
        for (long long i = 0; i < n_elems; ++i)
            elems.push_back(detail_report::random_word(w, gens, rng));
    }
    std::sort(elems.begin(), elems.end(),
              [](const SpElement& a, const SpElement& b) { return a.serialize() < b.serialize(); });
    json entries = json::array();
    double sum_sq = 0.0;
    for (const auto& g : elems) {
        Cx chi = rep.character(g);
        sum_sq += std::norm(chi);
        entries.push_back({{"g", matrix_json(g.matrix())},
                           {"chi", complex_json(chi)},
                           {"abs", std::abs(chi)}});
    }
    json out{{"full_group", full_group},
             {"elements", elems.size()},
             {"entries", std::move(entries)},
             {"pass", true}};
    if (full_group) out["norm_sq_average"] = sum_sq / static_cast<double>(elems.size());
    return out;
}

/// SL(n) restriction report.
inline json suite_sl(const Session& s) {
    if (s.cfg.n < 2) throw Error("sl-report needs --n >= 2");
    ExtRestriction r(s.field, s.cfg.n, s.psi);
    const int sample = (s.cfg.n >= 4) ? 4 : 0;
    SlReport rep = commutant_report(r, sample);
    return json{{"n", rep.n},
                {"q", rep.q},
                {"D", rep.dim_w},
                {"fiber_dim", rep.fiber_dim},
                {"commutant_dim", rep.commutant_dim},
                {"span_dim", rep.span_dim},
                {"ratio", rep.ratio},
                {"intertwiner_count", rep.intertwiner_count},
                {"intertwiners_complete", rep.intertwiners_complete},
                {"phi_commutation_ok", rep.phi_commutation_ok},
                {"cocycle_trivial_on_h", rep.cocycle_trivial_on_h},
                {"cocycle_pairs_checked", rep.cocycle_pairs_checked},
                {"pass", rep.phi_commutation_ok && rep.span_dim >= 1 &&
                             rep.span_dim <= rep.commutant_dim}};
}

// ---------------------------------------------------------------------------
// Replay of serialized counterexamples
// ---------------------------------------------------------------------------

inline json replay_case(const json& rec) {
    const long long q = rec.at("q").get<long long>();
    auto [p, f] = factor_prime_power(q);
    RunConfig cfg;
    cfg.p = p;
    cfg.f = f;
    cfg.q = q;
    cfg.m = rec.at("m").get<int>();
    if (rec.contains("psi_scale")) cfg.psi_scale = rec.at("psi_scale").get<long long>();
    Session s(cfg);
    const SympSpace& w = *s.space;
    const json& in = rec.at("inputs");
    const std::string suite = rec.at("suite").get<std::string>();
    auto lag = [&](const char* key) {
        return Lagrangian(w, matrix_from_json(w.spec(), in.at(key)));
    };
    auto sp = [&](const char* key) {
        return SpElement(w, matrix_from_json(w.spec(), in.at(key)));
    };

    bool pass = false;
    if (suite == "connection_i") {
        ScaledMatrix g = gamma_matrix(w, s.psi, lag("L"), lag("L"));
        pass = scaled_eq_exact(g, ScaledMatrix::identity(p, q, g.rows(), 0));
    } else if (suite == "connection_ii") {
        ScaledMatrix back = scaled_mul(gamma_matrix(w, s.psi, lag("L"), lag("Lp")),
                                       gamma_matrix(w, s.psi, lag("Lp"), lag("L")));
        pass = scaled_eq_exact(back, ScaledMatrix::identity(p, q, back.rows(), 0));
    } else if (suite == "connection_iii") {
        Lagrangian l2 = lag("L2"), l1 = lag("L1"), l0 = lag("L0");
        ScaledMatrix lhs =
            scaled_mul(gamma_matrix(w, s.psi, l2, l1), gamma_matrix(w, s.psi, l1, l0));
        ScaledCyc mu = multiplier(w, s.psi, l2, l1, l0);
        pass = scaled_eq_exact(lhs,
                               scaled_scalar_mul(mu.value, gamma_matrix(w, s.psi, l2, l0), mu.e));
    } else if (suite == "equivariance") {
        SpElement g = sp("g");
        Lagrangian lt = lag("Lt"), lf = lag("Lf");
        ScaledMatrix lhs = scaled_mul(tau_matrix(w, s.psi, g, lt), gamma_matrix(w, s.psi, lt, lf));
        ScaledMatrix rhs = scaled_mul(gamma_matrix(w, s.psi, act(w, g, lt), act(w, g, lf)),
                                      tau_matrix(w, s.psi, g, lf));
        pass = scaled_eq_exact(lhs, rhs);
    } else if (suite == "membership") {
        pass = connection_image_in_fiber<-1>(w, s.psi, lag("Lt"), lag("Lf"), 0);
    } else if (suite == "gauss_triple") {
        Lagrangian l = lag("L"), l1 = lag("Lp"), l2 = lag("Lpp");
        pass = geometric_gauss(w, s.psi, l, l1, l2) == gauss_via_reduction(w, s.psi, l, l1, l2);
    } else if (suite == "gauss_coords") {
        Lagrangian l = lag("L");
        Lagrangian fp(w, w.frame_p()), fq(w, w.frame_q());
        pass = gauss_via_coords(w, s.psi, to_coords(w, l)) == geometric_gauss(w, s.psi, l, fp, fq);
    } else if (suite == "cocycle_pair") {
        WeilRep rep(w, s.psi, Lagrangian(w, w.frame_q()));
        CocycleValue c = cocycle(rep, sp("g"), sp("h"));
        pass = std::abs(c.c_operator - c.gauss_unit()) <= 1e-9;
    } else if (suite == "cocycle_identity") {
        WeilRep rep(w, s.psi, Lagrangian(w, w.frame_q()));
        pass = cocycle_identity_check(rep, sp("g"), sp("h"), sp("k"));
    } else if (suite == "unitarity") {
        WeilRep rep(w, s.psi, Lagrangian(w, w.frame_q()));
        pass = rep.rho_unitary_exact(sp("g"));
    } else if (suite == "census_roundtrip") {
        Lagrangian l = lag("L");
        pass = from_coords(w, to_coords(w, l)) == l;
    } else {
        throw Error("replay: unknown suite '" + suite + "'");
    }
    return json{{"suite", suite}, {"q", q}, {"m", cfg.m}, {"pass", pass}};
}

}  // namespace weilfq
