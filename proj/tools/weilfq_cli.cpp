// Command-line front end: machine-readable verification reports and tables
// for the lagrangian-bundle Weil representation machinery.
//
// Subcommands: lagrangians, gauss-table, connection-verify, cocycle-table,
// character, sl-report, verify-all. JSON is the primary output; --csv is
// available for the tabular commands. Exit codes: 0 = all asserted
// identities passed, 1 = usage error, 2 = an identity failed (a minimal
// counterexample is serialized, replayable via --replay).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "weilfq/report.hpp"

using weilfq::json;

namespace {

struct CliOptions {
    weilfq::RunConfig cfg;
    long long q = 3;
    std::string out;
    std::string replay;
    std::string command;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt, bool wants_m, bool wants_n) {
    cmd->add_option("--q", opt.q, "field size, an odd prime power")->capture_default_str();
    if (wants_m) cmd->add_option("--m", opt.cfg.m, "half-dimension of the symplectic space")
                     ->capture_default_str();
    if (wants_n) cmd->add_option("--n", opt.cfg.n, "SL(n) rank for the exterior-space mode");
    cmd->add_option("--psi-scale", opt.cfg.psi_scale,
                    "value index of the character scale a (psi_a(x) = psi(ax))")
        ->capture_default_str();
    cmd->add_option("--base-point", opt.cfg.base_point,
                    "base lagrangian as \"a;b\" row-major value indices (default <Q>)");
    cmd->add_option("--samples", opt.cfg.samples, "sample count for the sampled suites");
    cmd->add_option("--seed", opt.cfg.seed, "PRNG seed (fixed seed => identical output bytes)")
        ->capture_default_str();
    cmd->add_option("--threads", opt.cfg.threads, "worker count (default 1 or WEILFQ_THREADS)");
    cmd->add_flag("--csv", opt.cfg.csv, "emit CSV instead of JSON (tables only)");
    cmd->add_option("--out", opt.out, "write the report to this path instead of stdout");
}

std::string csv_matrix(const json& m) {
    std::ostringstream os;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) os << ';';
        const json& row = m.at(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) os << ' ';
            if (row.at(j).is_array()) {
                for (std::size_t c = 0; c < row.at(j).size(); ++c) {
                    if (c) os << '.';
                    os << row.at(j).at(c).get<long long>();
                }
            } else {
                os << row.at(j).get<long long>();
            }
        }
    }
    return os.str();
}

std::string csv_list(const json& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ' ';
        os << v.at(i).get<long long>();
    }
    return os.str();
}

void emit(const CliOptions& opt, const std::string& text) {
    if (opt.out.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream f(opt.out);
        if (!f) throw weilfq::Error("cannot open output path " + opt.out);
        f << text << '\n';
    }
}

// First failure across suites, if any, gets written for --replay.
json first_failure(const json& report) {
    if (report.contains("failures") && !report.at("failures").empty())
        return report.at("failures").at(0);
    if (report.contains("suites"))
        for (const auto& [name, suite] : report.at("suites").items()) {
            (void)name;
            if (suite.contains("failures") && !suite.at("failures").empty())
                return suite.at("failures").at(0);
        }
    return json();
}

void write_counterexample(const CliOptions& opt, const json& failure) {
    std::string path = opt.out.empty() ? "counterexample.json" : opt.out + ".counterexample.json";
    std::ofstream f(path);
    if (f) {
        json rec = failure;
        rec["schema"] = 1;
        f << rec.dump(2) << '\n';
        std::cerr << "counterexample written to " << path << '\n';
    }
}

// Math parameters only: worker count is an execution detail and must not
// influence (or appear in) the report bytes.
json config_json(const weilfq::RunConfig& cfg) {
    return json{{"q", cfg.q},           {"m", cfg.m},
                {"n", cfg.n},           {"psi_scale", cfg.psi_scale},
                {"base_point", cfg.base_point}, {"samples", cfg.samples},
                {"seed", cfg.seed}};
}

int run(CliOptions& opt) {
    auto [p, f] = weilfq::factor_prime_power(opt.q);
    opt.cfg.p = p;
    opt.cfg.f = f;
    opt.cfg.q = opt.q;
    if (opt.cfg.threads <= 0) {
        const char* env = std::getenv("WEILFQ_THREADS");
        opt.cfg.threads = env ? std::max(1, std::atoi(env)) : 1;
    }

    json report{{"schema", 1}, {"command", opt.command}, {"config", config_json(opt.cfg)}};
    bool pass = true;

    if (opt.command == "lagrangians") {
        weilfq::Session s(opt.cfg);
        json suite = weilfq::suite_lagrangians(s);
        pass = suite.at("pass").get<bool>();
        if (opt.cfg.csv) {
            std::ostringstream os;
            os << "index,basis\n";
            const json& list = suite.at("lagrangians");
            for (std::size_t i = 0; i < list.size(); ++i)
                os << i << ',' << csv_matrix(list.at(i)) << '\n';
            emit(opt, os.str());
            if (!pass) write_counterexample(opt, first_failure(suite));
            return pass ? 0 : 2;
        }
        report.update(suite);
        if (!pass) write_counterexample(opt, first_failure(suite));
    } else if (opt.command == "connection-verify") {
        weilfq::Session s(opt.cfg);
        json suite = weilfq::suite_connection(s);
        pass = suite.at("pass").get<bool>();
        report.update(suite);
        if (!pass) write_counterexample(opt, first_failure(suite));
    } else if (opt.command == "gauss-table") {
        weilfq::Session s(opt.cfg);
        json suite = weilfq::suite_gauss(s, /*with_table=*/true);
        pass = suite.at("pass").get<bool>();
        if (opt.cfg.csv) {
            std::ostringstream os;
            os << "L,Lp,Lpp,S,k,agree\n";
            for (const auto& row : suite.at("table"))
                os << csv_matrix(row.at("L")) << ',' << csv_matrix(row.at("Lp")) << ','
                   << csv_matrix(row.at("Lpp")) << ',' << csv_list(row.at("S")) << ','
                   << row.at("k").get<int>() << ',' << (row.at("agree").get<bool>() ? 1 : 0)
                   << '\n';
            emit(opt, os.str());
            if (!pass) write_counterexample(opt, first_failure(suite));
            return pass ? 0 : 2;
        }
        report.update(suite);
        if (!pass) write_counterexample(opt, first_failure(suite));
    } else if (opt.command == "cocycle-table") {
        weilfq::Session s(opt.cfg);
        json suite = weilfq::suite_cocycle(s);
        pass = suite.at("pass").get<bool>();
        // Entry table for external inspection.
        {
            const weilfq::SympSpace& w = *s.space;
            weilfq::WeilRep rep(w, s.psi, s.base_point());
            auto gens = weilfq::transvection_generators(w);
            std::vector<weilfq::SpElement> elems;
            const long long order = weilfq::sp_group_order(s.field->q, opt.cfg.m);
            if (order <= 60) {
                elems = weilfq::group_closure(w, gens, order);
            } else {
                weilfq::Rng rng(opt.cfg.seed + 9);
                for (int i = 0; i < 12; ++i)
                    elems.push_back(weilfq::detail_report::random_word(w, gens, rng));
            }
            json entries = json::array();
            for (const auto& g : elems)
                for (const auto& h : elems) {
                    weilfq::CocycleValue c = weilfq::cocycle(rep, g, h);
                    entries.push_back(
                        {{"g", weilfq::matrix_json(g.matrix())},
                         {"h", weilfq::matrix_json(h.matrix())},
                         {"c_operator", weilfq::complex_json(c.c_operator)},
                         {"c_gauss", weilfq::complex_json(c.gauss_unit())},
                         {"agree", std::abs(c.c_operator - c.gauss_unit()) <= 1e-9}});
                }
            report["entries"] = std::move(entries);
        }
        report.update(suite);
        if (!pass) write_counterexample(opt, first_failure(suite));
    } else if (opt.command == "character") {
        weilfq::Session s(opt.cfg);
        json suite = weilfq::suite_character(s);
        pass = suite.at("pass").get<bool>();
        if (opt.cfg.csv) {
            std::ostringstream os;
            os << "g,chi_re,chi_im,chi_abs\n";
            for (const auto& row : suite.at("entries"))
                os << csv_matrix(row.at("g")) << ',' << row.at("chi").at(0).get<double>() << ','
                   << row.at("chi").at(1).get<double>() << ',' << row.at("abs").get<double>()
                   << '\n';
            emit(opt, os.str());
            return pass ? 0 : 2;
        }
        report.update(suite);
    } else if (opt.command == "sl-report") {
        weilfq::Session s(opt.cfg);
        json suite = weilfq::suite_sl(s);
        pass = suite.at("pass").get<bool>();
        report.update(suite);
    } else if (opt.command == "verify-all") {
        weilfq::Session s(opt.cfg);
        json suites;
        suites["lagrangians"] = weilfq::suite_lagrangians(s);
        suites["connection"] = weilfq::suite_connection(s);
        suites["gauss"] = weilfq::suite_gauss(s, /*with_table=*/false);
        suites["cocycle"] = weilfq::suite_cocycle(s);
        suites["representation"] = weilfq::suite_rep(s);
        if (opt.cfg.n >= 2) suites["sl"] = weilfq::suite_sl(s);
        pass = true;
        for (const auto& [name, suite] : suites.items()) {
            (void)name;
            pass = pass && suite.at("pass").get<bool>();
        }
        report["suites"] = std::move(suites);
        if (!pass) write_counterexample(opt, first_failure(report));
    } else {
        throw weilfq::Error("unknown command " + opt.command);
    }

    report["pass"] = pass;
    emit(opt, report.dump(2));
    return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact verification suites for Weil representations of Sp(2m, F_q) "
                 "built from the lagrangian bundle"};
    app.require_subcommand(0, 1);

    CliOptions opt;
    app.add_option("--replay", opt.replay,
                   "re-run a serialized counterexample file and report its verdict");

    const char* names[] = {"lagrangians", "gauss-table", "connection-verify",
                           "cocycle-table", "character", "sl-report", "verify-all"};
    for (const char* name : names) {
        CLI::App* sub = app.add_subcommand(name, "");
        bool wants_n = std::string(name) == "sl-report" || std::string(name) == "verify-all";
        add_common_flags(sub, opt, /*wants_m=*/true, wants_n);
        sub->callback([&opt, name]() { opt.command = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (!opt.replay.empty()) {
            std::ifstream in(opt.replay);
            if (!in) throw weilfq::Error("cannot open replay file " + opt.replay);
            json rec = json::parse(in);
            json result = weilfq::replay_case(rec);
            std::cout << result.dump(2) << '\n';
            return result.at("pass").get<bool>() ? 0 : 2;
        }
        if (opt.command.empty()) {
            std::cerr << app.help() << '\n';
            return 1;
        }
        return run(opt);
    } catch (const weilfq::NotProportional& e) {
        std::cerr << "identity failure: " << e.what() << '\n';
        return 2;
    } catch (const weilfq::InternalInconsistency& e) {
        std::cerr << "identity failure: " << e.what() << '\n';
        return 2;
    } catch (const weilfq::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
