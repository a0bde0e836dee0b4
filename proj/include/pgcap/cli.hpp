#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pgcap/analytics.hpp"
#include "pgcap/cap.hpp"
#include "pgcap/field.hpp"
#include "pgcap/greedy.hpp"
#include "pgcap/io.hpp"
#include "pgcap/space.hpp"

namespace pgcap::cli {

// Exit codes: 0 success/verified, 1 verification failure, 2 usage or file
// format error, 3 resource budget abort.
inline constexpr int kOk = 0;
inline constexpr int kVerifyFailed = 1;
inline constexpr int kUsage = 2;
inline constexpr int kResource = 3;

namespace detail {

inline std::pair<std::uint32_t, std::uint32_t> factor_prime_power(
    std::uint64_t q) {
    if (q < 2 || q > 65536)
        throw std::invalid_argument("q must be in [2, 65536]");
    std::uint64_t p = 0;
    for (std::uint64_t d = 2; d * d <= q; ++d)
        if (q % d == 0) {
            p = d;
            break;
        }
    if (p == 0) return {std::uint32_t(q), 1};  // q itself prime
    std::uint64_t t = q;
    std::uint32_t e = 0;
    while (t % p == 0) {
        t /= p;
        ++e;
    }
    if (t != 1)
        throw std::invalid_argument(std::to_string(q) +
                                    " is not a prime power");
    return {std::uint32_t(p), e};
}

inline bool is_prime_power(std::uint64_t q) {
    try {
        factor_prime_power(q);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

// "a..b" inclusive, or a single value.
inline std::pair<std::uint64_t, std::uint64_t> parse_range(
    const std::string& s) {
    auto pos = s.find("..");
    if (pos == std::string::npos) {
        std::uint64_t v = std::stoull(s);
        return {v, v};
    }
    std::uint64_t lo = std::stoull(s.substr(0, pos));
    std::uint64_t hi = std::stoull(s.substr(pos + 2));
    if (lo > hi) throw std::invalid_argument("empty q range");
    return {lo, hi};
}

// Exact rational from "3", "5/2" or a decimal like "2.5".
inline Rat rat_from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos)
        return Rat(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(BigInt(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    BigInt den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return Rat(BigInt(digits), den);
}

inline StatsLevel stats_from_name(const std::string& s) {
    if (s == "none") return StatsLevel::None;
    if (s == "cheap") return StatsLevel::Cheap;
    if (s == "full") return StatsLevel::Full;
    throw std::invalid_argument("unknown stats level: " + s);
}

inline void check_memory(unsigned n, std::uint64_t q, unsigned workers,
                         std::uint64_t mem_limit_mib, std::ostream& err) {
    std::uint64_t th = theta(n, q);
    if (th >= (std::uint64_t(1) << 32))
        err << "warning: theta = " << th
            << " points; coverage bitset alone needs " << th / 8
            << " bytes\n";
    if (mem_limit_mib == 0) return;
    std::uint64_t need = Space::memory_estimate(n, q, workers);
    if (need > mem_limit_mib * 1024 * 1024)
        throw ResourceError("estimated " + std::to_string(need) +
                            " bytes exceeds memory budget of " +
                            std::to_string(mem_limit_mib) + " MiB");
}

inline std::vector<std::uint64_t> default_sweep_grid(unsigned n) {
    if (n == 3) return {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (n == 4) return {2, 3, 5, 7, 11};
    throw std::invalid_argument(
        "no default sweep grid for N=" + std::to_string(n) +
        "; pass --q-range");
}

}  // namespace detail

struct BuildOutput {
    std::string cap_path;
    std::string stats_path;  // empty if not written
    std::uint64_t k = 0;
    bool ok = false;
};

inline BuildOutput do_build(unsigned n, std::uint64_t q, Strategy strategy,
                            StatsLevel stats, const Rat& stats_d,
                            unsigned workers, std::uint64_t mem_limit_mib,
                            std::string out_prefix, std::ostream& out,
                            std::ostream& err) {
    detail::check_memory(n, q, workers, mem_limit_mib, err);
    auto [p, m] = detail::factor_prime_power(q);
    Space space(n, Field::make(p, m));

    RunResult res = run(space, strategy, stats, workers, stats_d);

    if (out_prefix.empty()) {
        std::ostringstream name;
        name << "cap_N" << n << "_q" << q << "_"
             << strategy_name(strategy.kind) << "_s" << strategy.seed;
        out_prefix = name.str();
    }
    CapMeta meta{strategy_name(strategy.kind), strategy.seed, res.k,
                 strategy.kind == StrategyKind::GreedySample
                     ? res.resolved_sample_size
                     : 0};
    BuildOutput bo;
    bo.cap_path = out_prefix + ".json";
    write_cap_file(bo.cap_path, space, res.cap.points(), meta);
    if (stats == StatsLevel::Full) {
        bo.stats_path = out_prefix + ".stats.csv";
        std::ofstream sf(bo.stats_path, std::ios::binary);
        if (!sf) throw std::runtime_error("cannot write " + bo.stats_path);
        write_stats_csv(sf, res.records);
    }
    bo.k = res.k;
    const double bound = bound_basic(n, q);
    bo.ok = double(res.k) < bound;
    out << n << ' ' << q << ' ' << res.k << ' ' << fmt_double(bound) << ' '
        << (bo.ok ? "true" : "false") << "\n";
    if (stats != StatsLevel::None) {
        // truncated-process bookkeeping next to the achieved size
        const double xi = std::max(1.0, xi_default(n, q));
        auto tr = truncation_size(res.records, xi);
        err << "truncation: xi=" << fmt_double(xi) << " w_star=" << tr.w_star
            << " k_bound=" << fmt_double(tr.k_bound) << " k=" << res.k
            << "\n";
    }
    return bo;
}

inline int do_verify(const std::string& path, std::ostream& out,
                     std::ostream& err) {
    CapFileData d;
    try {
        d = load_cap_file(path);
    } catch (const FileFormatError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    Space space(d.n, Field::make(d.p, d.m, d.irreducible));
    VerifyReport rep = verify_cap_coords(space, d.points);
    for (const auto& v : rep.violations) {
        switch (v.kind) {
            case Violation::Kind::Duplicate:
                out << "violation: duplicate point at positions " << v.a
                    << "," << v.b << "\n";
                break;
            case Violation::Kind::CollinearTriple:
                out << "violation: collinear triple at positions " << v.a
                    << "," << v.b << "," << v.c << "\n";
                break;
            case Violation::Kind::InvalidCoords:
                out << "violation: " << v.detail << " at position " << v.a
                    << "\n";
                break;
        }
    }
    out << "cap: " << (rep.is_cap ? "yes" : "no") << "\n";
    if (rep.is_complete) {
        out << "complete, k=" << d.points.size() << "\n";
        return kOk;
    }
    out << "not complete, U=" << rep.uncovered << "\n";
    return kVerifyFailed;
}

inline int do_bounds(unsigned n, const std::string& q_spec,
                     const std::vector<std::string>& d_list, double xi_explicit,
                     const std::string& out_path, std::ostream& out,
                     std::ostream& err) {
    auto [lo, hi] = detail::parse_range(q_spec);
    std::vector<BoundsRow> rows;
    for (std::uint64_t q = lo; q <= hi; ++q) {
        if (!detail::is_prime_power(q)) continue;
        for (const auto& ds : d_list) {
            double d = rat_to_double(detail::rat_from_string(ds));
            double xi = xi_explicit > 0 ? xi_explicit : xi_default(n, q);
            rows.push_back(make_bounds_row(n, q, d, xi));
        }
    }
    if (rows.empty()) {
        err << "error: no prime powers in the requested range\n";
        return kUsage;
    }
    if (out_path.empty()) {
        write_bounds_csv(out, rows);
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + out_path);
        write_bounds_csv(f, rows);
    }
    return kOk;
}

inline int do_sweep(unsigned n, const std::string& q_spec, Strategy strategy,
                    std::uint64_t seeds, unsigned workers,
                    std::uint64_t mem_limit_mib, const std::string& out_path,
                    std::ostream& out, std::ostream& err) {
    std::vector<std::uint64_t> grid;
    if (q_spec.empty()) {
        grid = detail::default_sweep_grid(n);
    } else {
        auto [lo, hi] = detail::parse_range(q_spec);
        for (std::uint64_t q = lo; q <= hi; ++q)
            if (gf_detail::is_prime(q)) grid.push_back(q);  // primes only
        if (grid.empty()) {
            err << "error: no primes in the requested range\n";
            return kUsage;
        }
    }

    struct Cell {
        std::uint64_t q, seed;
    };
    std::vector<Cell> cells;
    for (std::uint64_t q : grid)
        for (std::uint64_t s = 1; s <= seeds; ++s) cells.push_back({q, s});
    std::vector<SweepRow> rows(cells.size());

    for (std::uint64_t q : grid)
        detail::check_memory(n, q, 1, mem_limit_mib, err);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& c = cells[i];
            SweepRow& row = rows[i];
            row.n = n;
            row.q = c.q;
            row.seed = c.seed;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                auto [p, m] = detail::factor_prime_power(c.q);
                Space space(n, Field::make(p, m));
                Strategy st = strategy;
                st.seed = c.seed;
                RunResult res = run(space, st, StatsLevel::None, 1);
                auto rep = verify_cap(space, res.cap.points());
                row.k = res.k;
                row.bound = bound_basic(n, c.q);
                row.ok = rep.is_complete && double(res.k) < row.bound;
            } catch (const std::exception& e) {
                row.error = e.what();
                row.ok = false;
            }
            row.runtime_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& r : rows)
        if (!r.error.empty())
            err << "cell N=" << r.n << " q=" << r.q << " seed=" << r.seed
                << " failed: " << r.error << "\n";

    std::uint64_t ok_count = 0;
    for (const auto& r : rows) ok_count += r.ok ? 1 : 0;
    if (out_path.empty()) {
        write_sweep_csv(out, rows);
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + out_path);
        write_sweep_csv(f, rows);
        out << "fraction_ok "
            << fmt_double(double(ok_count) / double(rows.size())) << "\n";
    }
    return kOk;
}

// Argument-vector entry point; the binary's main() forwards here. Kept
// re-entrant so tests can drive it in-process.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err) {
    CLI::App app{"greedy complete caps in PG(N,q) and their size bounds"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand(
        "build", "construct one complete cap and write cap file + stats");
    unsigned b_n = 3;
    std::uint64_t b_q = 2;
    std::string b_strategy = "greedy-full";
    std::uint64_t b_m = 0, b_seed = 1, b_mem = 0;
    std::vector<std::string> b_d = {"1"};
    std::string b_stats = "auto", b_out;
    unsigned b_workers = 1;
    build->add_option("--n", b_n, "projective dimension N >= 3")->required();
    build->add_option("--q", b_q, "field order (prime power <= 65536)")
        ->required();
    build->add_option("--strategy", b_strategy,
                      "greedy-full|greedy-sample|first-uncovered");
    build->add_option("--m", b_m, "sample size for greedy-sample");
    build->add_option("--seed", b_seed, "RNG seed");
    build->add_option("--d", b_d, "constant D for the step statistics");
    build->add_option("--stats", b_stats, "none|cheap|full (default: full "
                                          "when theta <= 1e6, else cheap)");
    build->add_option("--out", b_out, "output prefix");
    build->add_option("--workers", b_workers, "sweep worker threads");
    build->add_option("--mem-limit", b_mem, "memory budget in MiB (0 = off)");

    // verify
    auto* verify = app.add_subcommand("verify",
                                      "check a cap file for the cap property "
                                      "and completeness");
    std::string v_path;
    verify->add_option("file", v_path, "cap JSON file")->required();

    // bounds
    auto* bounds = app.add_subcommand(
        "bounds", "evaluate the size bounds over a q range");
    unsigned o_n = 3;
    std::string o_q = "2..37", o_out;
    std::vector<std::string> o_d = {"1"};
    double o_xi = 0;
    bounds->add_option("--n", o_n, "projective dimension N >= 3")->required();
    bounds->add_option("--q,--q-range", o_q, "q or a..b (prime powers)");
    bounds->add_option("--d", o_d, "list of D constants");
    bounds->add_option("--xi", o_xi,
                       "explicit truncation threshold (default: formula)");
    bounds->add_option("--out", o_out, "CSV path (default: stdout)");

    // sweep
    auto* sweep = app.add_subcommand(
        "sweep", "build caps over a (q, seed) grid and compare with bounds");
    unsigned s_n = 3, s_workers = 1;
    std::string s_q, s_strategy = "greedy-full", s_out;
    std::uint64_t s_m = 0, s_seeds = 5, s_mem = 0;
    sweep->add_option("--n", s_n, "projective dimension")->required();
    sweep->add_option("--q-range,--q", s_q,
                      "a..b, primes only (default: desk-scale grid)");
    sweep->add_option("--strategy", s_strategy, "selection strategy");
    sweep->add_option("--m", s_m, "sample size for greedy-sample");
    sweep->add_option("--seeds", s_seeds, "run seeds 1..S per q");
    sweep->add_option("--workers", s_workers, "cells run in this many threads");
    sweep->add_option("--out", s_out, "CSV path (default: stdout)");
    sweep->add_option("--mem-limit", s_mem, "memory budget in MiB (0 = off)");

    std::vector<const char*> argv;
    argv.push_back("pgcap");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg;
        int code = app.exit(e, msg, msg);
        (code == 0 ? out : err) << msg.str();
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (build->parsed()) {
            Strategy st;
            st.kind = strategy_from_name(b_strategy);
            st.seed = b_seed;
            st.sample_size = b_m;
            StatsLevel stats;
            if (b_stats == "auto")
                stats = theta(b_n, b_q) <= 1000000 ? StatsLevel::Full
                                                   : StatsLevel::Cheap;
            else
                stats = detail::stats_from_name(b_stats);
            Rat d = detail::rat_from_string(b_d.front());
            do_build(b_n, b_q, st, stats, d, b_workers, b_mem, b_out, out,
                     err);
            return kOk;
        }
        if (verify->parsed()) return do_verify(v_path, out, err);
        if (bounds->parsed())
            return do_bounds(o_n, o_q, o_d, o_xi, o_out, out, err);
        if (sweep->parsed()) {
            Strategy st;
            st.kind = strategy_from_name(s_strategy);
            st.sample_size = s_m;
            return do_sweep(s_n, s_q, st, s_seeds, s_workers, s_mem, s_out,
                            out, err);
        }
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << "\n";
        return kResource;
    } catch (const FileFormatError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace pgcap::cli
