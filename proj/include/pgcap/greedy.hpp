#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgcap/analytics.hpp"
#include "pgcap/cap.hpp"
#include "pgcap/check.hpp"
#include "pgcap/space.hpp"

namespace pgcap {

enum class StrategyKind { GreedyFull, GreedySample, FirstUncovered };

inline const char* strategy_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::GreedyFull: return "greedy-full";
        case StrategyKind::GreedySample: return "greedy-sample";
        case StrategyKind::FirstUncovered: return "first-uncovered";
    }
    return "?";
}

inline StrategyKind strategy_from_name(const std::string& s) {
    if (s == "greedy-full") return StrategyKind::GreedyFull;
    if (s == "greedy-sample") return StrategyKind::GreedySample;
    if (s == "first-uncovered") return StrategyKind::FirstUncovered;
    throw std::invalid_argument("unknown strategy: " + s);
}

// Candidate selection policy. sample_size applies to greedy-sample only;
// 0 picks the default 4 * ceil(sqrt(theta)). greedy-sample with
// sample_size >= U degenerates to greedy-full at that step.
struct Strategy {
    StrategyKind kind = StrategyKind::GreedyFull;
    std::uint64_t seed = 0;
    std::uint64_t sample_size = 0;
};

enum class StatsLevel { None, Cheap, Full };

namespace rng_detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace rng_detail

// All randomness flows from the strategy seed through one documented rule:
// step w uses an mt19937_64 seeded with splitmix64(seed ^ splitmix64(w+1)).
// Draws use multiply-shift rejection, so results do not depend on the
// platform's distribution implementation.
inline std::mt19937_64 step_rng(std::uint64_t seed, std::uint64_t w) {
    return std::mt19937_64(
        rng_detail::splitmix64(seed ^ rng_detail::splitmix64(w + 1)));
}

// Unbiased draw from [0, n).
inline std::uint64_t bounded(std::mt19937_64& g, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        unsigned __int128 m = (unsigned __int128)g() * n;
        if ((std::uint64_t)m >= threshold) return std::uint64_t(m >> 64);
    }
}

inline std::uint64_t default_sample_size(const Space& sp) {
    return 4 * (std::uint64_t)std::ceil(std::sqrt((double)sp.num_points()));
}

namespace greedy_detail {

// Distinct uniform ranks in [0, u) via Floyd's sampling, then mapped to the
// rank-th uncovered point. Ascending order keeps the tie rule (smallest
// point index wins) independent of draw order.
inline std::vector<PointIndex> sample_uncovered(const Cap& cap,
                                                std::uint64_t count,
                                                std::mt19937_64& rng) {
    const std::uint64_t u = cap.uncovered_count();
    count = std::min(count, u);
    std::vector<std::uint64_t> ranks;
    ranks.reserve(count);
    for (std::uint64_t j = u - count; j < u; ++j) {
        std::uint64_t r = bounded(rng, j + 1);
        if (std::find(ranks.begin(), ranks.end(), r) != ranks.end())
            ranks.push_back(j);
        else
            ranks.push_back(r);
    }
    std::sort(ranks.begin(), ranks.end());
    std::vector<PointIndex> pts;
    pts.reserve(count);
    for (std::uint64_t r : ranks) pts.push_back(cap.covered().select_unset(r));
    return pts;
}

inline PointIndex argmax_sweep(const SweepStats& sw) { return sw.argmax; }

inline PointIndex pick_sampled(const Cap& cap, std::uint64_t sample_size,
                               std::mt19937_64& rng) {
    auto pts = sample_uncovered(cap, sample_size, rng);
    PointIndex best = pts.front();
    std::uint64_t best_delta = cap.delta(best);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        std::uint64_t d = cap.delta(pts[i]);
        if (d > best_delta) {  // pts ascending, so ties keep the smaller index
            best_delta = d;
            best = pts[i];
        }
    }
    return best;
}

}  // namespace greedy_detail

// Next point under the strategy. For the empty cap every point is an equal
// candidate; the greedy strategies draw it uniformly from the step RNG,
// first-uncovered takes index 0.
inline PointIndex select_candidate(const Cap& cap, const Strategy& st,
                                   std::mt19937_64& rng,
                                   unsigned workers = 1) {
    if (cap.is_complete())
        throw std::logic_error("cannot select from a complete cap");
    const std::uint64_t w = cap.size();
    switch (st.kind) {
        case StrategyKind::FirstUncovered:
            return cap.covered().find_first_unset();
        case StrategyKind::GreedyFull:
            if (w == 0) return bounded(rng, cap.space().num_points());
            return greedy_detail::argmax_sweep(unisecant_sweep(cap, workers));
        case StrategyKind::GreedySample: {
            if (w == 0) return bounded(rng, cap.space().num_points());
            std::uint64_t m = st.sample_size
                                  ? st.sample_size
                                  : default_sample_size(cap.space());
            return greedy_detail::pick_sampled(cap, m, rng);
        }
    }
    throw std::logic_error("unreachable");
}

struct RunResult {
    Cap cap;
    std::vector<StepRecord> records;  // one per added point, pre-move state
    std::uint64_t k = 0;              // final complete-cap size
    std::vector<double> step_ms;      // wall time per step
    Strategy strategy;
    std::uint64_t resolved_sample_size = 0;
};

// The iterative construction: select, add, repeat until every point lies on
// a bisecant. Deterministic for fixed (space, strategy, seed) at any worker
// count: tie-breaks use the smallest point index and worker merges are
// integer sums.
inline RunResult run(const Space& sp, const Strategy& strategy,
                     StatsLevel stats = StatsLevel::Cheap,
                     unsigned workers = 1, const Rat& stats_d = Rat(1)) {
    Strategy st = strategy;
    if (st.kind == StrategyKind::GreedySample && st.sample_size == 0)
        st.sample_size = default_sample_size(sp);

    RunResult res{Cap(sp), {}, 0, {}, st, st.sample_size};
    Cap& cap = res.cap;

    while (!cap.is_complete()) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::uint64_t w = cap.size();
        const std::uint64_t u = cap.uncovered_count();
        auto rng = step_rng(st.seed, w);

        StepRecord rec;
        PointIndex choice;
        std::uint64_t expected_gain = 0;  // from the sweep, when available
        const bool want_full = stats == StatsLevel::Full;
        if (w == 0) {
            if (want_full) rec = initial_step_record(sp, stats_d);
            choice = (st.kind == StrategyKind::FirstUncovered)
                         ? cap.covered().find_first_unset()
                         : bounded(rng, sp.num_points());
            expected_gain = 1;
        } else if (want_full || st.kind == StrategyKind::GreedyFull) {
            SweepStats sw = unisecant_sweep(cap, workers);
            if (want_full) rec = make_step_record(sp, w, u, sw, stats_d);
            switch (st.kind) {
                case StrategyKind::GreedyFull:
                    choice = sw.argmax;
                    break;
                case StrategyKind::GreedySample:
                    choice = greedy_detail::pick_sampled(cap, st.sample_size,
                                                         rng);
                    break;
                case StrategyKind::FirstUncovered:
                    choice = cap.covered().find_first_unset();
                    break;
            }
            expected_gain = sw.delta[choice];
        } else {
            choice = select_candidate(cap, st, rng, workers);
        }

        if (!rec.full) {
            rec.w = w;
            rec.u = u;
            rec.n_dim = sp.dim();
            rec.q = sp.q();
            if (stats != StatsLevel::None) {
                rec.p_w = double(u) / double(sp.num_points());
                rec.e = expectation_E(w, sp.q(), sp.dim(), u);
            }
        }

        const std::uint64_t gained = cap.add_point(choice);
        rec.delta_chosen = gained;
        if (expected_gain)
            PGCAP_CHECK(gained == expected_gain,
                        "incremental gain disagrees with the sweep");
        res.records.push_back(std::move(rec));
        res.step_ms.push_back(
            std::chrono::duration<double, std::milli>(
                std::chrono::steady_clock::now() - t0)
                .count());
    }

    res.k = cap.size();
    PGCAP_CHECK(res.k == res.records.size(), "one record per added point");
    return res;
}

struct Truncation {
    std::uint64_t w_star = 0;  // first w with U_{w+1} <= xi
    double k_bound = 0;        // w_star + 1 + xi
};

// Bookkeeping for the truncated process: once at most xi points remain
// uncovered, at most xi further additions finish the cap.
inline Truncation truncation_size(const std::vector<StepRecord>& records,
                                  double xi) {
    if (xi < 1.0) throw std::invalid_argument("xi must be >= 1");
    if (records.empty()) throw std::invalid_argument("no recorded steps");
    const std::uint64_t k = records.size();
    Truncation out;
    for (std::uint64_t w = 0; w < k; ++w) {
        const double u_next = (w + 1 < k) ? double(records[w + 1].u) : 0.0;
        if (u_next <= xi) {
            out.w_star = w;
            out.k_bound = double(w) + 1.0 + xi;
            return out;
        }
    }
    throw std::logic_error("unreachable: final U is zero");
}

}  // namespace pgcap
