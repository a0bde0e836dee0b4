#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "pgcap/greedy.hpp"

using namespace pgcap;

namespace {

Space make_space(unsigned n, std::uint32_t p, std::uint32_t m = 1) {
    return Space(n, Field::make(p, m));
}

Strategy greedy_full(std::uint64_t seed) {
    return Strategy{StrategyKind::GreedyFull, seed, 0};
}

}  // namespace

TEST_CASE("greedy runs in PG(3,2) finish in the known size window") {
    Space s = make_space(3, 2);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        RunResult res = run(s, greedy_full(seed), StatsLevel::Cheap);
        CHECK(res.cap.is_complete());
        CHECK(res.k >= 5);
        CHECK(res.k <= 8);
        auto rep = verify_cap(s, res.cap.points());
        CHECK(rep.is_cap);
        CHECK(rep.is_complete);
    }
}

TEST_CASE("candidate selection") {
    Space s = make_space(3, 2);
    SECTION("all gains equal: smallest uncovered index wins") {
        Cap c(s);
        c.add_point(0);
        auto rng = step_rng(1, 1);
        Strategy st = greedy_full(1);
        // index 0 is the cap point (covered); 1 is the smallest uncovered
        CHECK(select_candidate(c, st, rng) == 1);
    }
    SECTION("sampling with m >= U reproduces the full greedy choice") {
        Space s5 = make_space(3, 5);
        Cap a(s5), b(s5);
        for (PointIndex p : {PointIndex(3), PointIndex(40)}) {
            a.add_point(p);
            b.add_point(p);
        }
        Strategy full = greedy_full(9);
        Strategy sample{StrategyKind::GreedySample, 9,
                        a.uncovered_count()};
        auto rng1 = step_rng(9, 2);
        auto rng2 = step_rng(9, 2);
        CHECK(select_candidate(a, full, rng1) ==
              select_candidate(b, sample, rng2));
    }
    SECTION("selection from a complete cap is rejected") {
        Space s2 = make_space(3, 2);
        RunResult res = run(s2, greedy_full(1), StatsLevel::None);
        auto rng = step_rng(1, 99);
        Strategy st = greedy_full(1);
        CHECK_THROWS_AS(select_candidate(res.cap, st, rng), std::logic_error);
    }
}

TEST_CASE("every strategy terminates with a verified complete cap") {
    Space s = make_space(3, 3);
    for (StrategyKind kind :
         {StrategyKind::GreedyFull, StrategyKind::GreedySample,
          StrategyKind::FirstUncovered}) {
        Strategy st{kind, 5, 0};
        RunResult res = run(s, st, StatsLevel::Cheap);
        INFO(strategy_name(kind));
        CHECK(res.cap.is_complete());
        auto rep = verify_cap(s, res.cap.points());
        CHECK(rep.is_complete);
        CHECK(res.k == res.records.size());
        CHECK(res.k == res.cap.points().size());
        CHECK(res.step_ms.size() == res.k);
    }
}

TEST_CASE("uncovered count strictly decreases") {
    Space s = make_space(3, 5);
    RunResult res = run(s, Strategy{StrategyKind::GreedySample, 11, 16},
                        StatsLevel::Cheap);
    for (std::size_t i = 1; i < res.records.size(); ++i)
        CHECK(res.records[i].u < res.records[i - 1].u);
    CHECK(res.records.front().u == s.num_points());
}

TEST_CASE("greedy gain dominates the averages at every step") {
    for (std::uint32_t q : {3u, 7u}) {
        Space s = make_space(3, q);
        RunResult res = run(s, greedy_full(2), StatsLevel::Full);
        for (const auto& r : res.records) {
            INFO("q=" << q << " w=" << r.w);
            // integer gain >= average <=> gain >= ceil(average)
            REQUIRE(Rat(BigInt(r.delta_chosen)) >= r.delta_aver);
            REQUIRE(r.delta_aver >= r.delta_rigor_value);
            REQUIRE(r.delta_rigor_value >= Rat(1));
            REQUIRE(r.delta_chosen == r.delta_max);  // greedy takes the max
        }
    }
}

TEST_CASE("determinism across worker counts and repeats") {
    Space s = make_space(3, 7);
    RunResult base = run(s, greedy_full(4), StatsLevel::Cheap, 1);
    RunResult again = run(s, greedy_full(4), StatsLevel::Cheap, 1);
    RunResult wide = run(s, greedy_full(4), StatsLevel::Cheap, 8);
    CHECK(base.cap.points() == again.cap.points());
    CHECK(base.cap.points() == wide.cap.points());

    // stats level must not alter the construction either
    RunResult full = run(s, greedy_full(4), StatsLevel::Full, 2);
    CHECK(base.cap.points() == full.cap.points());

    RunResult sampled1 =
        run(s, Strategy{StrategyKind::GreedySample, 21, 0}, StatsLevel::None);
    RunResult sampled2 =
        run(s, Strategy{StrategyKind::GreedySample, 21, 0}, StatsLevel::Full);
    CHECK(sampled1.cap.points() == sampled2.cap.points());
}

TEST_CASE("seeds actually vary the construction") {
    Space s = make_space(3, 5);
    std::set<PointIndex> first_points;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        RunResult res = run(s, greedy_full(seed), StatsLevel::None);
        first_points.insert(res.cap.points().front());
    }
    CHECK(first_points.size() > 1);
}

TEST_CASE("truncation bookkeeping") {
    Space s = make_space(3, 5);
    RunResult res = run(s, greedy_full(1), StatsLevel::Cheap);
    const double th = double(s.num_points());

    SECTION("threshold at theta fires immediately") {
        auto t = truncation_size(res.records, th);
        CHECK(t.w_star == 0);
        CHECK(t.k_bound == th + 1.0);
    }
    SECTION("threshold 1 still bounds the final size") {
        auto t = truncation_size(res.records, 1.0);
        CHECK(t.k_bound >= double(res.k));
    }
    SECTION("default threshold bounds the greedy size") {
        double xi = std::ceil(xi_default(3, 5));
        auto t = truncation_size(res.records, xi);
        CHECK(double(res.k) <= t.k_bound);
    }
    SECTION("thresholds below 1 are rejected") {
        CHECK_THROWS_AS(truncation_size(res.records, 0.25),
                        std::invalid_argument);
    }
}

TEST_CASE("sample size default is resolved and recorded") {
    Space s = make_space(3, 7);
    RunResult res =
        run(s, Strategy{StrategyKind::GreedySample, 2, 0}, StatsLevel::None);
    CHECK(res.resolved_sample_size ==
          4 * std::uint64_t(std::ceil(std::sqrt(double(s.num_points())))));
    CHECK(res.cap.is_complete());
}

TEST_CASE("first-uncovered ignores the seed entirely") {
    Space s = make_space(3, 3);
    RunResult a = run(s, Strategy{StrategyKind::FirstUncovered, 1, 0},
                      StatsLevel::None);
    RunResult b = run(s, Strategy{StrategyKind::FirstUncovered, 999, 0},
                      StatsLevel::None);
    CHECK(a.cap.points() == b.cap.points());
    CHECK(a.cap.points().front() == 0);
}
