#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "pgcap/space.hpp"

using namespace pgcap;

namespace {

Space make_space(unsigned n, std::uint32_t p, std::uint32_t m = 1) {
    return Space(n, Field::make(p, m));
}

}  // namespace

TEST_CASE("point counts") {
    CHECK(theta(3, 2) == 15);
    CHECK(theta(2, 2) == 7);
    CHECK(theta(4, 3) == 121);
    CHECK(theta(2, 3) == 13);
    CHECK(theta(3, 5) == 156);
    CHECK(theta(63, 2) == ~std::uint64_t{0});  // 2^64 - 1 just fits
    CHECK_THROWS_AS(theta(64, 2), std::overflow_error);
    CHECK_THROWS_AS(theta(0, 5), std::invalid_argument);
    CHECK_THROWS_AS(theta(3, 1), std::invalid_argument);
}

TEST_CASE("space model invariants") {
    Space s = make_space(3, 2);
    CHECK(s.num_points() == 15);
    CHECK(s.theta_hyper() == 7);
    Space s43 = make_space(4, 3);
    CHECK(s43.num_points() == 121);
    CHECK(s43.theta_hyper() == 40);
    CHECK_THROWS_AS(make_space(1, 5), std::invalid_argument);
}

TEST_CASE("index/point bijection") {
    SECTION("PG(3,2): indices enumerate the nonzero binary vectors") {
        Space s = make_space(3, 2);
        std::set<PointIndex> seen;
        for (std::uint32_t v = 1; v < 16; ++v) {
            std::vector<Fe> c = {(v >> 3) & 1u, (v >> 2) & 1u, (v >> 1) & 1u,
                                 v & 1u};
            PointIndex i = s.point_to_index(c);
            CHECK(i < 15);
            CHECK(s.point_coords(i) == c);  // already normalized over GF(2)
            seen.insert(i);
        }
        CHECK(seen.size() == 15);
    }
    SECTION("round-trip over all of PG(3,5)") {
        Space s = make_space(3, 5);
        for (PointIndex i = 0; i < s.num_points(); ++i)
            CHECK(s.point_to_index(s.point_coords(i)) == i);
    }
    SECTION("PG(2,3): 26 nonzero vectors collapse to 13 indices") {
        Space s = make_space(2, 3);
        std::map<PointIndex, int> reps;
        for (std::uint32_t v = 1; v < 27; ++v) {
            std::vector<Fe> c = {v / 9, (v / 3) % 3, v % 3};
            ++reps[s.point_to_index(c)];
        }
        CHECK(reps.size() == 13);
        for (auto& [idx, count] : reps) CHECK(count == 2);  // q - 1 scalars
    }
    SECTION("errors") {
        Space s = make_space(3, 2);
        CHECK_THROWS_AS(s.point_coords(15), std::out_of_range);
        std::vector<Fe> zero(4, 0);
        CHECK_THROWS_AS(s.point_to_index(zero), std::invalid_argument);
        CHECK_THROWS_AS(s.normalized(zero), std::invalid_argument);
    }
}

TEST_CASE("normalization is canonical") {
    Space s = make_space(2, 5);
    const Field& f = s.field();
    std::mt19937 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Fe> c(3);
        do {
            for (auto& x : c) x = rng() % 5;
        } while (c[0] == 0 && c[1] == 0 && c[2] == 0);
        for (Fe scalar = 1; scalar < 5; ++scalar) {
            std::vector<Fe> scaled(3);
            for (int i = 0; i < 3; ++i) scaled[i] = f.mul(c[i], scalar);
            CHECK(s.point_to_index(scaled) == s.point_to_index(c));
        }
    }
}

TEST_CASE("line traversal") {
    Space s = make_space(3, 2);
    const PointIndex e1 = s.point_to_index(std::vector<Fe>{1, 0, 0, 0});
    const PointIndex e2 = s.point_to_index(std::vector<Fe>{0, 1, 0, 0});
    const PointIndex e12 = s.point_to_index(std::vector<Fe>{1, 1, 0, 0});

    SECTION("the line through e1 and e2") {
        auto pts = s.line_points(e1, e2);
        REQUIRE(pts.size() == 3);
        std::set<PointIndex> got(pts.begin(), pts.end());
        CHECK(got == std::set<PointIndex>{e1, e2, e12});
    }
    SECTION("degenerate call") {
        CHECK_THROWS_AS(s.line_points(e1, e1), std::invalid_argument);
    }
    SECTION("size is q+1 and endpoints lie on the line, PG(3,7)") {
        Space s7 = make_space(3, 7);
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 1000; ++trial) {
            PointIndex a = rng() % s7.num_points();
            PointIndex b = rng() % s7.num_points();
            if (a == b) continue;
            auto pts = s7.line_points(a, b);
            REQUIRE(pts.size() == 8);
            std::set<PointIndex> set(pts.begin(), pts.end());
            REQUIRE(set.size() == 8);  // no repeats
            CHECK(set.count(a) == 1);
            CHECK(set.count(b) == 1);
            // a line is a point set: both orientations agree
            auto rev = s7.line_points(b, a);
            CHECK(std::set<PointIndex>(rev.begin(), rev.end()) == set);
        }
    }
}

TEST_CASE("collinearity") {
    Space s = make_space(3, 2);
    const PointIndex e1 = s.point_to_index(std::vector<Fe>{1, 0, 0, 0});
    const PointIndex e2 = s.point_to_index(std::vector<Fe>{0, 1, 0, 0});
    const PointIndex e3 = s.point_to_index(std::vector<Fe>{0, 0, 1, 0});
    const PointIndex e12 = s.point_to_index(std::vector<Fe>{1, 1, 0, 0});

    CHECK(s.collinear(e1, e2, e12));
    CHECK_FALSE(s.collinear(e1, e2, e3));
    CHECK_THROWS_AS(s.collinear(e1, e1, e2), std::invalid_argument);

    SECTION("rank method agrees with line membership on all PG(2,3) triples") {
        Space s3 = make_space(2, 3);
        const PointIndex n = s3.num_points();
        for (PointIndex a = 0; a < n; ++a)
            for (PointIndex b = a + 1; b < n; ++b) {
                auto line = s3.line_points(a, b);
                for (PointIndex c = b + 1; c < n; ++c) {
                    bool member = std::find(line.begin(), line.end(), c) !=
                                  line.end();
                    REQUIRE(s3.collinear(a, b, c) == member);
                }
            }
    }
}

TEST_CASE("incidence counts") {
    SECTION("theta_{N-1,q} lines pass through every point, N=3, q <= 5") {
        for (std::uint32_t q : {2u, 3u, 5u}) {
            Space s = make_space(3, q);
            const std::uint64_t expected = s.theta_hyper();  // q^2+q+1
            for (PointIndex p = 0; p < s.num_points(); ++p) {
                std::vector<bool> seen(s.num_points(), false);
                std::uint64_t lines = 0;
                for (PointIndex x = 0; x < s.num_points(); ++x) {
                    if (x == p || seen[x]) continue;
                    ++lines;
                    for (PointIndex y : s.line_points(p, x))
                        if (y != p) seen[y] = true;
                }
                REQUIRE(lines == expected);
            }
        }
    }
    SECTION("two distinct points lie on exactly one line, PG(2,3)") {
        Space s = make_space(2, 3);
        const PointIndex n = s.num_points();
        std::set<std::set<PointIndex>> lines;
        std::map<std::pair<PointIndex, PointIndex>, int> pair_count;
        for (PointIndex a = 0; a < n; ++a)
            for (PointIndex b = a + 1; b < n; ++b) {
                auto pts = s.line_points(a, b);
                lines.insert(std::set<PointIndex>(pts.begin(), pts.end()));
            }
        CHECK(lines.size() == 13);  // PG(2,3) is self-dual
        for (const auto& line : lines) {
            CHECK(line.size() == 4);
            for (auto i = line.begin(); i != line.end(); ++i)
                for (auto j = std::next(i); j != line.end(); ++j)
                    ++pair_count[{*i, *j}];
        }
        CHECK(pair_count.size() == std::size_t(13 * 12 / 2));
        for (auto& [pair, cnt] : pair_count) CHECK(cnt == 1);
    }
}

TEST_CASE("scan_line visits the whole line except the direction point") {
    Space s = make_space(3, 3);
    const PointIndex a = 5, b = 31;
    auto line = s.line_points(a, b);
    std::vector<PointIndex> scanned;
    s.scan_line(s.coords_raw(a), s.coords_raw(b),
                [&](PointIndex i) { scanned.push_back(i); });
    CHECK(scanned.size() == 3);
    for (PointIndex i : scanned) {
        CHECK(i != b);
        CHECK(std::find(line.begin(), line.end(), i) != line.end());
    }
    CHECK(std::set<PointIndex>(scanned.begin(), scanned.end()).size() == 3);
}

TEST_CASE("extension-field spaces work the same way") {
    Space s = make_space(2, 2, 2);  // PG(2,4)
    CHECK(s.num_points() == 21);
    for (PointIndex i = 0; i < s.num_points(); ++i)
        CHECK(s.point_to_index(s.point_coords(i)) == i);
    auto pts = s.line_points(0, 20);
    CHECK(pts.size() == 5);
}
