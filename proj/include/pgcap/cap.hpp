#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pgcap/bitset.hpp"
#include "pgcap/check.hpp"
#include "pgcap/space.hpp"

namespace pgcap {

// Running cap K_w: ordered point list, incrementally maintained coverage
// bitset (a point is covered when it lies on a bisecant; cap points count as
// covered from insertion), and the uncovered count U_w.
//
// Only uncovered points may be added. An uncovered point is never on a
// bisecant, so the no-three-collinear property is preserved automatically.
class Cap {
public:
    explicit Cap(const Space& s)
        : space_(&s),
          covered_(s.num_points()),
          cap_point_(s.num_points()),
          uncovered_(s.num_points()) {}

    const Space& space() const { return *space_; }
    const std::vector<PointIndex>& points() const { return points_; }
    std::uint64_t size() const { return points_.size(); }
    std::uint64_t uncovered_count() const { return uncovered_; }
    bool is_complete() const { return uncovered_ == 0; }
    const Bitset& covered() const { return covered_; }
    const Bitset& cap_points_mask() const { return cap_point_; }
    bool is_covered(PointIndex i) const { return covered_.test(i); }

    // Appends an uncovered point, marks every point on the w new bisecants
    // covered, and returns the number of newly covered points (the head
    // included) — the per-step gain of this choice.
    std::uint64_t add_point(PointIndex a) {
        if (a >= space_->num_points())
            throw std::out_of_range("point index out of range");
        if (covered_.test(a))
            throw std::invalid_argument(
                "point " + std::to_string(a) +
                " is already covered; adding it would break the cap");
        std::uint64_t newly = 1;
        covered_.set(a);
        const std::uint16_t* ca = space_->coords_raw(a);
        for (PointIndex p : points_) {
            space_->scan_line(space_->coords_raw(p), ca, [&](PointIndex i) {
                if (!covered_.test(i)) {
                    covered_.set(i);
                    ++newly;
                }
            });
        }
        points_.push_back(a);
        cap_point_.set(a);
        uncovered_ -= newly;
        return newly;
    }

    // Gain of adding uncovered a to the current (nonempty) cap, without
    // mutation: 1 for the head plus, per cap point, the uncovered points on
    // the connecting tangent line. Two tangents of the same bundle meet only
    // at the head, so nothing is counted twice.
    std::uint64_t delta(PointIndex a) const {
        if (points_.empty())
            throw std::logic_error("delta needs a nonempty cap");
        if (a >= space_->num_points())
            throw std::out_of_range("point index out of range");
        if (covered_.test(a))
            throw std::invalid_argument("delta of a covered point");
        std::uint64_t count = 1;
        const std::uint16_t* ca = space_->coords_raw(a);
        for (PointIndex p : points_) {
            space_->scan_line(space_->coords_raw(p), ca, [&](PointIndex i) {
                if (!covered_.test(i)) ++count;
            });
        }
        const std::uint64_t cand =
            size() * (space_->q() - 1) + 1;  // candidate-set size
        PGCAP_CHECK(count >= 1 && count <= cand, "delta outside [1, w(q-1)+1]");
        return count;
    }

private:
    const Space* space_;
    std::vector<PointIndex> points_;
    Bitset covered_;
    Bitset cap_point_;
    std::uint64_t uncovered_;
};

// One pass over all tangent (one-cap-point) lines of the cap. gamma_j is
// the number of uncovered points on the j-th tangent; every uncovered head
// lies on exactly w tangents, one per cap point, so
//   delta(A) = 1 + sum over tangents through A of (gamma - 1).
// The pass also yields the gamma distribution used by the step statistics.
struct SweepStats {
    std::vector<std::uint32_t> delta;  // indexed by point; 0 for covered
    std::uint64_t t_sigma = 0;         // number of tangents
    std::uint64_t gamma_sigma = 0;     // sum of gamma = w * U
    std::uint64_t sum_gamma_sq = 0;
    std::uint32_t gamma_min = 0, gamma_max = 0;
    std::vector<std::uint64_t> gamma_hist;  // hist[gamma], size q+1
    std::uint64_t sum_delta = 0;       // over uncovered points
    std::uint64_t delta_min = 0, delta_max = 0;
    PointIndex argmax = 0;             // smallest index attaining delta_max
};

namespace cap_detail {

struct WorkerAcc {
    std::vector<std::uint32_t> acc;
    std::vector<std::uint64_t> hist;
    std::uint64_t t = 0, g = 0, g2 = 0;
    std::uint32_t gmin = std::numeric_limits<std::uint32_t>::max(), gmax = 0;
};

inline void sweep_pencils(const Cap& cap, std::size_t first, std::size_t last,
                          WorkerAcc& w) {
    const Space& sp = cap.space();
    const std::uint64_t n_points = sp.num_points();
    const std::uint32_t q = std::uint32_t(sp.q());
    Bitset seen(n_points);
    std::vector<PointIndex> line;
    line.reserve(q);
    std::vector<std::uint8_t> unc;
    unc.reserve(q);

    for (std::size_t pi = first; pi < last; ++pi) {
        const PointIndex p = cap.points()[pi];
        const std::uint16_t* cp = sp.coords_raw(p);
        seen.clear();
        for (PointIndex x = 0; x < n_points; ++x) {
            if (x == p || seen.test(x)) continue;
            line.clear();
            unc.clear();
            bool other_cap = false;
            std::uint32_t gamma = 0;
            sp.scan_line(sp.coords_raw(x), cp, [&](PointIndex i) {
                seen.set(i);
                line.push_back(i);
                bool u = !cap.is_covered(i);
                unc.push_back(u);
                gamma += u;
                other_cap |= cap.cap_points_mask().test(i);
            });
            if (other_cap) continue;  // bisecant; nothing uncovered on it
            ++w.t;
            w.g += gamma;
            w.g2 += std::uint64_t(gamma) * gamma;
            ++w.hist[gamma];
            if (gamma < w.gmin) w.gmin = gamma;
            if (gamma > w.gmax) w.gmax = gamma;
            if (gamma >= 2) {
                for (std::size_t k = 0; k < line.size(); ++k)
                    if (unc[k]) w.acc[line[k]] += gamma - 1;
            }
        }
    }
}

}  // namespace cap_detail

// Every tangent visited exactly once (each belongs to the pencil of its one
// cap point). Partitioning the pencils across workers changes nothing: the
// merge is integer addition. Requires w >= 1.
inline SweepStats unisecant_sweep(const Cap& cap, unsigned workers = 1) {
    const std::uint64_t w = cap.size();
    if (w == 0) throw std::logic_error("sweep needs a nonempty cap");
    const Space& sp = cap.space();
    const std::uint64_t n_points = sp.num_points();
    const std::uint32_t q = std::uint32_t(sp.q());

    if (workers == 0) workers = 1;
    workers = unsigned(std::min<std::uint64_t>(workers, w));

    std::vector<cap_detail::WorkerAcc> accs(workers);
    for (auto& a : accs) {
        a.acc.assign(n_points, 0);
        a.hist.assign(q + 1, 0);
    }

    if (workers == 1) {
        cap_detail::sweep_pencils(cap, 0, w, accs[0]);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) {
            std::size_t first = std::size_t(w * t / workers);
            std::size_t last = std::size_t(w * (t + 1) / workers);
            threads.emplace_back(cap_detail::sweep_pencils, std::cref(cap),
                                 first, last, std::ref(accs[t]));
        }
        for (auto& t : threads) t.join();
    }

    SweepStats out;
    out.gamma_hist.assign(q + 1, 0);
    auto& acc0 = accs[0].acc;
    std::uint32_t gmin = std::numeric_limits<std::uint32_t>::max();
    for (unsigned t = 0; t < workers; ++t) {
        const auto& a = accs[t];
        if (t > 0)
            for (std::uint64_t i = 0; i < n_points; ++i) acc0[i] += a.acc[i];
        for (std::uint32_t g = 0; g <= q; ++g) out.gamma_hist[g] += a.hist[g];
        out.t_sigma += a.t;
        out.gamma_sigma += a.g;
        out.sum_gamma_sq += a.g2;
        if (a.t) {
            gmin = std::min(gmin, a.gmin);
            out.gamma_max = std::max(out.gamma_max, a.gmax);
        }
    }
    out.gamma_min = out.t_sigma ? gmin : 0;

    const std::uint64_t u = cap.uncovered_count();
    PGCAP_CHECK(out.t_sigma == w * (sp.theta_hyper() + 1 - w),
                "tangent count != w(theta_{N-1,q}+1-w)");
    PGCAP_CHECK(out.gamma_sigma == w * u,
                "uncovered-with-multiplicity != w*U");

    out.delta.assign(n_points, 0);
    std::uint64_t dmin = std::numeric_limits<std::uint64_t>::max(), dmax = 0;
    PointIndex argmax = 0;
    for (PointIndex i = 0; i < n_points; ++i) {
        if (cap.is_covered(i)) continue;
        std::uint32_t d = 1 + acc0[i];
        out.delta[i] = d;
        out.sum_delta += d;
        if (d < dmin) dmin = d;
        if (d > dmax) {
            dmax = d;
            argmax = i;
        }
    }
    out.delta_min = u ? dmin : 0;
    out.delta_max = dmax;
    out.argmax = argmax;

    // sum of delta over heads = U + sum gamma(gamma-1), i.e. U(1-w) + sum gamma^2
    PGCAP_CHECK(out.sum_delta == u + out.sum_gamma_sq - out.gamma_sigma,
                "bundle accumulation identity failed");
    return out;
}

// Gains of every uncovered point in one sweep; entry is 0 for covered points.
inline std::vector<std::uint32_t> bulk_delta(const Cap& cap,
                                             unsigned workers = 1) {
    return unisecant_sweep(cap, workers).delta;
}

// --- independent verification -------------------------------------------

struct Violation {
    enum class Kind { Duplicate, CollinearTriple, InvalidCoords } kind;
    std::uint64_t a = 0, b = 0, c = 0;  // witness positions in the input list
    std::string detail;
};

struct VerifyReport {
    bool is_cap = false;
    bool is_complete = false;
    std::uint64_t uncovered = 0;
    std::vector<Violation> violations;
    Bitset covered;  // rebuilt from scratch
};

// Coverage rebuilt from nothing but the point list: mark the points, then
// walk the full line of every pair. Shares no state with Cap's incremental
// path.
inline Bitset coverage_from_scratch(const Space& sp,
                                    const std::vector<PointIndex>& pts) {
    Bitset covered(sp.num_points());
    for (PointIndex p : pts) covered.set(p);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            for (PointIndex x : sp.line_points(pts[i], pts[j])) covered.set(x);
    return covered;
}

// Independent checker for an arbitrary point list: rank-tests all triples
// for collinearity and rebuilds coverage from scratch. Problems are
// reported with witnesses, not thrown.
inline VerifyReport verify_cap(const Space& sp,
                               const std::vector<PointIndex>& pts) {
    VerifyReport rep;
    bool indices_ok = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i] >= sp.num_points()) {
            rep.violations.push_back({Violation::Kind::InvalidCoords, i, 0, 0,
                                      "point index out of range"});
            indices_ok = false;
        }
    }
    if (!indices_ok) return rep;

    // duplicates are reported, then dropped so the geometric checks can run
    std::vector<PointIndex> unique_pts;
    std::vector<std::size_t> position;  // original position of each survivor
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dup = false;
        for (std::size_t j = 0; j < unique_pts.size(); ++j)
            if (unique_pts[j] == pts[i]) {
                rep.violations.push_back({Violation::Kind::Duplicate,
                                          position[j], i, 0,
                                          "duplicate point"});
                dup = true;
                break;
            }
        if (!dup) {
            unique_pts.push_back(pts[i]);
            position.push_back(i);
        }
    }

    bool cap_ok = rep.violations.empty();
    for (std::size_t i = 0; cap_ok && i < unique_pts.size(); ++i)
        for (std::size_t j = i + 1; cap_ok && j < unique_pts.size(); ++j)
            for (std::size_t k = j + 1; k < unique_pts.size(); ++k) {
                if (sp.collinear(unique_pts[i], unique_pts[j],
                                 unique_pts[k])) {
                    rep.violations.push_back({Violation::Kind::CollinearTriple,
                                              position[i], position[j],
                                              position[k],
                                              "collinear triple"});
                    cap_ok = false;
                    break;
                }
            }

    rep.is_cap = rep.violations.empty();
    rep.covered = coverage_from_scratch(sp, unique_pts);
    std::uint64_t cov = rep.covered.count();
    rep.uncovered = sp.num_points() - cov;
    rep.is_complete = rep.is_cap && rep.uncovered == 0;
    return rep;
}

// Same checker for raw coordinate rows: bad coordinates (wrong length, out
// of range, zero vector) become violations instead of exceptions.
inline VerifyReport verify_cap_coords(
    const Space& sp, const std::vector<std::vector<Fe>>& rows) {
    std::vector<PointIndex> pts;
    std::vector<Violation> coord_problems;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        bool ok = row.size() == sp.dim() + 1;
        for (Fe c : row)
            ok = ok && c < sp.q();
        if (ok) {
            bool all_zero = true;
            for (Fe c : row) all_zero = all_zero && c == 0;
            ok = !all_zero;
        }
        if (!ok) {
            coord_problems.push_back({Violation::Kind::InvalidCoords, i, 0, 0,
                                      "invalid coordinate vector"});
            continue;
        }
        pts.push_back(sp.point_to_index(row));
    }
    VerifyReport rep = verify_cap(sp, pts);
    if (!coord_problems.empty()) {
        rep.is_cap = false;
        rep.is_complete = false;
        rep.violations.insert(rep.violations.begin(), coord_problems.begin(),
                              coord_problems.end());
    }
    return rep;
}

}  // namespace pgcap
