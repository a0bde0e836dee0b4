#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include "pgcap/cap.hpp"
#include "pgcap/check.hpp"
#include "pgcap/space.hpp"

namespace pgcap {

// Counting identities are theorems; they are evaluated in exact rational
// arithmetic and compared for equality. Bound formulas are display values
// and live in floating point.
using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::rational<BigInt>;

inline double rat_to_double(const Rat& r) {
    return r.numerator().convert_to<double>() /
           r.denominator().convert_to<double>();
}

// Expected number of uncovered points among w(q-1)+1 independently and
// uniformly drawn points, given U uncovered out of theta.
inline Rat expectation_E(std::uint64_t w, std::uint64_t q, unsigned n,
                         std::uint64_t u) {
    const std::uint64_t th = theta(n, q);
    if (u > th) throw std::invalid_argument("U exceeds the point count");
    return Rat(BigInt(w * (q - 1) + 1) * u, BigInt(th));
}

// --- decay product and its exponential envelope ---------------------------

struct FqValue {
    long double value = 0;
    bool hit_zero = false;  // w >= D*Q: a factor reached zero or below
};

// e^{-(w^2+w)/(2DQ)}; upper envelope of the product (1-x < e^-x termwise).
inline long double fq_exp_bound(std::uint64_t w, long double d,
                                long double big_q) {
    const long double wl = (long double)w;
    return std::exp(-(wl * wl + wl) / (2.0L * d * big_q));
}

inline long double fq_exp_bound_weak(std::uint64_t w, long double d,
                                     long double big_q) {
    const long double wl = (long double)w;
    return std::exp(-(wl * wl) / (2.0L * d * big_q));
}

// product over i = 1..w of (1 - i/(D*Q)), in extended precision.
inline FqValue f_q(std::uint64_t w, long double d, long double big_q) {
    const long double dq = d * big_q;
    FqValue out;
    out.value = 1.0L;
    for (std::uint64_t i = 1; i <= w; ++i) {
        long double factor = 1.0L - (long double)i / dq;
        if (factor <= 0.0L) {
            out.value = 0.0L;
            out.hit_zero = true;
            break;
        }
        out.value *= factor;
    }
    if (w >= 1) {
        // envelope sandwich; non-strict here so that values rounding to the
        // same long double at extreme DQ do not trip the check (tests pin
        // the strict form on the working grids)
        const long double tight = fq_exp_bound(w, d, big_q);
        PGCAP_CHECK(out.value <= tight &&
                        tight <= fq_exp_bound_weak(w, d, big_q),
                    "decay product escaped its exponential envelope");
    }
    return out;
}

// Default truncation threshold sqrt(q^{N+1})/(q-1).
inline double xi_default(unsigned n, std::uint64_t q) {
    return std::sqrt(std::pow((double)q, (double)(n + 1))) / (double)(q - 1);
}

// The optimizer-motivated alternative sqrt(D*theta/((q-1) ln theta)),
// exposed for comparison tables.
inline double xi_alternative(unsigned n, std::uint64_t q, double d) {
    const double th = (double)theta(n, q);
    return std::sqrt(d * th / ((double)(q - 1) * std::log(th)));
}

struct WStar {
    std::uint64_t analytic = 0;  // ceil(sqrt(2 D Q ln(theta/xi)) + 1)
    std::uint64_t exact = 0;     // smallest w with f_q(w;D) <= xi/theta
};

// Both the closed-form sufficient step count and the exact one found by
// scanning the monotone product. The closed form can never undershoot.
inline WStar w_star(unsigned n, std::uint64_t q, long double d,
                    long double xi) {
    if (xi < 1.0L) throw std::invalid_argument("xi must be >= 1");
    if (d < 1.0L) throw std::invalid_argument("D must be >= 1");
    const long double th = (long double)theta(n, q);
    const long double big_q = th / (long double)(q - 1);
    long double ln_term = std::log(th / xi);
    if (ln_term < 0.0L) ln_term = 0.0L;

    WStar out;
    out.analytic = (std::uint64_t)std::ceil(
        std::sqrt(2.0L * d * big_q * ln_term) + 1.0L);

    const long double target = xi / th;
    const long double dq = d * big_q;
    long double prod = 1.0L;
    std::uint64_t w = 0;
    do {
        ++w;
        long double factor = 1.0L - (long double)w / dq;
        prod = factor > 0.0L ? prod * factor : 0.0L;
    } while (prod > target);
    out.exact = w;

    PGCAP_CHECK(out.analytic >= out.exact,
                "closed-form step count below the exact scan");
    return out;
}

struct BoundMain {
    double value = 0;      // sqrt(q^{N+1})/(q-1) (sqrt(D (N+1) ln q) + 1) + 2
    double main_term = 0;  // sqrt(D) q^{(N-1)/2} sqrt((N+1) ln q)
};

inline BoundMain bound_main(unsigned n, std::uint64_t q, double d) {
    if (d < 1.0) throw std::invalid_argument("D must be >= 1");
    BoundMain out;
    const double lead = std::sqrt(std::pow((double)q, (double)(n + 1))) /
                        (double)(q - 1);
    out.value = lead * (std::sqrt(d) * std::sqrt((n + 1) * std::log((double)q)) +
                        1.0) +
                2.0;
    out.main_term = std::sqrt(d) * std::pow((double)q, (n - 1) / 2.0) *
                    std::sqrt((n + 1) * std::log((double)q));
    return out;
}

inline double bound_basic(unsigned n, std::uint64_t q) {
    return bound_main(n, q, 1.0).value;
}

// --- per-step quantities ---------------------------------------------------

struct DeltaRigor {
    Rat value;
    bool dense_branch = false;  // U >= theta_{N-1,q}+1-w, the nontrivial case
};

// Cauchy–Schwarz lower bound on the average gain:
// max{1, wU/(theta_{N-1,q}+1-w) - w + 1}.
inline DeltaRigor delta_rigor(std::uint64_t w, std::uint64_t u, unsigned n,
                              std::uint64_t q) {
    if (w < 1) throw std::invalid_argument("delta_rigor needs w >= 1");
    const std::uint64_t th_h = theta(n - 1, q);
    if (w > th_h)
        throw std::domain_error("no tangents remain at this cap size");
    DeltaRigor out;
    const std::uint64_t denom = th_h + 1 - w;
    if (u >= denom) {
        out.dense_branch = true;
        out.value = Rat(BigInt(w) * u, BigInt(denom)) - Rat(BigInt(w) - 1);
    } else {
        out.value = Rat(1);
    }
    return out;
}

struct GammaStats {
    std::uint32_t gamma_min = 0, gamma_max = 0;
    Rat gamma_aver;                       // U/(theta_{N-1,q}+1-w)
    std::uint64_t sum_gamma_sq = 0;
    std::uint64_t t_sigma = 0;            // tangent count
    std::uint64_t gamma_sigma = 0;        // = w * U
    std::vector<std::uint64_t> histogram;
};

// Tangent-line statistics of the current cap via the pencil sweep.
inline GammaStats gamma_stats(const Cap& cap, unsigned workers = 1) {
    SweepStats sw = unisecant_sweep(cap, workers);
    GammaStats out;
    out.gamma_min = sw.gamma_min;
    out.gamma_max = sw.gamma_max;
    out.sum_gamma_sq = sw.sum_gamma_sq;
    out.t_sigma = sw.t_sigma;
    out.gamma_sigma = sw.gamma_sigma;
    out.histogram = sw.gamma_hist;
    out.gamma_aver = sw.t_sigma
                         ? Rat(BigInt(sw.gamma_sigma), BigInt(sw.t_sigma))
                         : Rat(0);
    return out;
}

enum class Region { AbovePhi, Between, BelowUpsilon };

inline const char* region_name(Region r) {
    switch (r) {
        case Region::AbovePhi: return "U>=Phi";
        case Region::Between: return "Phi>U>Upsilon";
        case Region::BelowUpsilon: return "U<=Upsilon";
    }
    return "?";
}

struct PhiUpsilon {
    bool phi_defined = false;  // false when the Phi denominator is <= 0;
                               // the upper branch then cannot certify
    Rat phi;
    Rat upsilon;
};

// Thresholds on U delimiting where the average-gain estimate provably beats
// E/D:  Phi = D(w-1)theta(theta_h+1-w) / (Dw theta - (theta_h+1-w)(w(q-1)+1)),
//       Upsilon = D theta / (w(q-1)+1).
inline PhiUpsilon phi_upsilon(std::uint64_t w, std::uint64_t q, unsigned n,
                              const Rat& d) {
    if (d < Rat(1)) throw std::invalid_argument("D must be >= 1");
    const BigInt th = theta(n, q);
    const BigInt th_h = theta(n - 1, q);
    const BigInt rem = th_h + 1 - BigInt(w);  // tangents per pencil
    const BigInt cand = BigInt(w) * (q - 1) + 1;

    PhiUpsilon out;
    out.upsilon = Rat(d.numerator() * th, d.denominator() * cand);

    const BigInt den_num = d.numerator() * w * th - d.denominator() * rem * cand;
    if (den_num > 0) {
        out.phi_defined = true;
        out.phi = Rat(d.numerator() * (BigInt(w) - 1) * th * rem, den_num);
    }
    return out;
}

inline Region classify_region(std::uint64_t u, const PhiUpsilon& pu) {
    const Rat ur{BigInt(u)};
    if (pu.phi_defined && ur >= pu.phi) return Region::AbovePhi;
    if (ur <= pu.upsilon) return Region::BelowUpsilon;
    return Region::Between;
}

// Snapshot of the state before one addition: the cap has w points and U
// uncovered; delta_chosen is the gain of the point picked next.
struct StepRecord {
    std::uint64_t w = 0;
    std::uint64_t u = 0;
    unsigned n_dim = 0;      // ambient parameters, kept for re-evaluation
    std::uint64_t q = 0;
    double p_w = 0;          // U/theta
    Rat e;                   // expected gain benchmark E_{w,q}
    std::uint64_t delta_chosen = 0;

    bool full = false;       // distribution fields below are populated
    std::uint64_t delta_min = 0, delta_max = 0;
    Rat delta_aver;          // sum gamma^2 / U - w + 1
    Rat delta_rigor_value;
    bool delta_rigor_dense = false;
    double d_min_ratio = 0, d_max_ratio = 0, d_aver_ratio = 0,
           d_rigor_ratio = 0;  // each value / E
    std::uint32_t gamma_min = 0, gamma_max = 0;
    Rat gamma_aver;
    std::uint64_t sum_gamma_sq = 0, t_sigma = 0, gamma_sigma = 0;
    bool gammas_all_equal = false;
    bool phi_defined = false;
    Rat phi;
    Rat upsilon;
    Region region = Region::Between;
};

// Record for the state K_w (w >= 1) from a completed tangent sweep.
inline StepRecord make_step_record(const Space& sp, std::uint64_t w,
                                   std::uint64_t u, const SweepStats& sw,
                                   const Rat& d_stats) {
    StepRecord r;
    r.w = w;
    r.u = u;
    r.n_dim = sp.dim();
    r.q = sp.q();
    r.p_w = double(u) / double(sp.num_points());
    r.e = expectation_E(w, sp.q(), sp.dim(), u);
    r.full = true;
    r.delta_min = sw.delta_min;
    r.delta_max = sw.delta_max;
    PGCAP_CHECK(u > 0, "step record needs uncovered points");
    r.delta_aver = Rat(BigInt(sw.sum_gamma_sq) - BigInt(w - 1) * u, BigInt(u));
    PGCAP_CHECK(r.delta_aver >= Rat(1), "average gain below 1");
    auto dr = delta_rigor(w, u, sp.dim(), sp.q());
    r.delta_rigor_value = dr.value;
    r.delta_rigor_dense = dr.dense_branch;
    const double ed = rat_to_double(r.e);
    r.d_min_ratio = double(r.delta_min) / ed;
    r.d_max_ratio = double(r.delta_max) / ed;
    r.d_aver_ratio = rat_to_double(r.delta_aver) / ed;
    r.d_rigor_ratio = rat_to_double(r.delta_rigor_value) / ed;
    r.gamma_min = sw.gamma_min;
    r.gamma_max = sw.gamma_max;
    r.gamma_aver = sw.t_sigma ? Rat(BigInt(sw.gamma_sigma), BigInt(sw.t_sigma))
                              : Rat(0);
    r.sum_gamma_sq = sw.sum_gamma_sq;
    r.t_sigma = sw.t_sigma;
    r.gamma_sigma = sw.gamma_sigma;
    r.gammas_all_equal = sw.t_sigma > 0 && sw.gamma_min == sw.gamma_max;
    auto pu = phi_upsilon(w, sp.q(), sp.dim(), d_stats);
    r.phi_defined = pu.phi_defined;
    r.phi = pu.phi;
    r.upsilon = pu.upsilon;
    r.region = classify_region(u, pu);
    return r;
}

// Record for the empty-cap start: no bisecants exist, every point is its
// own sole gain, so the distribution collapses to 1.
inline StepRecord initial_step_record(const Space& sp, const Rat& d_stats) {
    StepRecord r;
    r.w = 0;
    r.u = sp.num_points();
    r.n_dim = sp.dim();
    r.q = sp.q();
    r.p_w = 1.0;
    r.e = Rat(1);
    r.full = true;
    r.delta_min = r.delta_max = 1;
    r.delta_aver = Rat(1);
    r.delta_rigor_value = Rat(1);
    r.d_min_ratio = r.d_max_ratio = r.d_aver_ratio = r.d_rigor_ratio = 1.0;
    auto pu = phi_upsilon(0, sp.q(), sp.dim(), d_stats);
    r.phi_defined = pu.phi_defined;
    r.phi = pu.phi;
    r.upsilon = pu.upsilon;
    r.region = classify_region(r.u, pu);
    return r;
}

// --- conjecture compliance -------------------------------------------------

struct ConjectureRow {
    std::uint64_t w = 0;
    double delta_max_ratio = 0, delta_aver_ratio = 0, delta_rigor_ratio = 0;
    Region region = Region::Between;
    bool certified = false;     // region hypothesis held, so the estimate is
                                // guaranteed, not just observed
    bool max_witness = false;   // delta_max >= E/D (exact comparison)
    bool aver_at_least_e = false;  // delta_aver >= E
};

struct ConjectureReport {
    std::vector<ConjectureRow> rows;
    double certified_fraction = 0;  // over steps w >= 1
    bool all_max_witness = true;
    bool all_aver_at_least_e = true;
};

// Per-step compliance with the expected-gain estimate at constant D:
// whether a witness point with gain >= E/D exists, whether the average gain
// clears E, and how much of the process the threshold regions certify.
inline ConjectureReport conjecture_report(const std::vector<StepRecord>& recs,
                                          const Rat& d) {
    ConjectureReport rep;
    std::uint64_t certified = 0, counted = 0;
    for (const auto& r : recs) {
        if (!r.full)
            throw std::invalid_argument(
                "conjecture report needs full statistics");
        ConjectureRow row;
        row.w = r.w;
        row.delta_max_ratio = r.d_max_ratio;
        row.delta_aver_ratio = r.d_aver_ratio;
        row.delta_rigor_ratio = r.d_rigor_ratio;
        // re-evaluate the thresholds for the requested D
        auto pu = phi_upsilon(r.w, r.q, r.n_dim, d);
        row.region = classify_region(r.u, pu);
        row.certified = row.region != Region::Between;
        // a gain of at least E/D exists iff D * delta_max >= E
        row.max_witness = Rat(BigInt(r.delta_max)) * d >= r.e;
        row.aver_at_least_e = r.delta_aver >= r.e;
        if (r.w >= 1) {
            ++counted;
            certified += row.certified ? 1 : 0;
        }
        rep.all_max_witness &= row.max_witness;
        rep.all_aver_at_least_e &= row.aver_at_least_e;
        rep.rows.push_back(std::move(row));
    }
    rep.certified_fraction = counted ? double(certified) / double(counted) : 0;
    return rep;
}

}  // namespace pgcap
