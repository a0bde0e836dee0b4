#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pgcap/analytics.hpp"
#include "pgcap/cap.hpp"
#include "pgcap/space.hpp"

namespace pgcap {

struct FileFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal form; keeps emitted files byte-stable.
inline std::string fmt_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

inline std::string fmt_rat(const Rat& r) {
    return fmt_double(rat_to_double(r));
}

// --- cap files -------------------------------------------------------------
//
// {version:1, N, q, p, m, irreducible:[c_0..c_m],
//  points:[[c_0..c_N],...], meta:{strategy, seed, steps[, sample_size]}}
// Points are stored as coordinate arrays so the file does not depend on the
// index convention.

struct CapMeta {
    std::string strategy;
    std::uint64_t seed = 0;
    std::uint64_t steps = 0;
    std::uint64_t sample_size = 0;  // 0 = not applicable
};

inline nlohmann::ordered_json cap_to_json(const Space& sp,
                                          const std::vector<PointIndex>& pts,
                                          const CapMeta& meta) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["N"] = sp.dim();
    j["q"] = sp.q();
    j["p"] = sp.field().p();
    j["m"] = sp.field().m();
    j["irreducible"] = sp.field().irreducible();
    auto points = nlohmann::ordered_json::array();
    for (PointIndex p : pts) points.push_back(sp.point_coords(p));
    j["points"] = std::move(points);
    nlohmann::ordered_json jm;
    jm["strategy"] = meta.strategy;
    jm["seed"] = meta.seed;
    jm["steps"] = meta.steps;
    if (meta.sample_size) jm["sample_size"] = meta.sample_size;
    j["meta"] = std::move(jm);
    return j;
}

inline void write_cap_file(const std::string& path, const Space& sp,
                           const std::vector<PointIndex>& pts,
                           const CapMeta& meta) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << cap_to_json(sp, pts, meta).dump(2) << "\n";
}

struct CapFileData {
    unsigned n = 0;
    std::uint64_t q = 0;
    std::uint32_t p = 0, m = 0;
    std::vector<std::uint32_t> irreducible;
    std::vector<std::vector<Fe>> points;  // raw coordinate rows
};

// Structural validation only; geometric validity (range of coordinates,
// zero vectors, cap property) is the verifier's business.
inline CapFileData load_cap_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FileFormatError("cannot open " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FileFormatError("not valid JSON: " + std::string(e.what()));
    }
    try {
        if (j.at("version").get<int>() != 1)
            throw FileFormatError("unsupported cap file version");
        CapFileData d;
        d.n = j.at("N").get<unsigned>();
        d.q = j.at("q").get<std::uint64_t>();
        d.p = j.at("p").get<std::uint32_t>();
        d.m = j.at("m").get<std::uint32_t>();
        d.irreducible = j.at("irreducible").get<std::vector<std::uint32_t>>();
        std::uint64_t q = 1;
        for (std::uint32_t i = 0; i < d.m; ++i) q *= d.p;
        if (q != d.q) throw FileFormatError("q does not equal p^m");
        for (const auto& row : j.at("points")) {
            auto coords = row.get<std::vector<Fe>>();
            if (coords.size() != d.n + 1)
                throw FileFormatError("point with wrong coordinate count");
            d.points.push_back(std::move(coords));
        }
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw FileFormatError("malformed cap file: " + std::string(e.what()));
    }
}

// --- stats CSV ---------------------------------------------------------------

inline const char* stats_csv_header() {
    return "w,U,p_w,E,delta_chosen,delta_min,delta_max,delta_aver,"
           "delta_rigor,gamma_min,gamma_aver,gamma_max,sum_gamma_sq,"
           "T_sigma,Gamma_sigma,Phi,Upsilon,region";
}

inline void write_stats_csv(std::ostream& os,
                            const std::vector<StepRecord>& records) {
    os << stats_csv_header() << "\n";
    for (const auto& r : records) {
        if (!r.full)
            throw std::invalid_argument("stats CSV needs full records");
        os << r.w << ',' << r.u << ',' << fmt_double(r.p_w) << ','
           << fmt_rat(r.e) << ',' << r.delta_chosen << ',' << r.delta_min
           << ',' << r.delta_max << ',' << fmt_rat(r.delta_aver) << ','
           << fmt_rat(r.delta_rigor_value) << ',' << r.gamma_min << ','
           << fmt_rat(r.gamma_aver) << ',' << r.gamma_max << ','
           << r.sum_gamma_sq << ',' << r.t_sigma << ',' << r.gamma_sigma
           << ',' << (r.phi_defined ? fmt_rat(r.phi) : std::string("inf"))
           << ',' << fmt_rat(r.upsilon) << ',' << region_name(r.region)
           << "\n";
    }
}

// --- bounds CSV --------------------------------------------------------------

struct BoundsRow {
    unsigned n = 0;
    std::uint64_t q = 0;
    double d = 1;
    double xi = 1;
    std::uint64_t w_star_analytic = 0;
    std::uint64_t w_star_exact = 0;
    double bound_thm44 = 0;  // w_star_analytic + 1 + xi
    double bound_main = 0;
    double bound_basic = 0;  // bound_main at D = 1
};

inline BoundsRow make_bounds_row(unsigned n, std::uint64_t q, double d,
                                 double xi) {
    BoundsRow row;
    row.n = n;
    row.q = q;
    row.d = d;
    row.xi = xi;
    auto ws = w_star(n, q, (long double)d, (long double)xi);
    row.w_star_analytic = ws.analytic;
    row.w_star_exact = ws.exact;
    row.bound_thm44 = double(ws.analytic) + 1.0 + xi;
    row.bound_main = bound_main(n, q, d).value;
    row.bound_basic = bound_basic(n, q);
    return row;
}

inline void write_bounds_csv(std::ostream& os,
                             const std::vector<BoundsRow>& rows) {
    os << "N,q,D,xi,w_star_analytic,w_star_exact,bound_thm44,bound_main,"
          "bound_basic\n";
    for (const auto& r : rows)
        os << r.n << ',' << r.q << ',' << fmt_double(r.d) << ','
           << fmt_double(r.xi) << ',' << r.w_star_analytic << ','
           << r.w_star_exact << ',' << fmt_double(r.bound_thm44) << ','
           << fmt_double(r.bound_main) << ',' << fmt_double(r.bound_basic)
           << "\n";
}

// --- sweep CSV ---------------------------------------------------------------

struct SweepRow {
    unsigned n = 0;
    std::uint64_t q = 0;
    std::uint64_t seed = 0;
    std::uint64_t k = 0;
    double bound = 0;  // size bound at D = 1
    bool ok = false;   // k < bound and the final cap verified complete
    double runtime_ms = 0;
    std::string error;
};

inline void write_sweep_csv(std::ostream& os,
                            const std::vector<SweepRow>& rows) {
    os << "N,q,seed,k,bound,ok,runtime_ms\n";
    std::uint64_t ok_count = 0;
    for (const auto& r : rows) {
        os << r.n << ',' << r.q << ',' << r.seed << ',' << r.k << ','
           << fmt_double(r.bound) << ',' << (r.ok ? "true" : "false") << ','
           << fmt_double(r.runtime_ms) << "\n";
        ok_count += r.ok ? 1 : 0;
    }
    os << "# fraction_ok="
       << fmt_double(rows.empty() ? 0.0
                                  : double(ok_count) / double(rows.size()))
       << "\n";
}

}  // namespace pgcap
