#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pgcap/cli.hpp"

using namespace pgcap;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path test_dir() {
    fs::path dir = fs::temp_directory_path() / "pgcap_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    f << content;
}

// Drop the runtime_ms column (the one timing field) before comparing.
std::string strip_runtime(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        auto cut = line.rfind(',');
        if (!line.empty() && line[0] != '#' && cut != std::string::npos)
            line.resize(cut);
        out << line << "\n";
    }
    return out.str();
}

const char* kFiveCap = R"({
  "version": 1, "N": 3, "q": 2, "p": 2, "m": 1,
  "irreducible": [0, 1],
  "points": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1],[1,1,1,1]],
  "meta": {"strategy": "fixture", "seed": 0, "steps": 5}
})";

}  // namespace

TEST_CASE("build subcommand") {
    fs::path dir = test_dir();
    auto prefix = (dir / "b1").string();
    auto r = run_cli({"build", "--n", "3", "--q", "3", "--seed", "1",
                      "--stats", "full", "--out", prefix});
    REQUIRE(r.code == cli::kOk);
    CHECK(fs::exists(prefix + ".json"));
    CHECK(fs::exists(prefix + ".stats.csv"));

    // summary line: N q k bound ok
    std::istringstream line(r.out);
    unsigned n;
    std::uint64_t q, k;
    double bound;
    std::string ok;
    line >> n >> q >> k >> bound >> ok;
    CHECK(n == 3);
    CHECK(q == 3);
    CHECK(k >= 6);
    CHECK(double(k) < bound);
    CHECK(ok == "true");

    SECTION("repeat runs are byte-identical") {
        auto prefix2 = (dir / "b2").string();
        auto r2 = run_cli({"build", "--n", "3", "--q", "3", "--seed", "1",
                           "--stats", "full", "--out", prefix2});
        REQUIRE(r2.code == cli::kOk);
        CHECK(slurp(prefix + ".json") == slurp(prefix2 + ".json"));
        CHECK(slurp(prefix + ".stats.csv") == slurp(prefix2 + ".stats.csv"));
        CHECK(r.out == r2.out);
    }
    SECTION("the stats CSV carries the exact column set") {
        std::string stats = slurp(prefix + ".stats.csv");
        CHECK(stats.rfind("w,U,p_w,E,delta_chosen,delta_min,delta_max,"
                          "delta_aver,delta_rigor,gamma_min,gamma_aver,"
                          "gamma_max,sum_gamma_sq,T_sigma,Gamma_sigma,Phi,"
                          "Upsilon,region\n",
                          0) == 0);
    }
    SECTION("built caps pass verification") {
        auto v = run_cli({"verify", prefix + ".json"});
        CHECK(v.code == cli::kOk);
        CHECK(v.out.find("complete") != std::string::npos);
    }
    SECTION("truncation bookkeeping is reported next to the size") {
        CHECK(r.err.find("truncation: xi=") != std::string::npos);
        CHECK(r.err.find("k_bound=") != std::string::npos);
    }
}

TEST_CASE("sampled build writes the full statistics table") {
    fs::path dir = test_dir();
    auto prefix = (dir / "sampled13").string();
    auto r = run_cli({"build", "--n", "3", "--q", "13", "--strategy",
                      "greedy-sample", "--m", "64", "--seed", "7", "--stats",
                      "full", "--out", prefix});
    REQUIRE(r.code == cli::kOk);
    std::string stats = slurp(prefix + ".stats.csv");

    // one data row per added point
    std::istringstream line(r.out);
    unsigned n;
    std::uint64_t q, k;
    line >> n >> q >> k;
    CHECK(std::count(stats.begin(), stats.end(), '\n') == 1 + std::ptrdiff_t(k));

    auto v = run_cli({"verify", prefix + ".json"});
    CHECK(v.code == cli::kOk);

    // sample size lands in the cap file metadata
    CHECK(slurp(prefix + ".json").find("\"sample_size\": 64") !=
          std::string::npos);
}

TEST_CASE("smallest build: PG(3,2) with greedy-full") {
    fs::path dir = test_dir();
    auto prefix = (dir / "b32").string();
    auto r = run_cli({"build", "--n", "3", "--q", "2", "--strategy",
                      "greedy-full", "--seed", "1", "--out", prefix});
    REQUIRE(r.code == cli::kOk);
    std::istringstream line(r.out);
    unsigned n;
    std::uint64_t q, k;
    double bound;
    std::string ok;
    line >> n >> q >> k >> bound >> ok;
    CHECK(k >= 5);
    CHECK(k <= 8);
    CHECK(ok == "true");
    CHECK(run_cli({"verify", prefix + ".json"}).code == cli::kOk);
}

TEST_CASE("prime-power fields work end to end") {
    fs::path dir = test_dir();
    auto prefix = (dir / "b9").string();
    auto r = run_cli({"build", "--n", "3", "--q", "9", "--seed", "2",
                      "--out", prefix});
    REQUIRE(r.code == cli::kOk);
    auto v = run_cli({"verify", prefix + ".json"});
    CHECK(v.code == cli::kOk);
    // the defining polynomial (x^2 + 1 over GF(3)) rides along in the file
    CHECK(slurp(prefix + ".json").find("\"irreducible\": [\n    1,\n    0,\n    1\n  ]") !=
          std::string::npos);
}

TEST_CASE("build input validation") {
    CHECK(run_cli({"build", "--n", "3"}).code == cli::kUsage);  // missing q
    CHECK(run_cli({"build", "--n", "3", "--q", "6"}).code == cli::kUsage);
    CHECK(run_cli({"build", "--n", "3", "--q", "2", "--strategy", "bogus"})
              .code == cli::kUsage);
    CHECK(run_cli({"nonsense"}).code == cli::kUsage);
    CHECK(run_cli({}).code == cli::kUsage);
    CHECK(run_cli({"--help"}).code == cli::kOk);
}

TEST_CASE("memory budget aborts cleanly") {
    auto r = run_cli({"build", "--n", "4", "--q", "37", "--mem-limit", "5"});
    CHECK(r.code == cli::kResource);
    CHECK(r.err.find("memory budget") != std::string::npos);
}

TEST_CASE("verify subcommand") {
    fs::path dir = test_dir();

    SECTION("the complete 5-cap fixture verifies with exit 0") {
        fs::path p = dir / "five_cap.json";
        spit(p, kFiveCap);
        auto r = run_cli({"verify", p.string()});
        CHECK(r.code == cli::kOk);
        CHECK(r.out.find("complete, k=5") != std::string::npos);
    }
    SECTION("dropping a point leaves an incomplete cap, exit 1") {
        fs::path p = dir / "four_cap.json";
        spit(p, R"({
          "version": 1, "N": 3, "q": 2, "p": 2, "m": 1,
          "irreducible": [0, 1],
          "points": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],
          "meta": {"strategy": "fixture", "seed": 0, "steps": 4}
        })");
        auto r = run_cli({"verify", p.string()});
        CHECK(r.code == cli::kVerifyFailed);
        CHECK(r.out.find("not complete, U=") != std::string::npos);
    }
    SECTION("an injected collinear triple is witnessed, exit 1") {
        fs::path p = dir / "triple.json";
        spit(p, R"({
          "version": 1, "N": 3, "q": 2, "p": 2, "m": 1,
          "irreducible": [0, 1],
          "points": [[1,0,0,0],[0,1,0,0],[1,1,0,0]],
          "meta": {"strategy": "fixture", "seed": 0, "steps": 3}
        })");
        auto r = run_cli({"verify", p.string()});
        CHECK(r.code == cli::kVerifyFailed);
        CHECK(r.out.find("collinear triple at positions 0,1,2") !=
              std::string::npos);
        CHECK(r.out.find("cap: no") != std::string::npos);
    }
    SECTION("malformed files get a distinct exit code") {
        fs::path p = dir / "broken.json";
        spit(p, "{not json");
        CHECK(run_cli({"verify", p.string()}).code == cli::kUsage);

        fs::path missing_key = dir / "missing.json";
        spit(missing_key, R"({"version": 1, "N": 3})");
        CHECK(run_cli({"verify", missing_key.string()}).code == cli::kUsage);

        fs::path wrong_q = dir / "wrongq.json";
        spit(wrong_q, R"({
          "version": 1, "N": 3, "q": 9, "p": 2, "m": 1,
          "irreducible": [0, 1], "points": [],
          "meta": {}
        })");
        CHECK(run_cli({"verify", wrong_q.string()}).code == cli::kUsage);

        CHECK(run_cli({"verify", (dir / "absent.json").string()}).code ==
              cli::kUsage);
    }
}

TEST_CASE("bounds subcommand") {
    auto r = run_cli({"bounds", "--n", "3", "--q", "2..50", "--d", "1"});
    REQUIRE(r.code == cli::kOk);
    std::istringstream csv(r.out);
    std::string header;
    std::getline(csv, header);
    CHECK(header ==
          "N,q,D,xi,w_star_analytic,w_star_exact,bound_thm44,bound_main,"
          "bound_basic");

    double prev_basic = 0;
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) {
        ++rows;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        unsigned n;
        std::uint64_t q, wa, we;
        double d, xi, thm44, main_v, basic;
        ls >> n >> q >> d >> xi >> wa >> we >> thm44 >> main_v >> basic;
        CHECK(n == 3);
        CHECK(wa >= we);                 // sound step estimate
        CHECK(main_v == basic);          // D = 1 collapses the two bounds
        CHECK(basic > prev_basic);       // monotone in q
        prev_basic = basic;
    }
    // prime powers in 2..50
    CHECK(rows == 23);
}

TEST_CASE("sweep subcommand") {
    auto r = run_cli({"sweep", "--n", "3", "--q", "2..7", "--seeds", "2",
                      "--workers", "2"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.find("N,q,seed,k,bound,ok,runtime_ms") == 0);
    CHECK(r.out.find("# fraction_ok=1\n") != std::string::npos);
    // four primes x two seeds
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1 + 8 + 1);

    SECTION("deterministic rows modulo the timing column") {
        auto r2 = run_cli({"sweep", "--n", "3", "--q", "2..7", "--seeds", "2",
                           "--workers", "1"});
        CHECK(strip_runtime(r.out) == strip_runtime(r2.out));
    }
}
