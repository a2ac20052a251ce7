#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "clbattery/cli.hpp"

using namespace clbattery;
using namespace clbattery::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "clbattery");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "clbattery_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::size_t column(const ParsedCsv& csv, const std::string& name) {
    const auto it = std::find(csv.columns.begin(), csv.columns.end(), name);
    REQUIRE(it != csv.columns.end());
    return static_cast<std::size_t>(it - csv.columns.begin());
}

std::vector<double> series(const ParsedCsv& csv, const std::string& name) {
    const std::size_t c = column(csv, name);
    std::vector<double> v;
    for (const auto& row : csv.rows) v.push_back(row[c]);
    return v;
}

double report_value(const std::string& report, const std::string& key) {
    std::istringstream lines(report);
    std::string name, value;
    while (lines >> name) {
        std::getline(lines, value);
        if (name == key) return std::stod(value);
    }
    FAIL("missing " << key);
    return 0.0;
}

}  // namespace

TEST_CASE("point reports the efficiency peak values") {
    const auto r = run({"point", "--gamma", "3.8", "--omega0", "2", "--omegac", "4", "--temp", "0.1", "--cutoff",
                        "lorentz-drude"});
    REQUIRE(r.code == kSuccess);
    CHECK(report_value(r.out, "eta") == doctest::Approx(0.065).epsilon(0.005 / 0.065));
    for (const char* key : {"sigma11", "sigma22", "w_c", "w_d", "w_cd", "ergotropy", "t_sigma", "beta_p",
                            "sum_rule_1_residual", "sum_rule_2_residual", "err11", "err22"}) {
        CHECK(r.out.find(key) != std::string::npos);
    }
    const auto t0 = run({"point", "--temp", "0", "--gamma", "5.94", "--omega0", "2", "--omegac", "2"});
    REQUIRE(t0.code == kSuccess);
    CHECK(std::abs(report_value(t0.out, "eta") - 0.1019) <= 0.001);
}

TEST_CASE("point exit codes") {
    const auto zero = run({"point", "--gamma", "0"});
    CHECK(zero.code == kUsage);
    CHECK(zero.err.find("undefined at zero coupling") != std::string::npos);
    CHECK(run({"point", "--gamma", "1", "--cutoff", "gaussian"}).code == kUsage);
    CHECK(run({"point", "--gamma", "-1"}).code == kUsage);
    CHECK(run({"point"}).code == kUsage);
    CHECK(run({"point", "--gamma", "1", "--temp", "-2"}).code == kUsage);
    CHECK(run({"--rel-tol", "1e-16", "point", "--gamma", "3"}).code == kNumerical);
    CHECK(run({"--help"}).code == kSuccess);
}

TEST_CASE("point json output") {
    const auto r = run({"point", "--gamma", "3.8", "--json"});
    REQUIRE(r.code == kSuccess);
    CHECK(r.out.find("\"eta\"") != std::string::npos);
    CHECK(r.out.find("\"parameters\"") != std::string::npos);
}

TEST_CASE("gamma sweep: single peak, round trip, determinism") {
    const auto path = scratch("gamma.csv");
    const std::vector<std::string> args{"sweep", "--param", "gamma", "--from", "0.1", "--to", "20", "--points",
                                        "60", "--temp", "0.1", "--omega0", "2", "--omegac", "4", "--out",
                                        path.string()};
    auto serial = args;
    serial.insert(serial.begin(), {"--jobs", "1"});
    REQUIRE(run(serial).code == kSuccess);
    const std::string first = slurp(path);
    auto parallel = args;
    parallel.insert(parallel.begin(), {"--jobs", "4"});
    REQUIRE(run(parallel).code == kSuccess);
    CHECK(slurp(path) == first);
    CHECK(first.find('\r') == std::string::npos);

    const ParsedCsv csv = read_sweep_csv(path.string());
    CHECK(csv.columns == csv_columns(SweepParameter::Gamma));
    REQUIRE(csv.rows.size() == 60);
    const auto gamma = series(csv, "gamma");
    CHECK(std::is_sorted(gamma.begin(), gamma.end()));
    const auto eta = series(csv, "eta");
    const auto peak = summarize_peak(gamma, eta);
    CHECK(peak.argmax >= 3.3);
    CHECK(peak.argmax <= 4.3);
    CHECK(peak.interior);
    // Single peak: rises then falls.
    const auto top = std::max_element(eta.begin(), eta.end()) - eta.begin();
    for (long k = 1; k <= top; ++k) CHECK(eta[static_cast<std::size_t>(k)] > eta[static_cast<std::size_t>(k - 1)]);
    for (std::size_t k = static_cast<std::size_t>(top) + 1; k < eta.size(); ++k) CHECK(eta[k] < eta[k - 1]);

    for (std::size_t k = 0; k < csv.rows.size(); k += 7) {
        const auto& row = csv.rows[k];
        const PointParams p = with_parameter(csv.spec.fixed, csv.spec.parameter, row[0]);
        const SweepRow again = make_row(row[0], evaluate_point(p, csv.config));
        const double values[] = {again.sigma11, again.sigma22, again.w_c,     again.w_d,   again.w_cd,
                                 again.ergotropy, again.eta,   again.t_sigma, again.beta_p};
        for (std::size_t c = 0; c < 9; ++c) {
            CHECK(std::abs(values[c] - row[c + 1]) <= 1e-9 * std::max(std::abs(row[c + 1]), 1e-300));
        }
        CHECK(row[8] >= -1e-9 * std::max(row[5], 1.0));
    }
}

TEST_CASE("cutoff sweep: monotone work and ergotropy, nonmonotone efficiency") {
    const auto path = scratch("omegac.csv");
    REQUIRE(run({"sweep", "--param", "omegac", "--from", "0.01", "--to", "10", "--points", "40", "--scale", "log",
                 "--gamma", "15", "--temp", "0.1", "--omega0", "2", "--out", path.string()})
                .code == kSuccess);
    const ParsedCsv csv = read_sweep_csv(path.string());
    const auto erg = series(csv, "ergotropy");
    const auto wcd = series(csv, "w_cd");
    const auto eta = series(csv, "eta");
    for (std::size_t k = 1; k < erg.size(); ++k) {
        CHECK(erg[k] > erg[k - 1]);
        CHECK(wcd[k] > wcd[k - 1]);
    }
    CHECK(summarize_peak(series(csv, "omegac"), eta).interior);
}

TEST_CASE("copy sweep maps onto the gamma sweep") {
    const auto copies = scratch("copies.csv");
    const auto gammas = scratch("gammas.csv");
    REQUIRE(run({"sweep", "--param", "n_copies", "--from", "1", "--to", "5", "--points", "5", "--gamma", "0.5",
                 "--out", copies.string()})
                .code == kSuccess);
    REQUIRE(run({"sweep", "--param", "gamma", "--from", "0.5", "--to", "2.5", "--points", "5", "--out",
                 gammas.string()})
                .code == kSuccess);
    const auto a = read_sweep_csv(copies.string());
    const auto b = read_sweep_csv(gammas.string());
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
        CHECK(a.rows[k][0] == static_cast<double>(k + 1));
        for (std::size_t c = 1; c < a.rows[k].size(); ++c) CHECK(a.rows[k][c] == b.rows[k][c]);
    }
}

TEST_CASE("sweep usage errors") {
    const auto path = scratch("never.csv");
    fs::remove(path);
    CHECK(run({"sweep", "--from", "2", "--to", "1", "--out", path.string()}).code == kUsage);
    CHECK(run({"sweep", "--from", "0", "--to", "1", "--scale", "log", "--out", path.string()}).code == kUsage);
    CHECK(run({"sweep", "--param", "n_copies", "--from", "1", "--to", "3", "--points", "10", "--out",
               path.string()})
              .code == kUsage);
    CHECK(run({"sweep", "--param", "mass", "--from", "1", "--to", "3", "--out", path.string()}).code == kUsage);
    CHECK(run({"sweep", "--from", "1", "--to", "3", "--out", "/nonexistent/dir/x.csv"}).code == kUsage);
    CHECK_FALSE(fs::exists(path));
}

TEST_CASE("a failing sweep leaves no file") {
    const auto path = scratch("failing.csv");
    fs::remove(path);
    CHECK(run({"--rel-tol", "1e-15", "sweep", "--from", "0.1", "--to", "20", "--points", "5", "--cutoff",
               "exponential", "--out", path.string()})
              .code == kNumerical);
    CHECK_FALSE(fs::exists(path));
}

TEST_CASE("config file supplies flags and command-line flags win") {
    const auto cfg = scratch("config.json");
    {
        std::ofstream f(cfg);
        f << R"({"command": "point", "gamma": 3.8, "omega0": 2, "omegac": 4, "temp": 0.1, "rel_tol": 1e-9})";
    }
    const auto from_file = run({"--config", cfg.string()});
    REQUIRE(from_file.code == kSuccess);
    const auto direct = run({"--rel-tol", "1e-9", "point", "--gamma", "3.8"});
    CHECK(from_file.out == direct.out);

    const auto overridden = run({"--config", cfg.string(), "point", "--gamma", "14.4"});
    REQUIRE(overridden.code == kSuccess);
    CHECK(report_value(overridden.out, "gamma") == 14.4);

    {
        std::ofstream f(cfg);
        f << R"({"command": "point", "gamma": 1, "colour": "red"})";
    }
    CHECK(run({"--config", cfg.string()}).code == kUsage);
    CHECK(run({"--config", scratch("missing.json").string(), "point", "--gamma", "1"}).code == kUsage);
}

TEST_CASE("verify is deterministic and catches an injected fault") {
    const auto a = run({"--seed", "42", "verify"});
    const auto b = run({"--seed", "42", "--jobs", "3", "verify"});
    CHECK(a.code == kSuccess);
    CHECK(a.out == b.out);
    CHECK(a.out.find("FAIL") == std::string::npos);

    VerifyOptions broken;
    broken.check_tol = 1e-20;
    broken.seed = 42;
    const auto results = run_verification(broken);
    const auto failed = std::count_if(results.begin(), results.end(), [](const CheckResult& r) { return !r.passed; });
    CHECK(failed > 0);
    const auto fault = run({"verify", "--check-tol", "1e-20"});
    CHECK(fault.code == kVerification);
    CHECK(fault.err.find("check failed: sum_rules") != std::string::npos);
}

TEST_CASE("reproduce fig1") {
    const auto dir = scratch("fig1");
    REQUIRE(run({"reproduce", "fig1", "--out-dir", dir.string()}).code == kSuccess);
    const auto csv = read_sweep_csv((dir / "fig1_T0.1.csv").string());
    CHECK(csv.rows.size() == 200);
    const auto gamma = series(csv, "gamma");
    const auto peak = summarize_peak(gamma, series(csv, "eta"));
    CHECK(peak.max >= 0.060);
    CHECK(peak.max <= 0.070);
    CHECK(peak.argmax >= 3.3);
    CHECK(peak.argmax <= 4.3);
    // Ergotropy: convex at small gamma, concave at large gamma.
    const auto erg = series(csv, "ergotropy");
    const auto second = [&](std::size_t k) { return erg[k + 1] - 2 * erg[k] + erg[k - 1]; };
    CHECK(second(1) > 0.0);
    CHECK(second(erg.size() - 2) < 0.0);
    for (const char* t : {"0.5", "1"}) CHECK(fs::exists(dir / ("fig1_T" + std::string(t) + ".csv")));
}

TEST_CASE("reproduce fig2: sharper peaks at smaller cutoff for stronger coupling") {
    const auto dir = scratch("fig2");
    REQUIRE(run({"reproduce", "fig2", "--out-dir", dir.string()}).code == kSuccess);
    double last_argmax = INFINITY, last_width = INFINITY;
    for (const char* g : {"5", "10", "15"}) {
        const auto csv = read_sweep_csv((dir / ("fig2_gamma" + std::string(g) + ".csv")).string());
        const auto peak = summarize_peak(series(csv, "omegac"), series(csv, "eta"));
        REQUIRE(peak.interior);
        REQUIRE(std::isfinite(peak.fwhm));
        CHECK(peak.argmax < last_argmax);
        CHECK(peak.fwhm < last_width);
        last_argmax = peak.argmax;
        last_width = peak.fwhm;
    }
    CHECK(run({"reproduce", "fig3"}).code == kUsage);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(NAN) == "nan");
}
