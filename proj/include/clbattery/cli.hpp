// cli.hpp - command-line front end: point, sweep, verify and reproduce.
// Everything the executable does is reachable through run_cli so tests can
// drive it in-process.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "clbattery/energetics.hpp"

namespace clbattery::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kSuccess = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

struct PointParams {
    double gamma{1.0};
    double omega0{2.0};
    double omegac{4.0};
    double temp{0.1};
    CutoffKind cutoff{CutoffKind::LorentzDrude};
    int n{1};
};

enum class SweepParameter { Gamma, Omegac, Temp, Omega0, NCopies };
enum class SweepScale { Linear, Log };

std::string to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(const std::string& name);
std::string to_string(SweepScale s);
SweepScale parse_sweep_scale(const std::string& name);

struct SweepSpec {
    SweepParameter parameter{SweepParameter::Gamma};
    double from{0.1};
    double to{20.0};
    int points{60};
    SweepScale scale{SweepScale::Linear};
    PointParams fixed;

    // Throws InvalidArgument unless from < to, points >= 2, and from > 0 on
    // a log scale. An n_copies grid must round to distinct integers >= 1.
    void validate() const;
};

struct SweepRow {
    double parameter{0.0};
    double sigma11{0.0};
    double sigma22{0.0};
    double w_c{0.0};
    double w_d{0.0};
    double w_cd{0.0};
    double ergotropy{0.0};
    double eta{0.0};
    double t_sigma{0.0};
    double beta_p{0.0};
    double sum_rule_1_residual{0.0};
    double sum_rule_2_residual{0.0};
};

// Ascending; n_copies values are rounded to integers.
std::vector<double> sweep_grid(const SweepSpec& spec);

PointParams with_parameter(const PointParams& fixed, SweepParameter p, double value);
SpectralDensity make_spectral_density(const PointParams& p, const QuadratureConfig& config);
CycleEnergetics evaluate_point(const PointParams& p, const QuadratureConfig& config);
SweepRow make_row(double parameter, const CycleEnergetics& e);

// Grid points run on up to `jobs` threads; rows come back in grid order.
// The first failure is rethrown after all workers stop.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const QuadratureConfig& config, int jobs);

// 12 significant digits.
std::string format_number(double x);
std::vector<std::string> csv_columns(SweepParameter p);
std::string csv_metadata_line(const SweepSpec& spec, const QuadratureConfig& config);
// Writes the whole file or nothing: a failed write removes the file.
void write_sweep_csv(const std::string& path, const SweepSpec& spec,
                     const QuadratureConfig& config, const std::vector<SweepRow>& rows);

struct ParsedCsv {
    SweepSpec spec;
    QuadratureConfig config;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Inverse of write_sweep_csv.
ParsedCsv read_sweep_csv(const std::string& path);

struct PeakSummary {
    double argmax{0.0};
    double max{0.0};
    // Full width at half maximum from linear interpolation; NaN when the
    // curve does not fall to half height on both sides.
    double fwhm{0.0};
    bool interior{false};
};

PeakSummary summarize_peak(const std::vector<double>& x, const std::vector<double>& y);

struct CheckResult {
    std::string name;
    bool passed{false};
    double worst{0.0};      // largest residual; negative when every case has slack
    double tolerance{0.0};
    std::size_t cases{0};
};

struct VerifyOptions {
    std::uint64_t seed{1};
    // Overrides every check tolerance when set (> 0).
    double check_tol{0.0};
    int jobs{1};
    QuadratureConfig config;
};

std::vector<CheckResult> run_verification(const VerifyOptions& options);

// argv[0] is the program name.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace clbattery::cli
