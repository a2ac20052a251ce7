#include "clbattery/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "clbattery/symplectic.hpp"

namespace clbattery::cli {

namespace {

using json = nlohmann::json;

// Unwritable output or unreadable input; a usage error, not a numerical one.
class IoError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

std::string exact(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size()) {
        // stod rejects "nan"/"inf" spellings on some platforms.
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw IoError("not a number: '" + s + "'");
    }
    return v;
}

}  // namespace

std::string to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::Gamma: return "gamma";
        case SweepParameter::Omegac: return "omegac";
        case SweepParameter::Temp: return "temp";
        case SweepParameter::Omega0: return "omega0";
        case SweepParameter::NCopies: return "n_copies";
    }
    return "unknown";
}

SweepParameter parse_sweep_parameter(const std::string& name) {
    if (name == "gamma") return SweepParameter::Gamma;
    if (name == "omegac") return SweepParameter::Omegac;
    if (name == "temp") return SweepParameter::Temp;
    if (name == "omega0") return SweepParameter::Omega0;
    if (name == "n_copies" || name == "n") return SweepParameter::NCopies;
    throw InvalidArgument("unknown sweep parameter '" + name +
                          "' (expected gamma, omegac, temp, omega0 or n_copies)");
}

std::string to_string(SweepScale s) { return s == SweepScale::Linear ? "linear" : "log"; }

SweepScale parse_sweep_scale(const std::string& name) {
    if (name == "linear" || name == "lin") return SweepScale::Linear;
    if (name == "log") return SweepScale::Log;
    throw InvalidArgument("unknown scale '" + name + "' (expected linear or log)");
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
    spec.validate();
    std::vector<double> grid(static_cast<std::size_t>(spec.points));
    const int last = spec.points - 1;
    for (int k = 0; k <= last; ++k) {
        const double t = static_cast<double>(k) / last;
        double v;
        if (spec.scale == SweepScale::Linear) {
            v = spec.from + (spec.to - spec.from) * t;
        } else {
            v = std::exp(std::log(spec.from) + (std::log(spec.to) - std::log(spec.from)) * t);
        }
        if (k == 0) v = spec.from;
        if (k == last) v = spec.to;
        if (spec.parameter == SweepParameter::NCopies) v = std::round(v);
        grid[static_cast<std::size_t>(k)] = v;
    }
    return grid;
}

void SweepSpec::validate() const {
    if (points < 2) throw InvalidArgument("a sweep needs at least 2 points");
    if (!std::isfinite(from) || !std::isfinite(to) || !(from < to)) {
        throw InvalidArgument("sweep range needs finite from < to");
    }
    if (scale == SweepScale::Log && !(from > 0.0)) {
        throw InvalidArgument("a log-scale sweep needs from > 0");
    }
    if (parameter == SweepParameter::NCopies) {
        if (from < 1.0) throw InvalidArgument("n_copies sweep must start at 1 or more");
        SweepSpec copy = *this;
        copy.parameter = SweepParameter::Gamma;
        double previous = 0.0;
        for (double v : sweep_grid(copy)) {
            const double n = std::round(v);
            if (n <= previous) {
                throw InvalidArgument("n_copies grid does not round to distinct integers; use fewer points");
            }
            previous = n;
        }
    }
}

PointParams with_parameter(const PointParams& fixed, SweepParameter p, double value) {
    PointParams out = fixed;
    switch (p) {
        case SweepParameter::Gamma: out.gamma = value; break;
        case SweepParameter::Omegac: out.omegac = value; break;
        case SweepParameter::Temp: out.temp = value; break;
        case SweepParameter::Omega0: out.omega0 = value; break;
        case SweepParameter::NCopies: out.n = static_cast<int>(std::lround(value)); break;
    }
    return out;
}

SpectralDensity make_spectral_density(const PointParams& p, const QuadratureConfig& config) {
    const CutoffFunction f =
        p.cutoff == CutoffKind::Exponential ? CutoffFunction::exponential() : CutoffFunction::lorentz_drude();
    return SpectralDensity(p.gamma, p.omega0, p.omegac, f, config);
}

CycleEnergetics evaluate_point(const PointParams& p, const QuadratureConfig& config) {
    if (!(p.temp >= 0.0) || !std::isfinite(p.temp)) throw InvalidArgument("temperature must be >= 0");
    return n_copy_energetics(make_spectral_density(p, config), p.n, p.temp, config);
}

SweepRow make_row(double parameter, const CycleEnergetics& e) {
    return {parameter,    e.steady.sigma11, e.steady.sigma22, e.w_c,  e.w_d,
            e.w_cd,       e.ergotropy,      e.efficiency,     e.t_sigma, e.beta_p,
            e.steady.sum_rule_1_residual,   e.steady.sum_rule_2_residual};
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const QuadratureConfig& config, int jobs) {
    const std::vector<double> grid = sweep_grid(spec);
    std::vector<SweepRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::size_t first_index = grid.size();
    std::mutex error_mutex;

    const auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= grid.size() || failed.load()) return;
            try {
                const PointParams p = with_parameter(spec.fixed, spec.parameter, grid[k]);
                rows[k] = make_row(grid[k], evaluate_point(p, config));
            } catch (...) {
                // Lowest-index failure wins so the message is deterministic.
                std::lock_guard<std::mutex> lock(error_mutex);
                if (k < first_index) {
                    first_index = k;
                    first_error = std::current_exception();
                }
                failed.store(true);
                return;
            }
        }
    };

    const int threads = std::clamp(jobs, 1, static_cast<int>(grid.size()));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return rows;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::vector<std::string> csv_columns(SweepParameter p) {
    return {to_string(p), "sigma11",   "sigma22", "w_c",    "w_d",
            "w_cd",       "ergotropy", "eta",     "t_sigma", "beta_p",
            "sum_rule_1_residual",     "sum_rule_2_residual"};
}

std::string csv_metadata_line(const SweepSpec& spec, const QuadratureConfig& config) {
    std::ostringstream m;
    m << "# clbattery_version=" << kVersion << " parameter=" << to_string(spec.parameter)
      << " from=" << exact(spec.from) << " to=" << exact(spec.to) << " points=" << spec.points
      << " scale=" << to_string(spec.scale) << " gamma=" << exact(spec.fixed.gamma)
      << " omega0=" << exact(spec.fixed.omega0) << " omegac=" << exact(spec.fixed.omegac)
      << " temp=" << exact(spec.fixed.temp) << " cutoff=" << to_string(spec.fixed.cutoff)
      << " n=" << spec.fixed.n << " rel_tol=" << exact(config.rel_tol)
      << " abs_tol=" << exact(config.abs_tol) << " units=hbar=k_B=1";
    return m.str();
}

void write_sweep_csv(const std::string& path, const SweepSpec& spec, const QuadratureConfig& config,
                     const std::vector<SweepRow>& rows) {
    std::ostringstream body;
    body << csv_metadata_line(spec, config) << '\n';
    const auto columns = csv_columns(spec.parameter);
    for (std::size_t c = 0; c < columns.size(); ++c) body << (c ? "," : "") << columns[c];
    body << '\n';
    for (const SweepRow& r : rows) {
        const double values[] = {r.parameter, r.sigma11,   r.sigma22, r.w_c,     r.w_d,
                                 r.w_cd,      r.ergotropy, r.eta,     r.t_sigma, r.beta_p,
                                 r.sum_rule_1_residual,    r.sum_rule_2_residual};
        bool first = true;
        for (double v : values) {
            body << (first ? "" : ",") << format_number(v);
            first = false;
        }
        body << '\n';
    }

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    const std::string text = body.str();
    file.write(text.data(), static_cast<std::streamsize>(text.size()));
    file.close();
    if (!file) {
        std::error_code ignored;
        std::filesystem::remove(path, ignored);
        throw IoError("failed writing '" + path + "'");
    }
}

ParsedCsv read_sweep_csv(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open '" + path + "'");
    ParsedCsv out;
    std::string line;
    if (!std::getline(file, line) || line.rfind("# ", 0) != 0) {
        throw IoError("'" + path + "' has no metadata line");
    }
    std::map<std::string, std::string> meta;
    {
        std::istringstream words(line.substr(2));
        std::string word;
        while (words >> word) {
            const auto eq = word.find('=');
            if (eq != std::string::npos) meta[word.substr(0, eq)] = word.substr(eq + 1);
        }
    }
    const auto get = [&](const std::string& key) {
        const auto it = meta.find(key);
        if (it == meta.end()) throw IoError("metadata lacks '" + key + "'");
        return it->second;
    };
    out.spec.parameter = parse_sweep_parameter(get("parameter"));
    out.spec.from = parse_double(get("from"));
    out.spec.to = parse_double(get("to"));
    out.spec.points = std::stoi(get("points"));
    out.spec.scale = parse_sweep_scale(get("scale"));
    out.spec.fixed.gamma = parse_double(get("gamma"));
    out.spec.fixed.omega0 = parse_double(get("omega0"));
    out.spec.fixed.omegac = parse_double(get("omegac"));
    out.spec.fixed.temp = parse_double(get("temp"));
    out.spec.fixed.cutoff = parse_cutoff_kind(get("cutoff"));
    out.spec.fixed.n = std::stoi(get("n"));
    out.config.rel_tol = parse_double(get("rel_tol"));
    out.config.abs_tol = parse_double(get("abs_tol"));

    if (!std::getline(file, line)) throw IoError("'" + path + "' has no header");
    {
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) out.columns.push_back(cell);
    }
    while (std::getline(file, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) row.push_back(parse_double(cell));
        if (row.size() != out.columns.size()) throw IoError("ragged row in '" + path + "'");
        out.rows.push_back(std::move(row));
    }
    return out;
}

PeakSummary summarize_peak(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) throw InvalidArgument("peak summary needs matching, nonempty series");
    PeakSummary s;
    std::size_t best = 0;
    for (std::size_t k = 1; k < y.size(); ++k) {
        if (y[k] > y[best]) best = k;
    }
    s.argmax = x[best];
    s.max = y[best];
    s.interior = best > 0 && best + 1 < y.size();
    const double half = 0.5 * y[best];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double left = nan;
    for (std::size_t k = best; k > 0; --k) {
        if (y[k - 1] <= half) {
            left = x[k - 1] + (half - y[k - 1]) * (x[k] - x[k - 1]) / (y[k] - y[k - 1]);
            break;
        }
    }
    double right = nan;
    for (std::size_t k = best; k + 1 < y.size(); ++k) {
        if (y[k + 1] <= half) {
            right = x[k] + (y[k] - half) * (x[k + 1] - x[k]) / (y[k] - y[k + 1]);
            break;
        }
    }
    s.fwhm = right - left;
    return s;
}

// ---------------------------------------------------------------- verify

namespace {

std::mt19937_64 case_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

// Runs body(k) for k in [0, count) on up to `jobs` threads; body must only
// write to slot k of its own output.
template <class Body>
void parallel_for(std::size_t count, int jobs, Body body) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= count) return;
            try {
                body(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(count, 1)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

double max_of(const std::vector<double>& v) {
    double m = v.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    return m;
}

CheckResult finish(std::string name, const std::vector<double>& residuals, double tol) {
    CheckResult r;
    r.name = std::move(name);
    r.worst = max_of(residuals);
    r.tolerance = tol;
    r.cases = residuals.size();
    r.passed = std::all_of(residuals.begin(), residuals.end(),
                           [tol](double x) { return std::isfinite(x) && x <= tol; });
    return r;
}

struct GridPoint {
    double gamma;
    double omega0;
    double omegac;
    CutoffKind cutoff;
};

std::vector<GridPoint> sum_rule_grid(bool strong) {
    std::vector<GridPoint> grid;
    const std::vector<double> gammas = strong ? std::vector<double>{1e4} : std::vector<double>{0.1, 1.0, 10.0};
    for (CutoffKind cutoff : {CutoffKind::LorentzDrude, CutoffKind::Exponential}) {
        for (auto [w0, wc] : {std::pair{2.0, 4.0}, std::pair{1.0, 1.0}, std::pair{2.0, 0.5}}) {
            for (double g : gammas) grid.push_back({g, w0, wc, cutoff});
        }
    }
    return grid;
}

Matrix random_hamiltonian(std::mt19937_64& rng, int modes) {
    std::uniform_real_distribution<double> freq(0.2, 3.0);
    std::vector<double> w(static_cast<std::size_t>(modes));
    for (double& x : w) x = freq(rng);
    const Matrix s = random_symplectic(rng, modes, 0.5);
    return s.transpose() * QuadraticHamiltonian::oscillators(w).matrix() * s;
}

double energy_of(const Matrix& sigma, const Matrix& m) { return 0.5 * (sigma * m).trace(); }

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
    const auto tol = [&](double nominal) { return options.check_tol > 0.0 ? options.check_tol : nominal; };
    const QuadratureConfig& config = options.config;
    const std::uint64_t seed = options.seed;
    std::vector<CheckResult> results;

    for (bool strong : {false, true}) {
        const auto grid = sum_rule_grid(strong);
        std::vector<double> residual(grid.size());
        parallel_for(grid.size(), options.jobs, [&](std::size_t k) {
            const GridPoint& g = grid[k];
            const PointParams p{g.gamma, g.omega0, g.omegac, 0.0, g.cutoff, 1};
            const auto [r1, r2] = sum_rule_residuals(make_spectral_density(p, config), config);
            residual[k] = std::max(r1, r2);
        });
        results.push_back(finish(strong ? "sum_rules_strong" : "sum_rules", residual, tol(strong ? 1e-5 : 1e-6)));
    }

    constexpr std::size_t kCovariances = 200;
    {
        std::vector<double> residual(kCovariances);
        parallel_for(kCovariances, options.jobs, [&](std::size_t k) {
            auto rng = case_rng(seed, 1, k);
            const int modes = 1 + static_cast<int>(k % 3);
            const CovarianceMatrix sigma = random_covariance(rng, modes);
            const WilliamsonDecomposition w = williamson(sigma);
            const Matrix j = symplectic_form(modes);
            const double r1 = (w.lambda * j * w.lambda.transpose() - j).norm();
            const double r2 = (w.lambda * w.diagonal() * w.lambda.transpose() - sigma.matrix()).norm();
            residual[k] = std::max(r1, r2);
        });
        results.push_back(finish("williamson", residual, tol(1e-10)));
    }

    constexpr std::size_t kOracleCases = 200;
    constexpr int kTrials = 10000;
    {
        std::vector<double> violation(kOracleCases);
        std::vector<double> optimal_gap(kOracleCases);
        parallel_for(kOracleCases, options.jobs, [&](std::size_t k) {
            auto rng = case_rng(seed, 2, k);
            const int modes = 1 + static_cast<int>(k % 3);
            const CovarianceMatrix sigma = random_covariance(rng, modes);
            const QuadraticHamiltonian ham(random_hamiltonian(rng, modes));
            const double energy = ham.energy(sigma);
            const double passive = energy - gaussian_ergotropy(sigma, ham);
            const Matrix s_opt = optimal_symplectic(sigma, ham);
            const Matrix moved = s_opt * sigma.matrix() * s_opt.transpose();
            optimal_gap[k] = std::abs(energy_of(moved, ham.matrix()) - passive) / std::max(1.0, energy);

            double worst = -std::numeric_limits<double>::infinity();
            for (int t = 0; t < kTrials; ++t) {
                // Half global samples, half small moves away from the optimum.
                const Matrix s = (t % 2 == 0) ? random_symplectic(rng, modes, 1.0)
                                              : Matrix(random_symplectic(rng, modes, 0.05) * s_opt);
                const double e = energy_of(s * sigma.matrix() * s.transpose(), ham.matrix());
                worst = std::max(worst, passive - e);
            }
            violation[k] = worst;
        });
        results.push_back(finish("ergotropy_oracle", violation, tol(1e-9)));
        results.push_back(finish("optimal_symplectic", optimal_gap, tol(1e-10)));
    }

    {
        constexpr std::size_t kSingle = 200;
        std::vector<double> residual(kSingle);
        parallel_for(kSingle, options.jobs, [&](std::size_t k) {
            auto rng = case_rng(seed, 3, k);
            const CovarianceMatrix sigma = random_covariance(rng, 1);
            std::uniform_real_distribution<double> freq(0.2, 5.0);
            const double w0 = freq(rng);
            const double one = single_mode_ergotropy(sigma(0, 0), sigma(0, 1), sigma(1, 1), w0);
            const double general = gaussian_ergotropy(sigma, QuadraticHamiltonian::oscillators({w0}));
            residual[k] = std::abs(one - general) / std::max(1.0, general);
        });
        results.push_back(finish("single_mode_ergotropy", residual, tol(1e-12)));
    }

    {
        constexpr std::size_t kCanonical = 100;
        std::vector<double> mismatch(kCanonical);
        parallel_for(kCanonical, options.jobs, [&](std::size_t k) {
            auto rng = case_rng(seed, 4, k);
            std::uniform_real_distribution<double> diag(0.6, 3.0);
            std::uniform_real_distribution<double> corr(-0.9, 0.9);
            const bool symmetric = k % 2 == 0;
            for (;;) {
                const double a = diag(rng);
                const double b = diag(rng);
                const double limit = std::sqrt((a - 0.5) * (b - 0.5));
                const double c1 = corr(rng) * limit;
                const double c2 = symmetric ? c1 : corr(rng) * limit;
                if (!symmetric && std::abs(c1 - c2) < 0.05) continue;
                if (!canonical_two_mode_covariance(a, b, c1, c2).is_physical()) continue;
                const auto check = canonical_two_mode_energy_check(a, b, c1, c2, 1.0);
                mismatch[k] = check.equal == symmetric ? 0.0 : 1.0;
                return;
            }
        });
        results.push_back(finish("canonical_two_mode", mismatch, 0.0));
    }

    // Second law, entropy preservation and the n-copy identity on one grid.
    {
        std::vector<PointParams> grid;
        for (CutoffKind cutoff : {CutoffKind::LorentzDrude, CutoffKind::Exponential}) {
            for (auto [w0, wc] : {std::pair{2.0, 4.0}, std::pair{1.0, 1.0}}) {
                for (double g : {0.1, 1.0, 5.0, 20.0}) {
                    for (double t : {0.0, 0.1, 1.0, 10.0}) grid.push_back({g, w0, wc, t, cutoff, 1});
                }
            }
        }
        std::vector<double> second_law(grid.size());
        std::vector<double> entropy(grid.size());
        parallel_for(grid.size(), options.jobs, [&](std::size_t k) {
            const CycleEnergetics e = evaluate_point(grid[k], config);
            second_law[k] = -e.t_sigma / std::max(1.0, e.w_cd);
            const double s11 = e.steady.sigma11;
            const double s22 = e.steady.sigma22;
            const double s_steady = gaussian_entropy(CovarianceMatrix::single_mode(s11, 0.0, s22));
            const double s_passive = gaussian_entropy(passive_covariance(s11, 0.0, s22, grid[k].omega0));
            entropy[k] = std::abs(s_steady - s_passive);
        });
        results.push_back(finish("second_law", second_law, tol(1e-9)));
        results.push_back(finish("entropy_preserved", entropy, tol(1e-10)));

        std::vector<PointParams> copies;
        for (std::size_t k = 0; k < grid.size(); k += 7) copies.push_back(grid[k]);
        std::vector<double> differs(copies.size());
        parallel_for(copies.size(), options.jobs, [&](std::size_t k) {
            const PointParams& p = copies[k];
            const int n = 2 + static_cast<int>(k % 3);
            const SpectralDensity sd = make_spectral_density(p, config);
            const CycleEnergetics a = n_copy_energetics(sd, n, p.temp, config);
            const CycleEnergetics b = cycle_energetics(sd.with_gamma(n * p.gamma), p.temp, config);
            const bool same = a.w_c == b.w_c && a.w_d == b.w_d && a.ergotropy == b.ergotropy &&
                              a.steady.sigma11 == b.steady.sigma11 && a.steady.sigma22 == b.steady.sigma22;
            differs[k] = same ? 0.0 : 1.0;
        });
        results.push_back(finish("n_copy_identity", differs, 0.0));
    }
    return results;
}

// ---------------------------------------------------------------- front end

namespace {

struct Globals {
    double rel_tol{1e-10};
    double abs_tol{1e-14};
    int jobs{0};
    bool json{false};
    std::string config_path;
    std::uint64_t seed{1};

    QuadratureConfig quadrature() const {
        QuadratureConfig c;
        c.rel_tol = rel_tol;
        c.abs_tol = abs_tol;
        c.validate();
        return c;
    }
    int threads() const {
        if (jobs > 0) return jobs;
        return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
};

struct PointFlags {
    PointParams params;
    std::string cutoff{"lorentz-drude"};

    PointParams resolved() const {
        PointParams p = params;
        p.cutoff = parse_cutoff_kind(cutoff);
        return p;
    }
};

void add_point_flags(CLI::App* app, PointFlags& flags, bool gamma_required) {
    auto* g = app->add_option("--gamma", flags.params.gamma, "coupling constant gamma");
    if (gamma_required) g->required();
    app->add_option("--omega0", flags.params.omega0, "oscillator frequency")->capture_default_str();
    app->add_option("--omegac", flags.params.omegac, "bath cutoff frequency")->capture_default_str();
    app->add_option("--temp", flags.params.temp, "bath temperature (k_B = 1)")->capture_default_str();
    app->add_option("--cutoff", flags.cutoff, "lorentz-drude or exponential")->capture_default_str();
    app->add_option("--n", flags.params.n, "identical oscillators sharing the bath")->capture_default_str();
}

void print_point(std::ostream& out, const PointParams& p, const CycleEnergetics& e, bool as_json) {
    if (as_json) {
        const auto num = [](double x) -> json {
            if (std::isfinite(x)) return x;
            return format_number(x);
        };
        json j;
        j["parameters"] = {{"gamma", p.gamma}, {"omega0", p.omega0}, {"omegac", p.omegac},
                           {"temp", p.temp},   {"cutoff", to_string(p.cutoff)}, {"n", p.n}};
        j["results"] = {{"sigma11", num(e.steady.sigma11)},
                        {"sigma22", num(e.steady.sigma22)},
                        {"sigma12", num(e.steady.sigma12)},
                        {"err11", num(e.steady.err11)},
                        {"err22", num(e.steady.err22)},
                        {"sum_rule_1_residual", num(e.steady.sum_rule_1_residual)},
                        {"sum_rule_2_residual", num(e.steady.sum_rule_2_residual)},
                        {"w_c", num(e.w_c)},
                        {"w_d", num(e.w_d)},
                        {"w_cd", num(e.w_cd)},
                        {"ergotropy", num(e.ergotropy)},
                        {"eta", num(e.efficiency)},
                        {"t_sigma", num(e.t_sigma)},
                        {"beta_p", num(e.beta_p)}};
        out << j.dump(2) << '\n';
        return;
    }
    const auto line = [&out](const char* name, const std::string& value) {
        out << std::left << std::setw(22) << name << value << '\n';
    };
    line("gamma", format_number(p.gamma));
    line("omega0", format_number(p.omega0));
    line("omegac", format_number(p.omegac));
    line("temp", format_number(p.temp));
    line("cutoff", to_string(p.cutoff));
    line("n", std::to_string(p.n));
    out << '\n';
    line("sigma11", format_number(e.steady.sigma11));
    line("sigma22", format_number(e.steady.sigma22));
    line("sigma12", format_number(e.steady.sigma12));
    line("err11", format_number(e.steady.err11));
    line("err22", format_number(e.steady.err22));
    line("sum_rule_1_residual", format_number(e.steady.sum_rule_1_residual));
    line("sum_rule_2_residual", format_number(e.steady.sum_rule_2_residual));
    out << '\n';
    line("w_c", format_number(e.w_c));
    line("w_d", format_number(e.w_d));
    line("w_cd", format_number(e.w_cd));
    line("ergotropy", format_number(e.ergotropy));
    line("eta", format_number(e.efficiency));
    line("t_sigma", format_number(e.t_sigma));
    line("beta_p", format_number(e.beta_p));
}

std::string json_scalar_token(const json& v, const std::string& key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number()) return exact(v.get<double>());
    throw InvalidArgument("config key '" + key + "' must be a number or string");
}

bool user_gave(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args) {
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
}

// Splices config-file values in as ordinary tokens, ahead of the user's own
// tokens, skipping any flag the user passed explicitly.
std::vector<std::string> apply_config(const std::vector<std::string>& args, CLI::App& app,
                                      const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot read config file '" + path + "'");
    json config;
    try {
        config = json::parse(file);
    } catch (const json::exception& e) {
        throw IoError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!config.is_object()) throw IoError("config file must hold a JSON object");

    std::vector<std::string> user = args;
    std::size_t command_at = user.size();
    CLI::App* command = nullptr;
    for (std::size_t k = 0; k < user.size(); ++k) {
        if (CLI::App* sub = app.get_subcommand_no_throw(user[k])) {
            command_at = k;
            command = sub;
            break;
        }
    }
    if (!command && config.contains("command")) {
        const std::string name = config["command"].get<std::string>();
        command = app.get_subcommand_no_throw(name);
        if (!command) throw InvalidArgument("config names unknown command '" + name + "'");
        user.push_back(name);
        command_at = user.size() - 1;
    }

    std::vector<std::string> global_tokens;
    std::vector<std::string> command_tokens;
    for (const auto& [raw_key, value] : config.items()) {
        if (raw_key == "command" || raw_key == "config") continue;
        std::string key = raw_key;
        std::replace(key.begin(), key.end(), '_', '-');
        if (command && key == "figure" && command->get_name() == "reproduce") {
            if (command_at + 1 >= user.size() || user[command_at + 1].rfind("-", 0) == 0) {
                command_tokens.push_back(value.get<std::string>());
            }
            continue;
        }
        const std::string flag = "--" + key;
        std::vector<std::string>* sink = nullptr;
        CLI::Option* opt = nullptr;
        if ((opt = app.get_option_no_throw(flag))) {
            sink = &global_tokens;
        } else if (command && (opt = command->get_option_no_throw(flag))) {
            sink = &command_tokens;
        } else {
            throw InvalidArgument("config key '" + raw_key + "' matches no flag");
        }
        if (user_gave(user, flag)) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) sink->push_back(flag);
            continue;
        }
        sink->push_back(flag);
        if (value.is_array()) {
            for (const auto& item : value) sink->push_back(json_scalar_token(item, raw_key));
        } else {
            sink->push_back(json_scalar_token(value, raw_key));
        }
    }

    std::vector<std::string> merged;
    const std::size_t split = command ? command_at : user.size();
    merged.insert(merged.end(), global_tokens.begin(), global_tokens.end());
    merged.insert(merged.end(), user.begin(), user.begin() + static_cast<std::ptrdiff_t>(split));
    if (command) {
        merged.push_back(user[command_at]);
        merged.insert(merged.end(), command_tokens.begin(), command_tokens.end());
        merged.insert(merged.end(), user.begin() + static_cast<std::ptrdiff_t>(command_at) + 1, user.end());
    }
    return merged;
}

struct Figure1 {
    std::vector<double> temps{0.1, 0.5, 1.0};
    int points{200};
};

struct Figure2 {
    std::vector<double> gammas{5.0, 10.0, 15.0};
    int points{160};
};

int reproduce(const std::string& figure, const std::string& out_dir, const Figure1& f1, const Figure2& f2,
              const Globals& g, std::ostream& out) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!std::filesystem::is_directory(out_dir)) throw IoError("cannot create directory '" + out_dir + "'");
    const QuadratureConfig config = g.quadrature();

    std::vector<std::pair<std::string, SweepSpec>> curves;
    if (figure == "fig1") {
        for (double t : f1.temps) {
            SweepSpec spec;
            spec.parameter = SweepParameter::Gamma;
            spec.from = 0.1;
            spec.to = 20.0;
            spec.points = f1.points;
            spec.scale = SweepScale::Linear;
            spec.fixed = {1.0, 2.0, 4.0, t, CutoffKind::LorentzDrude, 1};
            curves.emplace_back("fig1_T" + short_number(t) + ".csv", spec);
        }
    } else if (figure == "fig2") {
        for (double gamma : f2.gammas) {
            SweepSpec spec;
            spec.parameter = SweepParameter::Omegac;
            spec.from = 0.002;
            spec.to = 10.0;
            spec.points = f2.points;
            spec.scale = SweepScale::Log;
            spec.fixed = {gamma, 2.0, 1.0, 0.1, CutoffKind::LorentzDrude, 1};
            curves.emplace_back("fig2_gamma" + short_number(gamma) + ".csv", spec);
        }
    } else {
        throw InvalidArgument("unknown figure '" + figure + "' (expected fig1 or fig2)");
    }

    json summary = json::array();
    for (const auto& [name, spec] : curves) {
        const auto rows = run_sweep(spec, config, g.threads());
        const std::string path = (std::filesystem::path(out_dir) / name).string();
        write_sweep_csv(path, spec, config, rows);
        std::vector<double> x;
        std::vector<double> eta;
        for (const auto& r : rows) {
            x.push_back(r.parameter);
            eta.push_back(r.eta);
        }
        const PeakSummary peak = summarize_peak(x, eta);
        const double fixed = figure == "fig1" ? spec.fixed.temp : spec.fixed.gamma;
        const char* fixed_name = figure == "fig1" ? "temp" : "gamma";
        const char* axis = figure == "fig1" ? "gamma" : "omegac";
        if (g.json) {
            summary.push_back({{"file", path}, {fixed_name, fixed}, {"eta_max", peak.max},
                               {std::string("argmax_") + axis, peak.argmax},
                               {"fwhm", std::isfinite(peak.fwhm) ? json(peak.fwhm) : json(nullptr)}});
        } else {
            out << path << "  " << fixed_name << '=' << format_number(fixed) << "  eta_max="
                << format_number(peak.max) << "  argmax_" << axis << '=' << format_number(peak.argmax)
                << "  fwhm=" << format_number(peak.fwhm) << '\n';
        }
    }
    if (g.json) out << summary.dump(2) << '\n';
    return kSuccess;
}

}  // namespace

int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Harmonic-oscillator battery charged by a Caldeira-Leggett bath (hbar = k_B = 1)",
                 "clbattery"};
    app.require_subcommand(1);
    // Global flags may also follow the subcommand.
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    Globals g;
    app.add_option("--rel-tol", g.rel_tol, "relative quadrature tolerance")->capture_default_str();
    app.add_option("--abs-tol", g.abs_tol, "absolute quadrature tolerance")->capture_default_str();
    app.add_option("--jobs", g.jobs, "worker threads (0 = all cores)")->capture_default_str();
    app.add_flag("--json", g.json, "machine-readable output on stdout");
    app.add_option("--config", g.config_path, "JSON file whose keys mirror the flags");
    app.add_option("--seed", g.seed, "seed for randomised checks")->capture_default_str();

    PointFlags point_flags;
    CLI::App* point = app.add_subcommand("point", "energetics of one charging cycle");
    add_point_flags(point, point_flags, true);

    PointFlags sweep_flags;
    std::string sweep_param{"gamma"};
    std::string sweep_scale{"linear"};
    std::string sweep_out;
    SweepSpec sweep_spec;
    CLI::App* sweep = app.add_subcommand("sweep", "CSV of every quantity along a parameter grid");
    add_point_flags(sweep, sweep_flags, false);
    sweep->add_option("--param", sweep_param, "gamma, omegac, temp, omega0 or n_copies")->capture_default_str();
    sweep->add_option("--from", sweep_spec.from, "first grid value")->required();
    sweep->add_option("--to", sweep_spec.to, "last grid value")->required();
    sweep->add_option("--points", sweep_spec.points, "grid size (>= 2)")->capture_default_str();
    sweep->add_option("--scale", sweep_scale, "linear or log")->capture_default_str();
    sweep->add_option("--out", sweep_out, "output CSV path")->required();

    double check_tol = 0.0;
    CLI::App* verify = app.add_subcommand("verify", "run the invariant battery");
    verify->add_option("--check-tol", check_tol, "override every check tolerance (self-test)");

    std::string figure;
    std::string out_dir{"."};
    Figure1 f1;
    Figure2 f2;
    int repro_points = 0;
    CLI::App* repro = app.add_subcommand("reproduce", "plot data for fig1 (eta, ergotropy vs gamma) or fig2 (vs omegac)");
    repro->add_option("figure", figure, "fig1 or fig2")->required();
    repro->add_option("--out-dir", out_dir, "directory for the CSV files")->capture_default_str();
    repro->add_option("--temps", f1.temps, "fig1 temperatures")->capture_default_str();
    repro->add_option("--gammas", f2.gammas, "fig2 coupling constants")->capture_default_str();
    repro->add_option("--points", repro_points, "grid size per curve (0 = figure default)");

    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    try {
        for (std::size_t k = 0; k < args.size(); ++k) {
            if (args[k] == "--config" && k + 1 < args.size()) {
                args = apply_config(args, app, args[k + 1]);
                break;
            }
            if (args[k].rfind("--config=", 0) == 0) {
                args = apply_config(args, app, args[k].substr(9));
                break;
            }
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (point->parsed()) {
            const PointParams p = point_flags.resolved();
            if (p.gamma == 0.0) {
                err << "error: efficiency eta = ergotropy / w_cd is undefined at zero coupling (gamma = 0)\n";
                return kUsage;
            }
            const CycleEnergetics e = evaluate_point(p, g.quadrature());
            print_point(out, p, e, g.json);
            return kSuccess;
        }
        if (sweep->parsed()) {
            sweep_spec.parameter = parse_sweep_parameter(sweep_param);
            sweep_spec.scale = parse_sweep_scale(sweep_scale);
            sweep_spec.fixed = sweep_flags.resolved();
            sweep_spec.validate();
            const QuadratureConfig config = g.quadrature();
            const auto rows = run_sweep(sweep_spec, config, g.threads());
            write_sweep_csv(sweep_out, sweep_spec, config, rows);
            if (g.json) {
                out << json{{"file", sweep_out}, {"rows", rows.size()}}.dump() << '\n';
            } else {
                out << "wrote " << rows.size() << " rows to " << sweep_out << '\n';
            }
            return kSuccess;
        }
        if (verify->parsed()) {
            VerifyOptions options;
            options.seed = g.seed;
            options.check_tol = check_tol;
            options.jobs = g.threads();
            options.config = g.quadrature();
            const auto results = run_verification(options);
            bool all = true;
            json report = json::array();
            if (!g.json) out << "verify seed=" << g.seed << '\n';
            for (const auto& r : results) {
                all = all && r.passed;
                if (g.json) {
                    report.push_back({{"check", r.name}, {"passed", r.passed}, {"cases", r.cases},
                                      {"worst", r.worst}, {"tolerance", r.tolerance}});
                    continue;
                }
                char buf[160];
                std::snprintf(buf, sizeof buf, "%-4s %-22s cases=%-5zu worst=%.3e tol=%.1e\n",
                              r.passed ? "PASS" : "FAIL", r.name.c_str(), r.cases, r.worst, r.tolerance);
                out << buf;
            }
            if (g.json) out << report.dump(2) << '\n';
            if (!all) {
                for (const auto& r : results) {
                    if (!r.passed) err << "check failed: " << r.name << '\n';
                }
                return kVerification;
            }
            return kSuccess;
        }
        if (repro->parsed()) {
            if (repro_points < 0 || repro_points == 1) throw InvalidArgument("--points must be 0 or >= 2");
            if (repro_points > 0) f1.points = f2.points = repro_points;
            return reproduce(figure, out_dir, f1, f2, g, out);
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}

}  // namespace clbattery::cli
