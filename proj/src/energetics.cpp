#include "clbattery/energetics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "clbattery/symplectic.hpp"

namespace clbattery {

CycleEnergetics cycle_energetics(const SpectralDensity& sd, double temp, const QuadratureConfig& config) {
    const double w0 = sd.omega0();
    const double wr2 = sd.omega_r_squared();
    CycleEnergetics e;
    e.steady = steady_covariance(sd, temp, config);
    const double s11 = e.steady.sigma11;
    const double s22 = e.steady.sigma22;

    e.w_c = wr2 / (2.0 * w0) * std::sqrt(s11 * s22);
    // <q'' q> = -sigma22 in the steady state.
    e.w_d = -s22 + (w0 * w0 + 0.5 * wr2) * s11;
    e.w_cd = e.w_c + e.w_d;
    e.ergotropy = single_mode_ergotropy(s11, 0.0, s22, w0);
    e.t_sigma = e.w_cd - e.ergotropy;
    e.beta_p = passive_temperature(s11, 0.0, s22, w0);

    if (sd.gamma() == 0.0) {
        e.efficiency = std::numeric_limits<double>::quiet_NaN();
        return e;
    }
    if (!(e.w_cd > config.abs_tol)) {
        std::ostringstream msg;
        msg << "connection-disconnection work " << e.w_cd << " is not above abs_tol; efficiency undefined";
        throw ZeroDenominator(msg.str());
    }
    e.efficiency = e.ergotropy / e.w_cd;
    return e;
}

CycleEnergetics n_copy_energetics(const SpectralDensity& sd, int n, double temp, const QuadratureConfig& config) {
    if (n < 1) throw InvalidArgument("copy count must be at least 1");
    return cycle_energetics(sd.with_gamma(n * sd.gamma()), temp, config);
}

HighTemperaturePrediction high_temperature_predictions(const SpectralDensity& sd, double temp) {
    if (!(temp > 0.0)) throw InvalidArgument("high-temperature predictions need T > 0");
    const double w0 = sd.omega0();
    return {sd.omega_r_squared() / (w0 * w0) * temp, std::pow(w0, 4) / std::pow(temp, 3)};
}

EfficiencyOptimum maximize_efficiency(const SpectralDensity& sd, double temp, double gamma_lo,
                                      double gamma_hi, const QuadratureConfig& config, int scan_points) {
    if (!(gamma_lo > 0.0) || !(gamma_hi > gamma_lo)) {
        throw InvalidArgument("efficiency search needs 0 < gamma_lo < gamma_hi");
    }
    if (scan_points < 3) throw InvalidArgument("efficiency scan needs at least 3 points");
    const auto efficiency = [&](double log_gamma) {
        return cycle_energetics(sd.with_gamma(std::exp(log_gamma)), temp, config).efficiency;
    };
    const double a = std::log(gamma_lo);
    const double b = std::log(gamma_hi);
    std::vector<double> grid(scan_points);
    int best = 0;
    double best_value = -1.0;
    for (int k = 0; k < scan_points; ++k) {
        grid[k] = a + (b - a) * k / (scan_points - 1);
        const double v = efficiency(grid[k]);
        if (v > best_value) {
            best_value = v;
            best = k;
        }
    }
    const double lo = grid[std::max(best - 1, 0)];
    const double hi = grid[std::min(best + 1, scan_points - 1)];
    const auto [arg, neg] = boost::math::tools::brent_find_minima(
        [&](double x) { return -efficiency(x); }, lo, hi, 30);
    double log_gamma = arg;
    if (-neg < best_value) log_gamma = grid[best];
    const double gamma = std::exp(log_gamma);
    return {gamma, cycle_energetics(sd.with_gamma(gamma), temp, config)};
}

}  // namespace clbattery
