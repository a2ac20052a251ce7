#include "clbattery/steadystate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace clbattery {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_zero_temperature(double temp, double omega0) { return temp < 1e-8 * omega0; }

void require_temperature(double temp) {
    if (!(temp >= 0.0) || !std::isfinite(temp)) throw InvalidArgument("temperature must be >= 0");
}

// coth(w / 2T) for w > 0, T > 0.
double thermal_factor(double omega, double temp) {
    if (omega < 1e-4 * temp) return 2.0 * temp / omega + omega / (6.0 * temp);
    const double x = omega / (2.0 * temp);
    if (x > 20.0) return 1.0 + 2.0 * std::exp(-2.0 * x);
    return 1.0 / std::tanh(x);
}

// The bath used inside the outer integrals resolves the frequency shift
// two digits beyond the outer tolerance, so quadrature noise in |alpha|^2
// cannot stall the outer refinement.
SpectralDensity inner_bath(const SpectralDensity& sd, const QuadratureConfig& config) {
    QuadratureConfig inner = config;
    inner.rel_tol = std::max(1e-2 * config.rel_tol, 1e-12);
    inner.abs_tol = 1e-2 * config.abs_tol;
    return sd.with_config(inner);
}

// int_0^inf N(w) / |alpha(w)|^2 dw with N = J X.
//
// When the resonance width J(w*) / |Re alpha'(w*)| is below 1e-9 w* (a cutoff
// that has decayed long before w*), the peak is a delta function for every
// practical purpose: the window w* +- 1e-3 w* contributes
// 2 X(w*) arctan(|a| d / J(w*)) / |a| and the rest is integrated directly.
// Otherwise the resonance and its half-width become breakpoints.
class ResonantIntegral {
public:
    ResonantIntegral(const SpectralDensity& bath, double temp) {
        root_ = bath.resonance_root();
        const double gamma_root = bath.j_omega(root_);
        slope_ = std::abs(-2.0 * root_ + bath.frequency_shift_derivative(root_));
        sharp_ = slope_ > 0.0 && gamma_root < 1e-9 * slope_ * root_;
        if (sharp_) {
            half_window_ = 1e-3 * root_;
            peak_scale_ = 2.0 * std::atan(slope_ * half_window_ / gamma_root) / slope_;
        }
        points_ = {root_, bath.omega0(), bath.omegac()};
        const double width = gamma_root / std::max(slope_, 1e-300);
        if (!sharp_ && width < 0.5 * root_) {
            points_.push_back(root_ - width);
            points_.push_back(root_ + width);
        }
        if (temp > 0.0) points_.push_back(temp);
    }

    // weight(w) = N(w) / J(w), needed only at the root.
    QuadratureResult operator()(const Integrand& f, const std::function<double(double)>& weight,
                                const QuadratureConfig& config) const {
        if (!sharp_) return integrate_semi_infinite(f, points_, config);
        const double lo = root_ - half_window_;
        const double hi = root_ + half_window_;
        std::vector<double> below;
        for (double p : points_) {
            if (p < lo) below.push_back(p);
        }
        below.push_back(lo);
        // [0, lo] and [hi, inf) as one semi-infinite integral with a hole.
        const Integrand holed = [&f, lo, hi](double w) { return w <= lo ? f(w) : f(w + (hi - lo)); };
        std::vector<double> points = below;
        for (double p : points_) {
            if (p > hi) points.push_back(p - (hi - lo));
        }
        auto result = integrate_semi_infinite(holed, points, config);
        result.value += peak_scale_ * weight(root_);
        return result;
    }

private:
    double root_{0.0};
    double slope_{0.0};
    bool sharp_{false};
    double half_window_{0.0};
    double peak_scale_{0.0};
    std::vector<double> points_;
};

}  // namespace

SteadyState free_oscillator_state(double omega0, double temp) {
    require_temperature(temp);
    if (!(omega0 > 0.0)) throw InvalidArgument("omega0 must be > 0");
    const double c = is_zero_temperature(temp, omega0) ? 1.0 : thermal_factor(omega0, temp);
    SteadyState s;
    s.sigma11 = c / (2.0 * omega0);
    s.sigma22 = 0.5 * omega0 * c;
    return s;
}

SteadyState steady_covariance(const SpectralDensity& sd, double temp, const QuadratureConfig& config) {
    require_temperature(temp);
    config.validate();
    if (sd.gamma() == 0.0) return free_oscillator_state(sd.omega0(), temp);

    const SpectralDensity bath = inner_bath(sd, config);
    const bool zero_t = is_zero_temperature(temp, sd.omega0());
    const ResonantIntegral integrate(bath, zero_t ? 0.0 : temp);

    // coth(w/2T), and J coth / |alpha|^2 written through J/w so that the
    // w -> 0 limit 2 T J/w stays finite.
    const auto thermal = [temp, zero_t](double w) { return zero_t ? 1.0 : thermal_factor(w, temp); };
    const Integrand position = [&bath, temp, zero_t](double w) {
        const double jw = bath.j_over_omega(w);
        double weight;
        if (zero_t) {
            weight = jw * w;
        } else {
            weight = w == 0.0 ? 2.0 * temp * jw : jw * w * thermal_factor(w, temp);
        }
        return weight / bath.alpha_abs_squared(w);
    };
    const Integrand momentum = [&position](double w) { return w * w * position(w); };

    const auto r11 = integrate(position, thermal, config);
    const auto r22 = integrate(momentum, [&thermal](double w) { return w * w * thermal(w); }, config);
    SteadyState s;
    s.sigma11 = r11.value / kPi;
    s.sigma22 = r22.value / kPi;
    s.err11 = r11.error_estimate / kPi;
    s.err22 = r22.error_estimate / kPi;
    const auto [res1, res2] = sum_rule_residuals(sd, config);
    s.sum_rule_1_residual = res1;
    s.sum_rule_2_residual = res2;
    return s;
}

std::pair<double, double> sum_rule_residuals(const SpectralDensity& sd, const QuadratureConfig& config) {
    config.validate();
    if (!(sd.gamma() > 0.0)) throw InvalidArgument("sum rules need gamma > 0");
    const SpectralDensity bath = inner_bath(sd, config);
    const ResonantIntegral integrate(bath, 0.0);
    const Integrand first = [&bath](double w) { return bath.j_over_omega(w) / bath.alpha_abs_squared(w); };
    const Integrand second = [&bath](double w) {
        return w * w * bath.j_over_omega(w) / bath.alpha_abs_squared(w);
    };
    const double w0sq = sd.omega0() * sd.omega0();
    const double one =
        2.0 / kPi * integrate(first, [](double w) { return 1.0 / w; }, config).value;
    const double two = 2.0 / kPi * integrate(second, [](double w) { return w; }, config).value;
    return {std::abs(one * w0sq - 1.0), std::abs(two - 1.0)};
}

}  // namespace clbattery
