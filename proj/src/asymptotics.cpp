#include "clbattery/asymptotics.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "clbattery/steadystate.hpp"

namespace clbattery {

namespace {

constexpr double kPi = std::numbers::pi;

// Ingredients of the expansion in x = 1 - (w / w0)^2:
//   F(x) = f(w0/wc sqrt(1 - x)),  C(x) = coth(w0 sqrt(1 - x) / 2T),  K = F C.
class ExpansionKernel {
public:
    ExpansionKernel(const SpectralDensity& sd, double temp)
        : cutoff_(sd.cutoff()),
          ratio_(sd.omega0() / sd.omegac()),
          zero_t_(temp < 1e-8 * sd.omega0()),
          a_(zero_t_ ? 0.0 : sd.omega0() / (2.0 * temp)) {}

    double k(double x) const {
        const double s = std::sqrt(1.0 - x);
        return cutoff_(ratio_ * s) * thermal(s);
    }

    double k_prime(double x) const {
        const double s = std::sqrt(1.0 - x);
        const double ds = -0.5 / s;
        const double f = cutoff_(ratio_ * s);
        const double df = cutoff_.derivative(ratio_ * s) * ratio_ * ds;
        if (zero_t_) return df;
        const double y = a_ * s;
        const double csch2 = y > 300.0 ? 0.0 : 1.0 / (std::sinh(y) * std::sinh(y));
        return df * thermal(s) - f * csch2 * a_ * ds;
    }

    // Fourth-order central difference of K'.
    double k_second(double h = 1e-3) const {
        return (-k_prime(2 * h) + 8 * k_prime(h) - 8 * k_prime(-h) + k_prime(-2 * h)) / (12 * h);
    }

    double thermal(double s) const {
        if (zero_t_) return 1.0;
        const double y = a_ * s;
        if (y < 1e-4) return 1.0 / y + y / 3.0;
        return 1.0 / std::tanh(y);
    }

    double thermal_prime_at_zero() const {
        if (zero_t_) return 0.0;
        const double csch2 = a_ > 300.0 ? 0.0 : 1.0 / (std::sinh(a_) * std::sinh(a_));
        return 0.5 * a_ * csch2;
    }

    // Breakpoints in u >= 0 for the tail x = -1 - u.
    std::vector<double> tail_breakpoints() const {
        std::vector<double> points;
        const auto add = [&points](double u) {
            if (u > 0.0 && std::isfinite(u)) points.push_back(u);
        };
        for (double z : {1.0, std::min(cutoff_.decay_bound(), 100.0)}) add(z * z / (ratio_ * ratio_) - 2.0);
        if (!zero_t_) add(4.0 / (a_ * a_) - 2.0);
        return points;
    }

private:
    CutoffFunction cutoff_;
    double ratio_;
    bool zero_t_;
    double a_;
};

// int_0^1 h(b) db with b = 1 - t^2 on [1/2, 1], which absorbs the
// (1 - b)^{-1/2} endpoint behaviour that appears at T > 0.
double integrate_unit(const Integrand& h) {
    const double lower = integrate_interval(h, 0.0, 0.5).value;
    const Integrand mapped = [&h](double t) { return 2.0 * t * h(1.0 - t * t); };
    return lower + integrate_interval(mapped, 0.0, std::sqrt(0.5)).value;
}

constexpr double kSmallB = 1e-4;

}  // namespace

WeakCouplingCorrection weak_coupling_correction(const SpectralDensity& sd, double temp) {
    if (!(temp >= 0.0)) throw InvalidArgument("temperature must be >= 0");
    const double w0 = sd.omega0();
    const SpectralDensity unit = sd.with_gamma(1.0);
    const ExpansionKernel kernel(sd, temp);

    const double g0 = unit.frequency_shift(w0) / (w0 * w0);
    const double g0_prime = -unit.frequency_shift_derivative(w0) / (2.0 * w0);
    const double c0 = kernel.thermal(1.0);
    const double y0 = g0 * c0;
    const double y0_prime = g0_prime * c0 + g0 * kernel.thermal_prime_at_zero();
    const double k0 = kernel.k(0.0);
    const double k0_prime = kernel.k_prime(0.0);
    const double k0_second = kernel.k_second();

    const auto points = kernel.tail_breakpoints();
    const double tail = integrate_semi_infinite(
        [&kernel](double u) { return kernel.k(-1.0 - u) / ((1.0 + u) * (1.0 + u)); }, points).value;
    const double tail_weighted = integrate_semi_infinite(
        [&kernel](double u) { return (2.0 + u) * kernel.k(-1.0 - u) / ((1.0 + u) * (1.0 + u)); },
        points).value;

    // int_0^1 da int_0^a db q(b) = int_0^1 (1 - b) q(b) db
    const double odd_slope = integrate_unit([&kernel, k0_second](double b) {
        if (b < kSmallB) return (1.0 - b) * 2.0 * k0_second;
        return (1.0 - b) * (kernel.k_prime(b) - kernel.k_prime(-b)) / b;
    });
    const double odd_mixed = integrate_unit([&kernel, k0_second, k0_prime](double b) {
        if (b < kSmallB) return (1.0 - b) * 2.0 * (k0_second - k0_prime);
        const double q = kernel.k_prime(b) - kernel.k(b) - kernel.k_prime(-b) + kernel.k(-b);
        return (1.0 - b) * q / b;
    });
    const double odd_value = integrate_unit([&kernel](double a) { return kernel.k(a) - kernel.k(-a); });

    WeakCouplingCorrection out{};
    out.phi_t = tail - 2.0 * k0 - 0.5 * kPi * y0 - kPi * y0_prime + odd_slope;
    out.psi_t = tail_weighted - 2.0 * k0 + 0.5 * kPi * y0 - kPi * y0_prime - odd_value + odd_mixed;
    const SteadyState free = free_oscillator_state(w0, temp);
    const double gamma = sd.gamma();
    out.sigma11_linear = free.sigma11 + gamma * out.phi_t / (2.0 * kPi * w0);
    out.sigma22_linear = free.sigma22 + gamma * w0 * out.psi_t / (2.0 * kPi);
    out.reliable = gamma <= 0.3;
    return out;
}

LorentzDrudeZeroTemperature lorentz_drude_zero_temperature(double w) {
    if (!(w > 0.0)) throw InvalidArgument("w0 / wc must be positive");
    const double w2 = w * w;
    const double phi_numerator = kPi * w * (1.0 - w2) - 2.0 * (1.0 + w2) + 4.0 * w2 * std::log(w);
    const double psi_numerator = kPi * w * (3.0 + w2) - 2.0 * (1.0 + w2) - 4.0 * std::log(w);
    const double quad = (1.0 + w2) * (1.0 + w2);
    return {phi_numerator / quad, psi_numerator / quad, phi_numerator / ((1.0 + w) * (1.0 + w))};
}

WeakCouplingEnergetics weak_coupling_energetics(const SpectralDensity& sd, double temp) {
    const auto corr = weak_coupling_correction(sd, temp);
    const double w0 = sd.omega0();
    const double gamma = sd.gamma();
    const double c = free_oscillator_state(w0, temp).sigma22 * 2.0 / w0;
    const double f_hat = sd.cutoff().integral() / kPi;
    const double diff = corr.phi_t - corr.psi_t;
    WeakCouplingEnergetics out{};
    out.ergotropy = w0 * gamma * gamma * diff * diff / (16.0 * kPi * kPi * c);
    out.w_cd = w0 * gamma *
               (diff / (2.0 * kPi) +
                sd.omegac() / w0 * f_hat * (c + gamma * (3.0 * corr.phi_t + corr.psi_t) / (4.0 * kPi)));
    out.efficiency = out.ergotropy / out.w_cd;
    out.reliable = corr.reliable;
    return out;
}

LowTemperaturePrediction low_temperature_correction(const SpectralDensity& sd, double temp) {
    if (!(temp >= 0.0)) throw InvalidArgument("temperature must be >= 0");
    const double w0 = sd.omega0();
    const double gamma = sd.gamma();
    const auto corr = weak_coupling_correction(sd, 0.0);
    const SteadyState free = free_oscillator_state(w0, temp);
    const double r = temp / w0;
    const double f0 = sd.cutoff()(0.0);
    LowTemperaturePrediction out{};
    out.sigma11 = free.sigma11 + gamma * corr.phi_t / (2.0 * kPi * w0) +
                  f0 * kPi / (3.0 * w0) * r * r * gamma;
    out.sigma22 = free.sigma22 + gamma * w0 * corr.psi_t / (2.0 * kPi) +
                  f0 * 2.0 * kPi * kPi * kPi * w0 / 15.0 * r * r * r * r * gamma;
    out.reliable = temp <= 0.3 * w0 && gamma <= 0.3;
    return out;
}

double g_tilde(const SpectralDensity& sd, double omega) {
    const double w0 = sd.omega0();
    return sd.with_gamma(1.0).frequency_shift(omega) / (w0 * w0);
}

UltrastrongPrediction ultrastrong_prediction(const SpectralDensity& sd, double gamma_eval) {
    if (!(gamma_eval > 0.0) || !std::isfinite(gamma_eval)) throw InvalidArgument("gamma must be > 0");
    const double w0 = sd.omega0();
    const double wc = sd.omegac();
    double g_inf = 2.0 * wc / w0;
    if (sd.cutoff().kind() == CutoffKind::Custom) {
        double near = 0.0;
        double far = 0.0;
        try {
            near = g_tilde(sd, 1e3 * wc);
            far = g_tilde(sd, 1e4 * wc);
        } catch (const NumericalError& e) {
            throw UnknownAsymptote(std::string("g_tilde could not be evaluated at large frequency: ") + e.what());
        }
        if (!(far > 0.0) || !std::isfinite(far) || std::abs(far - near) > 1e-2 * std::abs(far)) {
            std::ostringstream msg;
            msg << "g_tilde has no finite positive limit (g(1e3 wc) = " << near << ", g(1e4 wc) = " << far << ")";
            throw UnknownAsymptote(msg.str());
        }
        g_inf = far;
    }
    UltrastrongPrediction out{};
    out.g_infinity = g_inf;
    const double root = std::sqrt(g_inf * gamma_eval);
    out.sigma11_pred = 1.0 / (2.0 * w0 * root);
    out.sigma22_pred = 0.5 * w0 * root;
    out.validity_gamma = (wc / w0) * (wc / w0);
    out.reliable = gamma_eval >= 10.0 * out.validity_gamma;
    return out;
}

}  // namespace clbattery
