#include "clbattery/spectral.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include <boost/math/tools/roots.hpp>

namespace clbattery {

namespace {

constexpr double kPi = std::numbers::pi;

void require_frequency(double omega) {
    if (!(omega >= 0.0)) {
        std::ostringstream msg;
        msg << "frequency must be nonnegative, got " << omega;
        throw NegativeFrequency(msg.str());
    }
}

double finite_difference(const CutoffFunction::Profile& f, double z) {
    const double h = 1e-3 * std::max(1.0, std::abs(z));
    if (z - 2.0 * h >= 0.0) {
        return (-f(z + 2 * h) + 8 * f(z + h) - 8 * f(z - h) + f(z - 2 * h)) / (12 * h);
    }
    return (-25 * f(z) + 48 * f(z + h) - 36 * f(z + 2 * h) + 16 * f(z + 3 * h) - 3 * f(z + 4 * h)) /
           (12 * h);
}

// Past a few hundred cutoff units the rational tail map is more efficient
// than a finite piece, even for slowly decaying profiles.
std::array<double, 2> cutoff_breakpoints(const CutoffFunction& f) {
    return {1.0, std::min(f.decay_bound(), 100.0)};
}

}  // namespace

std::string to_string(CutoffKind kind) {
    switch (kind) {
        case CutoffKind::LorentzDrude: return "lorentz-drude";
        case CutoffKind::Exponential: return "exponential";
        case CutoffKind::Custom: return "custom";
    }
    return "unknown";
}

CutoffKind parse_cutoff_kind(const std::string& name) {
    if (name == "lorentz-drude" || name == "lorentz" || name == "ld") return CutoffKind::LorentzDrude;
    if (name == "exponential" || name == "exp") return CutoffKind::Exponential;
    throw InvalidArgument("unknown cutoff '" + name + "' (expected lorentz-drude or exponential)");
}

CutoffFunction::CutoffFunction(CutoffKind kind, std::string name, Profile f, Profile derivative,
                               double decay_bound)
    : kind_(kind),
      name_(std::move(name)),
      f_(std::move(f)),
      derivative_(std::move(derivative)),
      decay_bound_(decay_bound) {}

CutoffFunction CutoffFunction::lorentz_drude() {
    CutoffFunction c(
        CutoffKind::LorentzDrude, "lorentz-drude", [](double z) { return 2.0 / (1.0 + z * z); },
        [](double z) {
            const double d = 1.0 + z * z;
            return -4.0 * z / (d * d);
        },
        1.5e6);
    c.integral_ = kPi;
    return c;
}

CutoffFunction CutoffFunction::exponential() {
    CutoffFunction c(
        CutoffKind::Exponential, "exponential", [](double z) { return kPi * std::exp(-z); },
        [](double z) { return -kPi * std::exp(-z); }, 30.0);
    c.integral_ = kPi;
    return c;
}

CutoffFunction CutoffFunction::custom(Profile f, double decay_bound, std::string name,
                                      Profile derivative) {
    if (!f) throw InvalidArgument("custom cutoff needs a profile");
    if (!(decay_bound > 0.0) || !std::isfinite(decay_bound)) {
        throw InvalidArgument("custom cutoff decay bound must be positive and finite");
    }
    if (!(f(0.0) > 0.0)) throw InvalidArgument("custom cutoff must satisfy f(0) > 0");
    for (double factor : {1.0 + 1e-9, 2.0, 10.0, 100.0}) {
        const double z = decay_bound * factor;
        if (!(std::abs(f(z)) < 1e-12)) {
            std::ostringstream msg;
            msg << "custom cutoff is not below 1e-12 past its decay bound (f(" << z << ") = " << f(z)
                << ")";
            throw InvalidArgument(msg.str());
        }
    }
    CutoffFunction c(CutoffKind::Custom, std::move(name), std::move(f), std::move(derivative),
                     decay_bound);
    const std::array<double, 2> breakpoints{1.0, decay_bound};
    try {
        c.integral_ = integrate_semi_infinite(c.f_, breakpoints).value;
    } catch (const NumericalError& e) {
        throw DivergentRenormalization(std::string("cutoff integral does not converge: ") + e.what());
    }
    if (!(c.integral_ > 0.0) || !std::isfinite(c.integral_)) {
        throw DivergentRenormalization("cutoff integral is not a positive finite number");
    }
    return c;
}

double CutoffFunction::derivative(double z) const {
    return derivative_ ? derivative_(z) : finite_difference(f_, z);
}

SpectralDensity::SpectralDensity(double gamma, double omega0, double omegac, CutoffFunction cutoff,
                                 QuadratureConfig config)
    : gamma_(gamma),
      omega0_(omega0),
      omegac_(omegac),
      cutoff_(std::move(cutoff)),
      config_(config) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be >= 0");
    if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw InvalidArgument("omega0 must be > 0");
    if (!(omegac > 0.0) || !std::isfinite(omegac)) throw InvalidArgument("omegac must be > 0");
    config_.validate();
    omega_r_squared_ = 2.0 * gamma_ * omega0_ * omegac_ / kPi * cutoff_.integral();
}

SpectralDensity SpectralDensity::with_gamma(double gamma) const {
    return SpectralDensity(gamma, omega0_, omegac_, cutoff_, config_);
}

SpectralDensity SpectralDensity::with_config(const QuadratureConfig& config) const {
    return SpectralDensity(gamma_, omega0_, omegac_, cutoff_, config);
}

double SpectralDensity::j_omega(double omega) const {
    require_frequency(omega);
    return gamma_ * omega0_ * omega * cutoff_(omega / omegac_);
}

double SpectralDensity::j_over_omega(double omega) const {
    require_frequency(omega);
    return gamma_ * omega0_ * cutoff_(omega / omegac_);
}

double SpectralDensity::chi(double omega) const {
    require_frequency(omega);
    if (cutoff_.kind() == CutoffKind::LorentzDrude) {
        const double z = omega / omegac_;
        return omega_r_squared_ / (1.0 + z * z);
    }
    return chi_quadrature(omega);
}

double SpectralDensity::chi_quadrature(double omega) const {
    require_frequency(omega);
    if (gamma_ == 0.0) return 0.0;
    const double pole = omega / omegac_;
    const CutoffFunction& f = cutoff_;
    const auto breakpoints = cutoff_breakpoints(f);
    double sum;
    if (pole == 0.0) {
        sum = 2.0 * integrate_semi_infinite([&f](double z) { return f(z); }, breakpoints, config_).value;
    } else {
        const Integrand weighted = [&f](double z) { return z * f(z); };
        const double regular =
            integrate_semi_infinite([&f, pole](double z) { return z * f(z) / (z + pole); },
                                    breakpoints, config_)
                .value;
        const double principal = integrate_principal_value(weighted, pole, config_, breakpoints).value;
        sum = regular + principal;
    }
    return gamma_ * omega0_ * omegac_ / kPi * sum;
}

double SpectralDensity::frequency_shift(double omega) const {
    require_frequency(omega);
    if (cutoff_.kind() == CutoffKind::LorentzDrude) {
        const double z2 = (omega / omegac_) * (omega / omegac_);
        return omega_r_squared_ * z2 / (1.0 + z2);
    }
    return frequency_shift_quadrature(omega);
}

// wR^2 - chi(w) = (2 gamma w0 w p / pi) int_0^inf (f(p) - f(z)) / (z^2 - p^2) dz,
// p = w / wc. Subtracting f(p) is free because PV int_0^inf dz / (z^2 - p^2)
// vanishes; the integrand is then regular at z = p and the two logarithmic
// pieces of the sum/difference form never have to cancel.
double SpectralDensity::frequency_shift_quadrature(double omega) const {
    require_frequency(omega);
    if (gamma_ == 0.0 || omega == 0.0) return 0.0;
    const double pole = omega / omegac_;
    const CutoffFunction& f = cutoff_;
    const double f_pole = f(pole);
    const double slope_pole = f.derivative(pole);
    // Close to the pole f(p) - f(z) comes from Simpson's rule on f' rather
    // than from a difference of two nearly equal values.
    const Integrand subtracted = [&f, pole, f_pole, slope_pole](double z) {
        const double d = z - pole;
        if (std::abs(d) <= 1e-3) {
            const double mean_slope =
                (slope_pole + 4.0 * f.derivative(pole + 0.5 * d) + f.derivative(z)) / 6.0;
            return -mean_slope / (z + pole);
        }
        return (f_pole - f(z)) / (d * (z + pole));
    };
    const auto [b1, b2] = cutoff_breakpoints(f);
    const std::array<double, 4> breakpoints{b1, b2, pole, 2.0 * pole};
    const double integral = integrate_semi_infinite(subtracted, breakpoints, config_).value;
    return 2.0 * gamma_ * omega0_ * omega * pole / kPi * integral;
}

double SpectralDensity::frequency_shift_derivative(double omega) const {
    require_frequency(omega);
    if (cutoff_.kind() == CutoffKind::LorentzDrude) {
        const double z = omega / omegac_;
        const double d = 1.0 + z * z;
        return omega_r_squared_ * 2.0 * z / (d * d) / omegac_;
    }
    const auto s = [this](double w) { return frequency_shift(w); };
    double h = 1e-3 * std::max(omega, omegac_);
    if (omega - 2.0 * h <= 0.0) h = omega / 4.0;
    if (h == 0.0) return 0.0;
    return (-s(omega + 2 * h) + 8 * s(omega + h) - 8 * s(omega - h) + s(omega - 2 * h)) / (12 * h);
}

double SpectralDensity::re_alpha(double omega) const {
    return omega0_ * omega0_ - omega * omega + frequency_shift(omega);
}

double SpectralDensity::alpha_abs_squared(double omega) const {
    const double re = re_alpha(omega);
    const double im = j_omega(omega);
    return re * re + im * im;
}

double SpectralDensity::resonance_root() const {
    if (gamma_ == 0.0) return omega0_;
    double upper = 2.0 * std::sqrt(omega0_ * omega0_ + omega_r_squared_);
    const double ceiling = 1e8 * (omega0_ + omegac_);
    while (re_alpha(upper) >= 0.0 && upper < ceiling) upper *= 2.0;

    constexpr int kScan = 64;
    double lo = 0.0;
    for (int k = 1; k <= kScan; ++k) {
        const double w = upper * k / kScan;
        if (re_alpha(w) < 0.0) {
            const auto sign_change = [this](double x) { return re_alpha(x); };
            boost::math::tools::eps_tolerance<double> tol(50);
            const auto [a, b] = boost::math::tools::bisect(sign_change, lo, w, tol);
            return 0.5 * (a + b);
        }
        lo = w;
    }
    return omega0_;
}

}  // namespace clbattery
