// spectral.hpp - Ohmic bath description J(w) = gamma w0 w f(w / wc) and the
// quantities derived from it: renormalisation frequency, Kramers-Kronig
// transform chi, and the response denominator alpha.
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "clbattery/quadrature.hpp"

namespace clbattery {

enum class CutoffKind { LorentzDrude, Exponential, Custom };

std::string to_string(CutoffKind kind);
// Accepts "lorentz-drude" and "exponential".
CutoffKind parse_cutoff_kind(const std::string& name);

// Dimensionless cutoff profile f(z), z = w / wc.
class CutoffFunction {
public:
    using Profile = std::function<double(double)>;

    // 2 / (1 + z^2)
    static CutoffFunction lorentz_drude();
    // pi exp(-z)
    static CutoffFunction exponential();
    // decay_bound: f(z) < 1e-12 for every z > decay_bound. The profile is
    // checked for f(0) > 0, the decay bound, and integrability.
    // Without an explicit derivative a fourth-order difference is used.
    static CutoffFunction custom(Profile f, double decay_bound, std::string name = "custom",
                                 Profile derivative = {});

    CutoffKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    double operator()(double z) const { return f_(z); }
    double derivative(double z) const;
    // z beyond which the profile is negligible; used as a quadrature breakpoint.
    double decay_bound() const noexcept { return decay_bound_; }
    // int_0^inf f(z) dz, computed once at construction.
    double integral() const noexcept { return integral_; }

private:
    CutoffFunction(CutoffKind kind, std::string name, Profile f, Profile derivative,
                   double decay_bound);

    CutoffKind kind_;
    std::string name_;
    Profile f_;
    Profile derivative_;
    double decay_bound_;
    double integral_{0.0};
};

// Immutable after construction; every member is safe to call concurrently.
class SpectralDensity {
public:
    SpectralDensity(double gamma, double omega0, double omegac, CutoffFunction cutoff,
                    QuadratureConfig config = {});

    double gamma() const noexcept { return gamma_; }
    double omega0() const noexcept { return omega0_; }
    double omegac() const noexcept { return omegac_; }
    const CutoffFunction& cutoff() const noexcept { return cutoff_; }
    const QuadratureConfig& config() const noexcept { return config_; }

    // Same bath with a different coupling constant.
    SpectralDensity with_gamma(double gamma) const;
    SpectralDensity with_config(const QuadratureConfig& config) const;

    double j_omega(double omega) const;
    // J(w) / w, finite at w = 0.
    double j_over_omega(double omega) const;

    // (2/pi) int J(w)/w dw, memoised.
    double omega_r_squared() const noexcept { return omega_r_squared_; }

    // Kramers-Kronig transform of the odd extension of J. Closed form for
    // Lorentz-Drude, principal-value quadrature otherwise.
    double chi(double omega) const;
    // Always the generic two-sided quadrature route, regardless of cutoff.
    double chi_quadrature(double omega) const;

    // wR^2 - chi(w), evaluated without the cancellation at small w.
    double frequency_shift(double omega) const;
    double frequency_shift_quadrature(double omega) const;
    double frequency_shift_derivative(double omega) const;

    // w0^2 - w^2 + wR^2 - chi(w)
    double re_alpha(double omega) const;
    double alpha_abs_squared(double omega) const;

    // First zero of re_alpha on (0, w_max], or w0 if none is bracketed.
    double resonance_root() const;

private:
    double gamma_;
    double omega0_;
    double omegac_;
    CutoffFunction cutoff_;
    QuadratureConfig config_;
    double omega_r_squared_;
};

}  // namespace clbattery
