// asymptotics.hpp - weak-coupling, low-temperature and ultrastrong-coupling
// expansions of the steady state and the cycle energetics.
#pragma once

#include "clbattery/spectral.hpp"

namespace clbattery {

// sigma11 ~ sigma11_free + gamma phi_t / (2 pi w0)
// sigma22 ~ sigma22_free + gamma w0 psi_t / (2 pi)
struct WeakCouplingCorrection {
    double phi_t;
    double psi_t;
    double sigma11_linear;
    double sigma22_linear;
    // false when gamma > 0.3, where the linear term is no longer a
    // trustworthy approximation.
    bool reliable;
};

// phi_t and psi_t depend on w0, wc, T and the cutoff shape only.
WeakCouplingCorrection weak_coupling_correction(const SpectralDensity& sd, double temp);

// Closed forms for the Lorentz-Drude cutoff at T = 0 as functions of
// w0 / wc. phi0_linear_denominator puts (1 + w)^2 where phi0 has
// (1 + w^2)^2; the two agree only at w0 = wc and the quadratic one matches
// the generic integrals.
struct LorentzDrudeZeroTemperature {
    double phi0;
    double psi0;
    double phi0_linear_denominator;
};
LorentzDrudeZeroTemperature lorentz_drude_zero_temperature(double omega0_over_omegac);

struct WeakCouplingEnergetics {
    double ergotropy;
    double w_cd;
    double efficiency;
    bool reliable;
};

// Leading orders: ergotropy ~ gamma^2, w_cd ~ gamma. The renormalisation
// enters through f_hat = wR^2 / (2 gamma w0 wc) = (1/pi) int f.
WeakCouplingEnergetics weak_coupling_energetics(const SpectralDensity& sd, double temp);

// The gamma-linear T = 0 expansion plus the leading thermal corrections
// f(0) (pi/3w0)(T/w0)^2 gamma and f(0) (2 pi^3 w0/15)(T/w0)^4 gamma, plus the
// exponentially small thermal excess of the free oscillator.
struct LowTemperaturePrediction {
    double sigma11;
    double sigma22;
    bool reliable;  // T <= 0.3 w0 and gamma <= 0.3
};
LowTemperaturePrediction low_temperature_correction(const SpectralDensity& sd, double temp);

// sigma11 ~ 1 / (2 w0 sqrt(g_inf gamma)), sigma22 ~ w0 sqrt(g_inf gamma) / 2.
struct UltrastrongPrediction {
    double g_infinity;
    double sigma11_pred;
    double sigma22_pred;
    double validity_gamma;  // (wc / w0)^2; the limit needs gamma >> this
    bool reliable;          // gamma >= 10 validity_gamma
};

// (wR^2 - chi(w)) / (gamma w0^2); independent of gamma.
double g_tilde(const SpectralDensity& sd, double omega);

// g_inf = 2 wc / w0 for the registered cutoffs. Custom cutoffs take the
// value of g_tilde at 1e4 wc after checking it against 1e3 wc; throws
// UnknownAsymptote if the two disagree by more than 1e-2 or the limit is
// not positive and finite.
UltrastrongPrediction ultrastrong_prediction(const SpectralDensity& sd, double gamma_eval);

}  // namespace clbattery
