// energetics.hpp - one steady charging cycle: connect, thermalise,
// disconnect, extract. Counted from the second cycle on, so the oscillator
// always starts in the passive state left behind by the previous one.
#pragma once

#include "clbattery/steadystate.hpp"

namespace clbattery {

struct CycleEnergetics {
    double w_c{0.0};         // work to switch the coupling on
    double w_d{0.0};         // work to switch it off
    double w_cd{0.0};        // w_c + w_d
    double ergotropy{0.0};   // extracted by the final unitary
    double efficiency{0.0};  // ergotropy / w_cd; NaN at zero coupling
    double t_sigma{0.0};     // dissipated work, w_cd - ergotropy
    double beta_p{0.0};      // inverse temperature of the passive state
    SteadyState steady;
};

// Throws ZeroDenominator when gamma > 0 but w_cd <= abs_tol. At gamma = 0
// every work term vanishes and efficiency is NaN.
CycleEnergetics cycle_energetics(const SpectralDensity& sd, double temp,
                                 const QuadratureConfig& config = {});

// n identical oscillators on one bath: the collective mode couples with
// n gamma and the other n - 1 modes decouple.
CycleEnergetics n_copy_energetics(const SpectralDensity& sd, int n, double temp,
                                  const QuadratureConfig& config = {});

struct HighTemperaturePrediction {
    double w_cd;             // (wR^2 / w0^2) T
    double ergotropy_order;  // w0^4 / T^3
};

HighTemperaturePrediction high_temperature_predictions(const SpectralDensity& sd, double temp);

struct EfficiencyOptimum {
    double gamma;
    CycleEnergetics energetics;
};

// Maximises the efficiency over gamma in [gamma_lo, gamma_hi]: a log-spaced
// scan of `scan_points` values brackets the peak, Brent's method refines it.
EfficiencyOptimum maximize_efficiency(const SpectralDensity& sd, double temp, double gamma_lo,
                                      double gamma_hi, const QuadratureConfig& config = {},
                                      int scan_points = 41);

}  // namespace clbattery
