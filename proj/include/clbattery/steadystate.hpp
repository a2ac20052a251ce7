// steadystate.hpp - long-time second moments of the bath-coupled oscillator.
#pragma once

#include <utility>

#include "clbattery/spectral.hpp"

namespace clbattery {

struct SteadyState {
    double sigma11{0.0};  // <q^2>
    double sigma22{0.0};  // <p^2>
    double sigma12{0.0};  // symmetrised <qp>, zero in the steady state
    double err11{0.0};
    double err22{0.0};
    double sum_rule_1_residual{0.0};
    double sum_rule_2_residual{0.0};
};

// sigma_ii = (1/pi) int J(w) w^{2(i-1)} coth(w/2T) / |alpha(w)|^2 dw.
// Temperatures below 1e-8 w0 take the exact T = 0 branch. At gamma = 0 the
// free thermal state is returned with zero residuals.
SteadyState steady_covariance(const SpectralDensity& sd, double temp,
                              const QuadratureConfig& config = {});

// Relative deviations of the two temperature-independent identities
//   (2/pi) int J/(w |alpha|^2) = 1/w0^2   and   (2/pi) int w J/|alpha|^2 = 1.
// Requires gamma > 0.
std::pair<double, double> sum_rule_residuals(const SpectralDensity& sd,
                                             const QuadratureConfig& config = {});

// coth(w0/2T)/(2 w0) and w0 coth(w0/2T)/2; coth -> 1 at T = 0.
SteadyState free_oscillator_state(double omega0, double temp);

}  // namespace clbattery
