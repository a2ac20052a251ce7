// quadrature.hpp - adaptive Gauss-Kronrod integration on finite and
// semi-infinite intervals, plus Cauchy principal values.
//
// All routines use a single global error budget: subintervals from every
// piece of the domain share one priority queue ordered by local error, so
// refinement goes where it is needed (narrow resonances, endpoint kinks).
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "clbattery/errors.hpp"

namespace clbattery {

struct QuadratureConfig {
    double rel_tol{1e-10};
    double abs_tol{1e-14};
    std::size_t max_subdivisions{2000};
    // Mapped-tail subintervals whose absolute mass is below
    // abs_tol / truncation_factor are frozen instead of refined.
    double truncation_factor{50.0};

    // Throws InvalidArgument if any field is out of range.
    void validate() const;
};

struct QuadratureResult {
    double value{0.0};
    double error_estimate{0.0};
    std::size_t evaluations{0};
    bool converged{false};
};

// Subdivision budget exhausted with the error estimate above tolerance.
class NonConvergence : public NumericalError {
public:
    NonConvergence(const std::string& what, QuadratureResult partial,
                   double worst_lo, double worst_hi, double worst_error);

    const QuadratureResult& partial() const noexcept { return partial_; }
    double worst_lo() const noexcept { return worst_lo_; }
    double worst_hi() const noexcept { return worst_hi_; }
    double worst_error() const noexcept { return worst_error_; }

private:
    QuadratureResult partial_;
    double worst_lo_;
    double worst_hi_;
    double worst_error_;
};

using Integrand = std::function<double(double)>;

// Integral of f over the finite interval [a, b] (a < b).
QuadratureResult integrate_interval(const Integrand& f, double a, double b,
                                    const QuadratureConfig& config = {});

// Integral of f over [0, inf). The domain is split at every breakpoint and
// the piece past the largest one is mapped onto (0, 1) by
// x = b + s t / (1 - t), s = max(b, 1).
// Breakpoints must be positive; they are sorted and deduplicated here.
QuadratureResult integrate_semi_infinite(const Integrand& f,
                                         std::span<const double> breakpoints,
                                         const QuadratureConfig& config = {});

// Principal value of the integral over [0, inf) of f(z) / (z - pole).
// The window [pole - eps, pole + eps] is folded onto
// int_0^eps [f(pole + u) - f(pole - u)] / u du. eps starts at the pole
// itself (everything below the pole folded) and shrinks tenfold, down to
// 1e-3 pole, until two successive estimates agree.
QuadratureResult integrate_principal_value(const Integrand& f, double pole,
                                           const QuadratureConfig& config = {},
                                           std::span<const double> breakpoints = {});

}  // namespace clbattery
