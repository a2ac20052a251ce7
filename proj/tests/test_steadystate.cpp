#include <doctest.h>

#include <cmath>

#include "clbattery/steadystate.hpp"

using namespace clbattery;

namespace {
SpectralDensity ld(double gamma, double w0, double wc) {
    return SpectralDensity(gamma, w0, wc, CutoffFunction::lorentz_drude());
}
SpectralDensity ex(double gamma, double w0, double wc) {
    return SpectralDensity(gamma, w0, wc, CutoffFunction::exponential());
}
}  // namespace

TEST_CASE("vanishing coupling recovers the free thermal state") {
    const auto s = steady_covariance(ld(1e-6, 2, 4), 1.0);
    const double c = 1.0 / std::tanh(1.0);
    CHECK(s.sigma11 == doctest::Approx(c / 4).epsilon(1e-3));
    CHECK(s.sigma22 == doctest::Approx(c).epsilon(1e-3));
    CHECK(s.sigma12 == 0.0);

    const auto free = free_oscillator_state(2.0, 1.0);
    const auto zero = steady_covariance(ld(0, 2, 4), 1.0);
    CHECK(zero.sigma11 == free.sigma11);
    CHECK(zero.sigma22 == free.sigma22);
}

TEST_CASE("sum rules") {
    for (const auto& sd : {ld(1, 2, 4), ex(10, 1, 1), ex(1, 2, 0.5), ld(0.1, 1, 1)}) {
        const auto [r1, r2] = sum_rule_residuals(sd);
        CHECK(r1 < 1e-6);
        CHECK(r2 < 1e-6);
    }
    for (const auto& sd : {ld(1e4, 1, 1), ex(1e4, 1, 1)}) {
        const auto [r1, r2] = sum_rule_residuals(sd);
        CHECK(r1 < 1e-5);
        CHECK(r2 < 1e-5);
    }
    CHECK_THROWS_AS(sum_rule_residuals(ld(0, 1, 1)), InvalidArgument);
}

TEST_CASE("high-temperature equipartition") {
    const auto s = steady_covariance(ld(1, 2, 4), 100.0);
    CHECK(4.0 * s.sigma11 / 100.0 == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(s.sigma22 / 100.0 == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("second moments grow with temperature") {
    for (const auto& sd : {ld(2, 2, 4), ex(2, 2, 4)}) {
        double prev11 = 0.0, prev22 = 0.0;
        for (double t : {0.0, 0.1, 1.0, 10.0}) {
            const auto s = steady_covariance(sd, t);
            CHECK(s.sigma11 >= prev11);
            CHECK(s.sigma22 >= prev22);
            CHECK(s.sigma11 * s.sigma22 >= 0.25);
            prev11 = s.sigma11;
            prev22 = s.sigma22;
        }
    }
}

TEST_CASE("approach to the free state is monotone in gamma") {
    const auto free = free_oscillator_state(2.0, 0.5);
    double d11 = INFINITY, d22 = INFINITY;
    for (double g : {1e-2, 1e-3, 1e-4}) {
        const auto s = steady_covariance(ld(g, 2, 4), 0.5);
        CHECK(std::abs(s.sigma11 - free.sigma11) < d11);
        CHECK(std::abs(s.sigma22 - free.sigma22) < d22);
        d11 = std::abs(s.sigma11 - free.sigma11);
        d22 = std::abs(s.sigma22 - free.sigma22);
    }
}

TEST_CASE("ultrastrong scaling of the momentum variance") {
    const auto a = steady_covariance(ld(1e3, 1, 1), 0.0);
    const auto b = steady_covariance(ld(1e5, 1, 1), 0.0);
    const double slope = std::log(b.sigma22 / a.sigma22) / std::log(100.0);
    CHECK(slope == doctest::Approx(0.5).epsilon(0.02));
    CHECK(b.sigma11 * b.sigma22 >= 0.24);
    CHECK(b.sigma11 * b.sigma22 <= 0.26);
}

TEST_CASE("exponential cutoff at very strong coupling") {
    const auto s = steady_covariance(ex(1e4, 1, 1), 0.0);
    CHECK(std::isfinite(s.sigma11));
    CHECK(s.sigma11 * s.sigma22 >= 0.25);
    CHECK(s.sum_rule_1_residual < 1e-5);
}

TEST_CASE("negative temperature is rejected") {
    CHECK_THROWS_AS(steady_covariance(ld(1, 2, 4), -1.0), InvalidArgument);
}
