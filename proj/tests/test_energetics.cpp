#include <doctest.h>

#include <cmath>

#include "clbattery/energetics.hpp"
#include "clbattery/symplectic.hpp"

using namespace clbattery;

namespace {
SpectralDensity ld(double gamma, double w0, double wc) {
    return SpectralDensity(gamma, w0, wc, CutoffFunction::lorentz_drude());
}
SpectralDensity ex(double gamma, double w0, double wc) {
    return SpectralDensity(gamma, w0, wc, CutoffFunction::exponential());
}
}  // namespace

TEST_CASE("field invariants of one cycle") {
    const auto e = cycle_energetics(ld(3, 2, 4), 0.3);
    CHECK(e.w_cd == e.w_c + e.w_d);
    CHECK(e.t_sigma == e.w_cd - e.ergotropy);
    CHECK(e.ergotropy >= 0.0);
    CHECK(e.efficiency >= 0.0);
    CHECK(e.efficiency <= 1.0);
    CHECK(e.efficiency == doctest::Approx(e.ergotropy / e.w_cd));
}

TEST_CASE("zero coupling leaves the efficiency undefined") {
    const auto e = cycle_energetics(ld(0, 2, 4), 0.3);
    CHECK(std::isnan(e.efficiency));
    CHECK(e.w_cd == doctest::Approx(0.0));
    CHECK(e.ergotropy == doctest::Approx(0.0));
}

TEST_CASE("efficiency peak at T = 0.1") {
    const auto sd = ld(1, 2, 4);
    const auto best = maximize_efficiency(sd, 0.1, 0.1, 20.0);
    CHECK(best.gamma == doctest::Approx(3.8).epsilon(0.05));
    CHECK(best.energetics.efficiency == doctest::Approx(0.065).epsilon(0.05));
    CHECK(best.energetics.ergotropy == doctest::Approx(0.7).epsilon(0.1));
    const auto far = cycle_energetics(sd.with_gamma(14.4), 0.1);
    CHECK(far.efficiency / best.energetics.efficiency == doctest::Approx(0.80).epsilon(0.05));
    CHECK(far.ergotropy / best.energetics.ergotropy == doctest::Approx(3.2).epsilon(0.05));
}

TEST_CASE("copies map onto a rescaled coupling") {
    const auto sd = ld(0.5, 2, 4);
    const auto a = n_copy_energetics(sd, 3, 0.1);
    const auto b = cycle_energetics(sd.with_gamma(1.5), 0.1);
    CHECK(a.w_c == b.w_c);
    CHECK(a.w_d == b.w_d);
    CHECK(a.ergotropy == b.ergotropy);
    CHECK(a.efficiency == b.efficiency);
    const auto one = n_copy_energetics(sd, 1, 0.1);
    CHECK(one.efficiency == cycle_energetics(sd, 0.1).efficiency);
    CHECK(n_copy_energetics(ld(0.1, 2, 4), 10, 0.1).efficiency > cycle_energetics(ld(0.1, 2, 4), 0.1).efficiency);
    CHECK_THROWS_AS(n_copy_energetics(sd, 0, 0.1), InvalidArgument);
}

TEST_CASE("high temperature") {
    for (double g : {1.0, 10.0}) {
        const auto sd = ld(g, 2, 4);
        const auto e = cycle_energetics(sd, 100.0);
        const auto p = high_temperature_predictions(sd, 100.0);
        CHECK(e.w_cd == doctest::Approx(p.w_cd).epsilon(0.05));
        CHECK(e.ergotropy < 10 * p.ergotropy_order);
    }
    CHECK(cycle_energetics(ld(5, 2, 4), 100.0).efficiency < cycle_energetics(ld(5, 2, 4), 1.0).efficiency);
}

TEST_CASE("dissipated work and entropy across the grid") {
    for (const auto& base : {ld(1, 2, 4), ex(1, 2, 4)}) {
        for (double g : {0.1, 1.0, 5.0, 20.0}) {
            for (double t : {0.0, 0.1, 1.0, 10.0}) {
                const auto e = cycle_energetics(base.with_gamma(g), t);
                CHECK(e.t_sigma >= -1e-9 * std::max(1.0, e.w_cd));
                const double s11 = e.steady.sigma11, s22 = e.steady.sigma22;
                CHECK(std::abs(gaussian_entropy(CovarianceMatrix::single_mode(s11, 0, s22)) -
                               gaussian_entropy(passive_covariance(s11, 0, s22, 2.0))) <= 1e-10);
            }
        }
    }
}

TEST_CASE("weak-coupling scaling") {
    const auto lo = cycle_energetics(ld(1e-3, 2, 4), 0.1);
    const auto hi = cycle_energetics(ld(1e-2, 2, 4), 0.1);
    CHECK(std::log10(hi.ergotropy / lo.ergotropy) == doctest::Approx(2.0).epsilon(0.025));
    CHECK(std::log10(hi.efficiency / lo.efficiency) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("ultrastrong scaling") {
    const auto lo = cycle_energetics(ld(1e3, 1, 1), 0.0);
    const auto hi = cycle_energetics(ld(1e5, 1, 1), 0.0);
    CHECK(std::log(hi.ergotropy / lo.ergotropy) / std::log(100.0) == doctest::Approx(0.5).epsilon(0.04));
    CHECK(std::log(hi.efficiency / lo.efficiency) / std::log(100.0) == doctest::Approx(-0.5).epsilon(0.04));
}

TEST_CASE("zero-temperature optimum is scale invariant") {
    double first = 0.0;
    for (double w0 : {1.0, 2.0, 5.0}) {
        const auto best = maximize_efficiency(ld(1, w0, w0), 0.0, 0.5, 50.0);
        CHECK(best.energetics.efficiency == doctest::Approx(0.1019).epsilon(0.015));
        CHECK(best.gamma == doctest::Approx(5.94).epsilon(0.025));
        if (first == 0.0) first = best.energetics.efficiency;
        CHECK(std::abs(best.energetics.efficiency - first) < 1e-3);
    }
}
