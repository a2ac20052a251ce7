#include <doctest.h>

#include <cmath>
#include <numbers>

#include "clbattery/asymptotics.hpp"
#include "clbattery/energetics.hpp"

using namespace clbattery;

namespace {
constexpr double kPi = std::numbers::pi;
SpectralDensity ld(double gamma, double w0, double wc) {
    return SpectralDensity(gamma, w0, wc, CutoffFunction::lorentz_drude());
}
SpectralDensity ex(double gamma, double w0, double wc) {
    return SpectralDensity(gamma, w0, wc, CutoffFunction::exponential());
}
}  // namespace

TEST_CASE("Lorentz-Drude zero-temperature integrals at w0 = wc") {
    const auto closed = lorentz_drude_zero_temperature(1.0);
    CHECK(closed.phi0 == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(closed.psi0 == doctest::Approx(kPi - 1.0).epsilon(1e-14));
    CHECK(closed.phi0_linear_denominator == doctest::Approx(closed.phi0).epsilon(1e-14));
    const auto generic = weak_coupling_correction(ld(0.01, 2, 2), 0.0);
    CHECK(std::abs(generic.phi_t + 1.0) < 1e-6);
    CHECK(std::abs(generic.psi_t - (kPi - 1.0)) < 1e-6);
}

TEST_CASE("generic integrals follow the squared-denominator closed form off w0 = wc") {
    for (double w : {0.25, 0.5, 2.0, 4.0}) {
        const auto closed = lorentz_drude_zero_temperature(w);
        const auto generic = weak_coupling_correction(ld(0.01, w, 1.0), 0.0);
        CHECK(generic.phi_t == doctest::Approx(closed.phi0).epsilon(1e-6));
        CHECK(generic.psi_t == doctest::Approx(closed.psi0).epsilon(1e-6));
    }
}

TEST_CASE("linear corrections match the numerical steady state") {
    const auto sd = ld(0.01, 2, 4);
    const auto c = weak_coupling_correction(sd, 0.1);
    const auto s = steady_covariance(sd, 0.1);
    const auto free = free_oscillator_state(2.0, 0.1);
    const double ratio11 = (s.sigma11 - free.sigma11) / (0.01 * c.phi_t / (2 * kPi * 2.0));
    const double ratio22 = (s.sigma22 - free.sigma22) / (0.01 * 2.0 * c.psi_t / (2 * kPi));
    CHECK(ratio11 >= 0.9);
    CHECK(ratio11 <= 1.1);
    CHECK(ratio22 >= 0.9);
    CHECK(ratio22 <= 1.1);
    CHECK(c.sigma11_linear == doctest::Approx(free.sigma11 + 0.01 * c.phi_t / (2 * kPi * 2.0)));
    CHECK(c.reliable);
    CHECK_FALSE(weak_coupling_correction(ld(1.0, 2, 4), 0.1).reliable);
}

TEST_CASE("the linear remainder is superlinear") {
    const auto remainder = [](double g) {
        const auto sd = ld(g, 2, 4);
        const auto c = weak_coupling_correction(sd, 0.1);
        return std::abs(steady_covariance(sd, 0.1).sigma11 - c.sigma11_linear) / g;
    };
    CHECK(remainder(0.005) < remainder(0.02));
}

TEST_CASE("finite-temperature integrals tend to their zero-temperature values") {
    const auto zero = weak_coupling_correction(ld(0.01, 1, 1), 0.0);
    const auto cold = weak_coupling_correction(ld(0.01, 1, 1), 1e-3);
    CHECK(std::abs(cold.phi_t - zero.phi_t) < 1e-3);
}

TEST_CASE("weak-coupling energetics") {
    const auto sd = ld(0.01, 2, 4);
    const auto pred = weak_coupling_energetics(sd, 0.1);
    const auto full = cycle_energetics(sd, 0.1);
    CHECK(pred.ergotropy == doctest::Approx(full.ergotropy).epsilon(0.1));
    CHECK(pred.w_cd == doctest::Approx(full.w_cd).epsilon(0.1));
    const auto doubled = weak_coupling_energetics(sd.with_gamma(0.02), 0.1);
    CHECK(doubled.ergotropy == doctest::Approx(4.0 * pred.ergotropy).epsilon(1e-12));
}

TEST_CASE("low-temperature corrections") {
    const auto sd = ld(0.05, 2, 4);
    const auto at_zero = low_temperature_correction(sd, 0.0);
    const auto c = weak_coupling_correction(sd, 0.0);
    CHECK(at_zero.sigma11 == doctest::Approx(c.sigma11_linear).epsilon(1e-14));
    CHECK(at_zero.sigma22 == doctest::Approx(c.sigma22_linear).epsilon(1e-14));

    const double s0 = steady_covariance(sd, 0.0).sigma11;
    const double s2 = steady_covariance(sd, 0.2).sigma11;
    // f(0) = 2 for Lorentz-Drude.
    const double predicted = 2.0 * kPi / (3 * 2.0) * std::pow(0.2 / 2.0, 2) * 0.05;
    CHECK((s2 - s0) == doctest::Approx(predicted).epsilon(0.25));
}

TEST_CASE("momentum thermal shift is quartic once the free excess is removed") {
    const auto sd = ld(0.05, 2, 4);
    const double base = steady_covariance(sd, 0.0).sigma22;
    const auto shift = [&](double t) {
        const auto free = free_oscillator_state(2.0, t);
        return steady_covariance(sd, t).sigma22 - base - (free.sigma22 - 1.0);
    };
    const double ratio = shift(0.2) / shift(0.1);
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("ultrastrong predictions") {
    const auto p = ultrastrong_prediction(ld(1, 1, 1), 1e4);
    CHECK(p.g_infinity == 2.0);
    CHECK(p.sigma11_pred == doctest::Approx(1.0 / (2.0 * std::sqrt(2e4))).epsilon(1e-14));
    CHECK(p.sigma22_pred == doctest::Approx(std::sqrt(2e4) / 2.0).epsilon(1e-14));
    CHECK(p.sigma11_pred * p.sigma22_pred == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p.reliable);
    const auto e = ultrastrong_prediction(ex(1, 1, 1), 1e4);
    CHECK(e.sigma11_pred == p.sigma11_pred);
    CHECK(e.sigma22_pred == p.sigma22_pred);
}

TEST_CASE("numerical limit of the reduced shift") {
    const auto sd = ld(1, 1, 1);
    CHECK(std::abs(g_tilde(sd, 1e3) - 2.0) < 1e-3);
    const auto c = SpectralDensity(
        1, 1, 1, CutoffFunction::custom([](double z) { return z > 60 ? 0.0 : kPi * std::exp(-z); }, 60.0));
    CHECK(ultrastrong_prediction(c, 1e4).g_infinity == doctest::Approx(2.0).epsilon(1e-4));
}
