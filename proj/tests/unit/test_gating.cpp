#include <doctest.h>

#include <cmath>
#include <random>

#include "spdc/errors.hpp"
#include "spdc/gating.hpp"

using namespace spdc;

namespace {

// Composite Simpson rule of exp(-t^2/dt^2), independent of the library quadrature.
double simpson_gaussian(double lo, double hi, double dt, int n) {
    const double h = (hi - lo) / n;
    const auto f = [dt](double t) { return std::exp(-(t * t) / (dt * dt)); };
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace

TEST_CASE("k_t reference values") {
    CHECK(k_t({1.0, 100.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-12));
    // erf(1)
    CHECK(k_t({3.0, 6.0, 2.0}) == doctest::Approx(0.8427007929497149).epsilon(1e-14));
    // 20 ns gate, 20.3 ns intensity FWHM
    const double kt = k_t({fwhm_to_delta_t(20.3), 20.0, 2.0});
    CHECK(kt == doctest::Approx(0.75).epsilon(0.01 / 0.75));
    CHECK(kt == doctest::Approx(0.753955).epsilon(1e-6));
}

TEST_CASE("fwhm_to_delta_t") {
    CHECK(fwhm_to_delta_t(20.3) == doctest::Approx(12.19).epsilon(0.005 / 12.19));
    CHECK(fwhm_to_delta_t(1.6651) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK_THROWS_AS(fwhm_to_delta_t(0.0), ValidationError);
    CHECK_THROWS_AS(fwhm_to_delta_t(-1.0), ValidationError);
}

TEST_CASE("k_t validation") {
    CHECK_THROWS_AS(k_t({0.0, 20.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(k_t({1.0, -1.0, 2.0}), ValidationError);
    CHECK_THROWS_AS(k_t({1.0, 1.0, 0.0}), ValidationError);
}

TEST_CASE("k_t closed form matches direct integration of the pulse") {
    for (const double dt : {0.5, 3.0, 12.19}) {
        for (const double gate : {0.1, 1.0, 20.0, 40.0}) {
            const double inside = simpson_gaussian(-gate / 2, gate / 2, dt, 20000);
            const double total = simpson_gaussian(-40 * dt, 40 * dt, dt, 200000);
            CHECK(std::abs(k_t({dt, gate, 2.0}) - inside / total) < 1e-10);
        }
    }
}

TEST_CASE("k_t is monotone in the gate and the pulse duration") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double dt = u(rng);
        double t1 = u(rng);
        double t2 = u(rng);
        if (t1 == t2) continue;
        if (t1 > t2) std::swap(t1, t2);
        const double k1 = k_t({dt, t1, 1.0});
        const double k2 = k_t({dt, t2, 1.0});
        // erf saturates to 1 in double precision for very long gates
        if (k1 < 1.0) CHECK(k1 < k2);
        CHECK(k1 > 0.0);
        CHECK(k2 <= 1.0);
        const double longer = k_t({dt * 1.5, t1, 1.0});
        if (k1 < 1.0) CHECK(longer < k1);
    }
}

TEST_CASE("per-pulse probability from a count rate") {
    CHECK(per_pulse_probability(2000.0, {1.0, 1.0, 2.0}) == doctest::Approx(1e-3));
    CHECK_THROWS_AS(per_pulse_probability(-1.0, {1.0, 1.0, 2.0}), ValidationError);
}
