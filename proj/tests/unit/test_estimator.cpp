#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "spdc/errors.hpp"
#include "spdc/estimator.hpp"
#include "spdc/forward_model.hpp"

using namespace spdc;

namespace {

const double kBell = 1.0 / std::numbers::sqrt2;

SpectralIntegrals integrals(double ratio) {
    SpectralIntegrals s{};
    s.i1 = 73.0;
    s.i2 = 73.0 / ratio;
    s.i2_max = s.i2;
    s.ratio_i1_over_i2max = ratio;
    return s;
}

ObservedProbabilities forward(double p0_i1, double xa, double xb, const Calibration& cal) {
    const ChannelParams ch{{0.5, 2 * xa, 1.0, cal.p_dark_a}, {0.5, 2 * xb, 1.0, cal.p_dark_b}};
    const auto p = predict(p0_i1 / 73.0, integrals(cal.ratio_i1_over_i2), cal.k_t, ch).probabilities;
    return {p.p_a, p.p_b, p.p_c};
}

}  // namespace

TEST_CASE("exact inversion of the forward model") {
    const Calibration cal{1.14, 0.75, 1.9e-4, 1.5e-4};
    const auto rep = estimate(forward(0.05, 0.0178, 0.0170, cal), cal);
    CHECK(rep.p0_i1.value == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(rep.x_a.value == doctest::Approx(0.0178).epsilon(1e-12));
    CHECK(rep.x_b.value == doctest::Approx(0.0170).epsilon(1e-12));
    CHECK(rep.p0_i1.sigma == 0.0);
    CHECK(rep.f_spdc.value == doctest::Approx(fidelity_from_rate(0.05, cal)).epsilon(1e-12));
    CHECK(rep.f_sys.value == doctest::Approx(system_fidelity(0.05, 0.0178, 0.0170, cal)).epsilon(1e-12));
    CHECK(rep.bell_margin == doctest::Approx(rep.f_sys.value - kBell));
}

TEST_CASE("round trip over random valid parameters") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const Calibration cal{1.0 + 1.5 * u(rng), 0.1 + 0.9 * u(rng), 1e-3 * u(rng), 1e-3 * u(rng)};
        const double p = 0.001 + 0.099 * u(rng), xa = 0.001 + 0.049 * u(rng), xb = 0.001 + 0.049 * u(rng);
        const auto rep = estimate(forward(p, xa, xb, cal), cal);
        CHECK(rep.p0_i1.value == doctest::Approx(p).epsilon(1e-9));
        CHECK(rep.x_a.value == doctest::Approx(xa).epsilon(1e-9));
        CHECK(rep.x_b.value == doctest::Approx(xb).epsilon(1e-9));
        CHECK(rep.f_spdc.value >= rep.f_sys.value);
        CHECK(rep.f_sys.value > 0.0);
        CHECK(rep.f_spdc.value <= 1.0);
    }
}

TEST_CASE("source fidelity is never below the system fidelity on random records") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    for (int i = 0; i < 5000; ++i) {
        const Calibration cal{1.0 + u(rng), 0.5 + 0.5 * u(rng), 1e-3 * u(rng), 1e-3 * u(rng)};
        const ObservedProbabilities o{0.05 * u(rng), 0.05 * u(rng), 1e-3 * u(rng)};
        try {
            const auto rep = estimate(o, cal);
            CHECK(rep.f_spdc.value >= rep.f_sys.value);
            CHECK((rep.f_sys.value > 0.0 && rep.f_spdc.value <= 1.0));
            ++checked;
        } catch (const EstimationError&) {
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("first-order uncertainties match finite differences") {
    const Calibration cal{1.14, 0.75, 1.9e-4, 1.5e-4};
    auto o = forward(0.05, 0.0178, 0.0170, cal);
    o.sigma_a = 1e-6;
    o.sigma_b = 2e-6;
    o.sigma_c = 3e-7;
    const auto rep = estimate(o, cal);
    const auto numeric = [&](auto get) {
        double total = 0.0;
        for (int k = 0; k < 3; ++k) {
            auto up = o, down = o;
            double* pu = k == 0 ? &up.p_a : k == 1 ? &up.p_b : &up.p_c;
            double* pd = k == 0 ? &down.p_a : k == 1 ? &down.p_b : &down.p_c;
            const double s = k == 0 ? o.sigma_a : k == 1 ? o.sigma_b : o.sigma_c;
            const double h = 1e-4 * s;
            *pu += h;
            *pd -= h;
            const double g = (get(estimate(up, cal)) - get(estimate(down, cal))) / (2 * h);
            total += g * g * s * s;
        }
        return std::sqrt(total);
    };
    CHECK(rep.p0_i1.sigma == doctest::Approx(numeric([](const PerformanceReport& r) { return r.p0_i1.value; })).epsilon(1e-5));
    CHECK(rep.x_a.sigma == doctest::Approx(numeric([](const PerformanceReport& r) { return r.x_a.value; })).epsilon(1e-5));
    CHECK(rep.x_b.sigma == doctest::Approx(numeric([](const PerformanceReport& r) { return r.x_b.value; })).epsilon(1e-5));
    CHECK(rep.f_sys.sigma == doctest::Approx(numeric([](const PerformanceReport& r) { return r.f_sys.value; })).epsilon(1e-5));
    CHECK(rep.f_spdc.sigma == doctest::Approx(numeric([](const PerformanceReport& r) { return r.f_spdc.value; })).epsilon(1e-5));
}

TEST_CASE("measurement records") {
    const Calibration cal{1.14, 0.75, 1.9e-4, 1.5e-4};
    const MeasurementRecord m{"run", 1'000'000, 1600, 1500, 30, 1.5};
    const auto o = observed_probabilities(m);
    CHECK(o.p_a == doctest::Approx(1.6e-3));
    CHECK(o.sigma_a == doctest::Approx(std::sqrt(1.6e-3 * (1 - 1.6e-3) / 1e6)));
    const auto rep = estimate(m, cal);
    CHECK(rep.label == "run");
    CHECK(rep.fluorescence_mw == 1.5);
    CHECK_THROWS_AS(estimate(MeasurementRecord{"z", 0, 0, 0, 0, {}}, cal), ValidationError);
    CHECK_THROWS_AS(estimate(MeasurementRecord{"z", 10, 11, 0, 0, {}}, cal), ValidationError);
    CHECK_THROWS_AS(estimate(MeasurementRecord{"z", 10, 2, 1, 2, {}}, cal), ValidationError);
}

TEST_CASE("error paths") {
    const Calibration cal{1.14, 0.75, 1.9e-4, 1.5e-4};
    // coincidences equal to the accidental level: nothing left
    const double pa = 1.5e-3, pb = 1.4e-3;
    CHECK_THROWS_AS(estimate(ObservedProbabilities{pa, pb, pa * pb * (1 - 1e-12)}, cal), EstimationError);
    try {
        estimate(ObservedProbabilities{pa, pb, 0.0}, cal);
    } catch (const EstimationError& e) {
        CHECK(std::string(e.what()).find("no excess coincidences") != std::string::npos);
    }
    CHECK_THROWS_AS(estimate(ObservedProbabilities{1.0e-4, pb, 1e-5}, cal), EstimationError);
    CHECK_THROWS_AS(estimate(ObservedProbabilities{pa, 1.5e-4, 1e-5}, cal), EstimationError);
    CHECK_THROWS_AS(estimate(ObservedProbabilities{pa, pb, 1e-5}, Calibration{0.9, 0.75, 0, 0}), ValidationError);
    CHECK_THROWS_AS(estimate(ObservedProbabilities{pa, pb, 1e-5}, Calibration{1.1, 0.0, 0, 0}), ValidationError);
}

TEST_CASE("loss decomposition") {
    const auto a = decompose_losses(0.0178, 0.301, 0.080);
    CHECK(a.c_f == doctest::Approx(0.739).epsilon(0.0005 / 0.739));
    CHECK(a.consistent);
    CHECK(0.301 * 0.74 * 0.080 == doctest::Approx(0.0178).epsilon(0.00005 / 0.0178));
    CHECK(decompose_losses(0.0170, 0.308, 0.076).c_f == doctest::Approx(0.726).epsilon(0.0005 / 0.726));
    CHECK(decompose_losses(0.3 * 0.5, 0.3, 0.5).c_f == doctest::Approx(1.0));
    const auto bad = decompose_losses(0.2, 0.3, 0.5);
    CHECK_FALSE(bad.consistent);
    CHECK(bad.c_f == doctest::Approx(4.0 / 3.0));
    CHECK_THROWS_AS(decompose_losses(0.1, 0.0, 0.5), ValidationError);

    Calibration cal{1.14, 0.75, 1.9e-4, 1.5e-4, 0.301, 0.308, 0.080, 0.076};
    const auto rep = estimate(forward(0.05, 0.0178, 0.0170, cal), cal);
    REQUIRE(rep.c_f_a);
    CHECK(*rep.c_f_a == doctest::Approx(0.739).epsilon(0.0005 / 0.739));
    CHECK(*rep.c_f_b == doctest::Approx(0.726).epsilon(0.0005 / 0.726));
    cal.eta_a = 0.02;
    CHECK_FALSE(estimate(forward(0.05, 0.0178, 0.0170, cal), cal).warnings.empty());
}

TEST_CASE("fidelity and Bell thresholds") {
    CHECK(fidelity_from_rate(0.0, {1.14, 0.75, 0, 0}) == 1.0);
    CHECK(fidelity_from_rate(0.121, {1.14, 0.75, 0, 0}) == doctest::Approx(kBell).epsilon(0.005 / kBell));
    CHECK(fidelity_from_rate(0.066, {2.09, 0.75, 0, 0}) == doctest::Approx(kBell).epsilon(0.005 / kBell));
    CHECK(bell_threshold({1.14, 0.75, 0, 0}) == doctest::Approx(0.121).epsilon(0.005 / 0.121));
    CHECK(bell_threshold({2.09, 0.75, 0, 0}) == doctest::Approx(0.066).epsilon(0.005 / 0.066));
    CHECK(bell_threshold({1.0, 1.0, 0, 0}) == doctest::Approx((std::numbers::sqrt2 - 1) / 4).epsilon(1e-14));
    const Calibration c{1.3, 0.8, 0, 0};
    CHECK(fidelity_from_rate(bell_threshold(c), c) == doctest::Approx(kBell).epsilon(1e-14));
    CHECK_THROWS_AS(fidelity_from_rate(-0.1, c), ValidationError);
}

TEST_CASE("system Bell threshold agrees with a direct scan") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Calibration cal{1.0 + u(rng), 0.5 + 0.5 * u(rng), 2e-4 * u(rng), 2e-4 * u(rng)};
        const double xa = 0.005 + 0.05 * u(rng), xb = 0.005 + 0.05 * u(rng);
        const auto t = bell_threshold_sys(xa, xb, cal);
        // bisection on the falling side, from the source threshold downward
        const auto above = [&](double s) { return system_fidelity(s, xa, xb, cal) >= kBell; };
        double lo = 1e-9, hi = bell_threshold(cal);
        bool any = false;
        for (int k = 0; k <= 2000 && !any; ++k) any = above(hi * k / 2000.0 + 1e-12);
        if (!t) {
            CHECK_FALSE(any);
            continue;
        }
        REQUIRE(any);
        CHECK(*t <= bell_threshold(cal) * (1 + 1e-12));
        lo = *t * 0.5;
        CHECK(above(lo));
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            (above(mid) ? lo : hi) = mid;
        }
        CHECK(*t == doctest::Approx(lo).epsilon(1e-9));
    }
    CHECK(bell_threshold_sys(0.0178, 0.017, {1.14, 0.75, 0.0, 0.0}) ==
          doctest::Approx(bell_threshold({1.14, 0.75, 0.0, 0.0})).epsilon(1e-12));
}

TEST_CASE("transmission estimate is independent of the pair rate") {
    const Calibration cal{1.14, 0.75, 1.9e-4, 1.5e-4};
    for (double p = 0.005; p <= 0.1; p += 0.005) {
        const auto rep = estimate(forward(p, 0.0178, 0.0170, cal), cal);
        CHECK(rep.x_a.value == doctest::Approx(0.0178).epsilon(1e-10));
    }
}

TEST_CASE("continuous-wave approximation") {
    CHECK(approximate_cw_probability(1e4, 100.0) == doctest::Approx(1e-3));
    CHECK_THROWS_AS(approximate_cw_probability(1e4, 0.0), ValidationError);
}
