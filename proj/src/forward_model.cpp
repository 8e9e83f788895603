#include "spdc/forward_model.hpp"

#include <cmath>
#include <cstdio>

#include "spdc/errors.hpp"

namespace spdc {
namespace {

void validate(const Channel& c, const char* name) {
    const auto unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (!unit(c.r) || !unit(c.t) || !unit(c.eta))
        throw ValidationError(std::string("channel ") + name + ": r, t and eta must lie in [0, 1]");
    if (!std::isfinite(c.p_dark) || c.p_dark < 0.0 || c.p_dark >= 1.0)
        throw ValidationError(std::string("channel ") + name + ": dark-count probability must lie in [0, 1)");
}

std::string fmt(const char* pattern, double v) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

}  // namespace

void validate(const ChannelParams& ch) {
    validate(ch.a, "A");
    validate(ch.b, "B");
    if (ch.a.r + ch.b.r > 1.0 + 1e-12) throw ValidationError("coupler ratios must sum to at most 1");
}

double noise_coincidences(double p_a, double p_b, double p_dark_a, double p_dark_b) {
    return (p_a - p_dark_a) * p_dark_b + (p_b - p_dark_b) * p_dark_a + p_dark_a * p_dark_b;
}

double accidental_from_singles(const CountProbabilities& p, double p_dark_a, double p_dark_b) {
    return (p.p_a - p_dark_a) * (p.p_b - p_dark_b);
}

Prediction predict(double p0_per_ghz, const SpectralIntegrals& integrals, double k_t,
                   const ChannelParams& ch) {
    validate(ch);
    if (!std::isfinite(p0_per_ghz) || p0_per_ghz < 0.0)
        throw ValidationError("pair probability density must be non-negative");
    if (!(k_t > 0.0 && k_t <= 1.0)) throw ValidationError("gating factor must lie in (0, 1]");
    if (!(integrals.i1 > 0.0) || integrals.i2 < 0.0)
        throw ValidationError("filter integrals must be positive");

    Prediction out;
    out.integrals = integrals;
    out.k_t = k_t;
    out.p0_i1 = p0_per_ghz * integrals.i1;

    const double x_a = ch.a.x();
    const double x_b = ch.b.x();
    const double n_a = ch.a.p_dark;
    const double n_b = ch.b.p_dark;

    auto& p = out.probabilities;
    p.p_a = 2.0 * out.p0_i1 * x_a * k_t + n_a;
    p.p_b = 2.0 * out.p0_i1 * x_b * k_t + n_b;
    p.p_tc = 2.0 * p0_per_ghz * integrals.i2 * x_a * x_b * k_t;
    p.p_ac = 4.0 * out.p0_i1 * out.p0_i1 * x_a * x_b * k_t * k_t;
    p.p_nab = noise_coincidences(p.p_a, p.p_b, n_a, n_b);
    p.p_c = p.p_tc + p.p_ac + p.p_nab;

    if (x_a > kStrainedTransmission)
        out.warnings.push_back(fmt("X_A = %.4g exceeds the small-transmission regime", x_a));
    if (x_b > kStrainedTransmission)
        out.warnings.push_back(fmt("X_B = %.4g exceeds the small-transmission regime", x_b));
    if (out.p0_i1 > kStrainedPairProbability)
        out.warnings.push_back(
            fmt("p0*I1 = %.4g: multi-pair terms beyond double pairs are not negligible", out.p0_i1));
    if (p.p_a > 1.0 || p.p_b > 1.0 || p.p_c > 1.0)
        out.warnings.push_back("closed-form probabilities exceed 1; the model is out of range");
    return out;
}

Prediction predict(const SourceParams& src, const ChannelParams& ch,
                   const IntegralOptions& options) {
    const auto integrals =
        spectral_integrals(src.filter, src.envelope, src.detuning_ghz, options);
    return predict(src.p0_per_ghz, integrals, k_t(src.pulse_gate), ch);
}

}  // namespace spdc
