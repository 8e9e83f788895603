#include "spdc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "spdc/errors.hpp"

namespace spdc {
namespace {

constexpr double kBellFidelity = 1.0 / std::numbers::sqrt2;

bool probability(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

// First-order propagation for independent p_a, p_b, p_c.
double propagate(const ObservedProbabilities& o, double d_pa, double d_pb, double d_pc) {
    const double a = d_pa * o.sigma_a;
    const double b = d_pb * o.sigma_b;
    const double c = d_pc * o.sigma_c;
    return std::sqrt(a * a + b * b + c * c);
}

std::string fmt(const char* pattern, double v) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

}  // namespace

void validate(const Calibration& cal) {
    if (!std::isfinite(cal.ratio_i1_over_i2) || cal.ratio_i1_over_i2 < 1.0)
        throw ValidationError("calibration ratio I1/I2 must be at least 1");
    if (!(cal.k_t > 0.0 && cal.k_t <= 1.0)) throw ValidationError("K_T must lie in (0, 1]");
    if (!probability(cal.p_dark_a) || cal.p_dark_a >= 1.0 || !probability(cal.p_dark_b) ||
        cal.p_dark_b >= 1.0)
        throw ValidationError("dark-count probabilities must lie in [0, 1)");
    for (const auto& v : {cal.r_tau_a, cal.r_tau_b, cal.eta_a, cal.eta_b}) {
        if (v && !(*v > 0.0 && *v <= 1.0))
            throw ValidationError("loss calibration factors must lie in (0, 1]");
    }
}

void validate(const MeasurementRecord& m) {
    const std::string where = m.label.empty() ? std::string("record") : "record '" + m.label + "'";
    if (m.gates == 0) throw ValidationError(where + ": gate count must be positive");
    if (m.counts_a > m.gates || m.counts_b > m.gates)
        throw ValidationError(where + ": counts exceed the number of gates");
    if (m.coincidences > std::min(m.counts_a, m.counts_b))
        throw ValidationError(where + ": coincidences exceed the single counts");
}

ObservedProbabilities observed_probabilities(const MeasurementRecord& m) {
    validate(m);
    const double n = static_cast<double>(m.gates);
    const auto p = [n](std::uint64_t k) { return static_cast<double>(k) / n; };
    const auto sigma = [n](double q) { return std::sqrt(q * (1.0 - q) / n); };
    ObservedProbabilities o{p(m.counts_a), p(m.counts_b), p(m.coincidences)};
    o.sigma_a = sigma(o.p_a);
    o.sigma_b = sigma(o.p_b);
    o.sigma_c = sigma(o.p_c);
    return o;
}

PerformanceReport estimate(const ObservedProbabilities& o, const Calibration& cal) {
    validate(cal);
    if (!probability(o.p_a) || !probability(o.p_b) || !probability(o.p_c))
        throw ValidationError("observed probabilities must lie in [0, 1]");
    const double na = cal.p_dark_a;
    const double nb = cal.p_dark_b;
    const double sa = o.p_a - na;
    const double sb = o.p_b - nb;
    if (!(sa > 0.0)) throw EstimationError("singles on A do not exceed the dark-count probability");
    if (!(sb > 0.0)) throw EstimationError("singles on B do not exceed the dark-count probability");

    PerformanceReport r;
    r.observed = o;
    r.p_ac = sa * sb;
    r.p_nab = sa * nb + sb * na + na * nb;
    // p_ac + p_nab == p_a p_b
    r.p_tc = o.p_c - r.p_ac - r.p_nab;
    if (!(r.p_tc > 0.0))
        throw EstimationError(
            "no excess coincidences: coincidences do not exceed accidental and noise contributions");

    const double ratio = cal.ratio_i1_over_i2;
    const double kt = cal.k_t;
    const double ptc = r.p_tc;

    const double scale = 1.0 / (2.0 * ratio * kt);
    r.p0_i1.value = scale * r.p_ac / ptc;
    r.p0_i1.sigma = propagate(o, scale * sb * (ptc + sa * o.p_b) / (ptc * ptc),
                              scale * sa * (ptc + sb * o.p_a) / (ptc * ptc),
                              -scale * sa * sb / (ptc * ptc));

    // transmission of one channel comes from the singles of the other
    r.x_a.value = ratio * ptc / sb;
    r.x_a.sigma = propagate(o, -ratio * o.p_b / sb, ratio * (-o.p_a * sb - ptc) / (sb * sb),
                            ratio / sb);
    r.x_b.value = ratio * ptc / sa;
    r.x_b.sigma = propagate(o, ratio * (-o.p_b * sa - ptc) / (sa * sa), -ratio * o.p_a / sa,
                            ratio / sa);

    const double pab = o.p_a * o.p_b;
    const double d_sys = o.p_c + pab;
    r.f_sys.value = ptc / d_sys;
    r.f_sys.sigma = propagate(o, -2.0 * o.p_b * o.p_c / (d_sys * d_sys),
                              -2.0 * o.p_a * o.p_c / (d_sys * d_sys), 2.0 * pab / (d_sys * d_sys));

    const double e = ptc + 2.0 * r.p_ac;
    const auto d_spdc = [&](double d_ptc, double d_e) { return (d_ptc * e - ptc * d_e) / (e * e); };
    r.f_spdc.value = ptc / e;
    r.f_spdc.sigma = propagate(o, d_spdc(-o.p_b, -o.p_b + 2.0 * sb),
                               d_spdc(-o.p_a, -o.p_a + 2.0 * sa), d_spdc(1.0, 1.0));

    r.bell_margin = r.f_sys.value - kBellFidelity;
    r.bell_threshold_spdc = bell_threshold(cal);
    r.bell_threshold_sys = bell_threshold_sys(r.x_a.value, r.x_b.value, cal);

    if (cal.r_tau_a && cal.eta_a) {
        const auto loss = decompose_losses(r.x_a.value, *cal.r_tau_a, *cal.eta_a);
        r.c_f_a = loss.c_f;
        if (!loss.consistent)
            r.warnings.push_back(fmt("coupling efficiency on A = %.4g > 1: inconsistent calibration", loss.c_f));
    }
    if (cal.r_tau_b && cal.eta_b) {
        const auto loss = decompose_losses(r.x_b.value, *cal.r_tau_b, *cal.eta_b);
        r.c_f_b = loss.c_f;
        if (!loss.consistent)
            r.warnings.push_back(fmt("coupling efficiency on B = %.4g > 1: inconsistent calibration", loss.c_f));
    }
    if (r.x_a.value > 0.1 || r.x_b.value > 0.1)
        r.warnings.push_back("estimated transmission above 0.1: small-transmission approximation strained");
    if (r.p0_i1.value > 0.2)
        r.warnings.push_back(fmt("estimated p0*I1 = %.4g: multi-pair terms are not negligible", r.p0_i1.value));
    return r;
}

PerformanceReport estimate(const MeasurementRecord& m, const Calibration& cal) {
    auto report = estimate(observed_probabilities(m), cal);
    report.label = m.label;
    report.fluorescence_mw = m.fluorescence_mw;
    return report;
}

LossDecomposition decompose_losses(double x, double r_tau, double eta) {
    if (!(r_tau > 0.0 && r_tau <= 1.0) || !(eta > 0.0 && eta <= 1.0))
        throw ValidationError("coupler-line transmission and detector efficiency must lie in (0, 1]");
    if (!std::isfinite(x) || x < 0.0) throw ValidationError("transmission must be non-negative");
    const double c_f = x / (r_tau * eta);
    return {c_f, c_f <= 1.0};
}

double fidelity_from_rate(double p0_i1, const Calibration& cal) {
    validate(cal);
    if (!std::isfinite(p0_i1) || p0_i1 < 0.0) throw ValidationError("p0*I1 must be non-negative");
    return 1.0 / (1.0 + 4.0 * p0_i1 * cal.k_t * cal.ratio_i1_over_i2);
}

double bell_threshold(const Calibration& cal) {
    validate(cal);
    return (std::numbers::sqrt2 - 1.0) / (4.0 * cal.k_t * cal.ratio_i1_over_i2);
}

double system_fidelity(double p0_i1, double x_a, double x_b, const Calibration& cal) {
    validate(cal);
    const double sa = 2.0 * p0_i1 * x_a * cal.k_t;
    const double sb = 2.0 * p0_i1 * x_b * cal.k_t;
    const double p_tc = 2.0 * p0_i1 / cal.ratio_i1_over_i2 * x_a * x_b * cal.k_t;
    const double noise = sa * sb + sa * cal.p_dark_b + sb * cal.p_dark_a + cal.p_dark_a * cal.p_dark_b;
    if (!(p_tc > 0.0)) return 0.0;
    return 1.0 / (1.0 + 2.0 * noise / p_tc);
}

std::optional<double> bell_threshold_sys(double x_a, double x_b, const Calibration& cal) {
    validate(cal);
    if (!(x_a > 0.0) || !(x_b > 0.0)) return std::nullopt;
    // 2 (p_ac + p_nab) / p_tc = a s + b + c / s with s = p0 I1
    const double ratio = cal.ratio_i1_over_i2;
    const double a = 4.0 * ratio * cal.k_t;
    const double b = 2.0 * ratio * (cal.p_dark_b / x_b + cal.p_dark_a / x_a);
    const double c = ratio * cal.p_dark_a * cal.p_dark_b / (x_a * x_b * cal.k_t);
    const double q = std::numbers::sqrt2 - 1.0;
    const double slack = q - b;
    const double disc = slack * slack - 4.0 * a * c;
    if (slack <= 0.0 || disc < 0.0) return std::nullopt;
    return (slack + std::sqrt(disc)) / (2.0 * a);
}

double approximate_cw_probability(double rate_hz, double dead_time_ns) {
    if (!std::isfinite(rate_hz) || rate_hz < 0.0) throw ValidationError("rate must be non-negative");
    if (!std::isfinite(dead_time_ns) || dead_time_ns <= 0.0)
        throw ValidationError("dead time must be positive");
    return rate_hz * dead_time_ns * 1e-9;
}

}  // namespace spdc
