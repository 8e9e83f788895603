#include "spdc/gating.hpp"

#include <cmath>
#include <numbers>

#include "spdc/errors.hpp"

namespace spdc {

void validate(const PulseGate& pg) {
    const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(pg.delta_t_ns)) throw ValidationError("pulse half-duration must be positive");
    if (!positive(pg.gate_ns)) throw ValidationError("gate duration must be positive");
    if (!positive(pg.rep_rate_mhz)) throw ValidationError("repetition rate must be positive");
}

double k_t(const PulseGate& pg) {
    validate(pg);
    return std::erf(pg.gate_ns / (2.0 * pg.delta_t_ns));
}

double fwhm_to_delta_t(double fwhm_ns) {
    if (!std::isfinite(fwhm_ns) || fwhm_ns <= 0.0)
        throw ValidationError("pulse FWHM must be positive");
    return fwhm_ns / (2.0 * std::sqrt(std::numbers::ln2));
}

double per_pulse_probability(double rate_hz, const PulseGate& pg) {
    validate(pg);
    if (!std::isfinite(rate_hz) || rate_hz < 0.0) throw ValidationError("rate must be non-negative");
    return rate_hz / (pg.rep_rate_mhz * 1e6);
}

}  // namespace spdc
