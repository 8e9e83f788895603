#pragma once

namespace spdc {

// Gaussian pump pulse (intensity proportional to exp(-t^2 / delta_t^2)) seen
// through a detector gate of duration gate_ns centered on the pulse.
struct PulseGate {
    double delta_t_ns;
    double gate_ns;
    double rep_rate_mhz;
};

void validate(const PulseGate& pg);

// Fraction of the pulse energy inside the gate: erf(T / (2 delta_t)).
double k_t(const PulseGate& pg);

// Intensity FWHM to the 1/e intensity half-duration: fwhm / (2 sqrt(ln 2)).
double fwhm_to_delta_t(double fwhm_ns);

// Count rate (1/s) divided by the repetition rate.
double per_pulse_probability(double rate_hz, const PulseGate& pg);

}  // namespace spdc
