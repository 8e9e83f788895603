#pragma once

#include <string>
#include <vector>

#include "spdc/filters.hpp"
#include "spdc/gating.hpp"

namespace spdc {

struct SourceParams {
    double p0_per_ghz;  // peak spectral pair probability density per pulse
    FilterSpec filter;
    SpectralEnvelope envelope = UnityEnvelope{};
    double detuning_ghz = 0.0;
    PulseGate pulse_gate;
};

// One detection channel: coupler output ratio, in-line transmission (filter
// insertion loss, propagation and fiber coupling), detector efficiency and
// dark-count probability per gate.
struct Channel {
    double r;
    double t;
    double eta;
    double p_dark;

    double x() const { return r * t * eta; }
};

struct ChannelParams {
    Channel a;
    Channel b;
};

void validate(const ChannelParams& ch);

// Per-gate probabilities: singles, true / accidental / noise coincidences and
// total coincidences.
struct CountProbabilities {
    double p_a = 0.0;
    double p_b = 0.0;
    double p_tc = 0.0;
    double p_ac = 0.0;
    double p_nab = 0.0;
    double p_c = 0.0;
};

struct Prediction {
    CountProbabilities probabilities;
    double p0_i1 = 0.0;
    double k_t = 0.0;
    SpectralIntegrals integrals{};
    // Raised when the small-transmission or low-pair-probability
    // approximations behind the closed forms are strained.
    std::vector<std::string> warnings;
};

inline constexpr double kStrainedTransmission = 0.1;
inline constexpr double kStrainedPairProbability = 0.2;

Prediction predict(const SourceParams& src, const ChannelParams& ch,
                   const IntegralOptions& options = {});

// Closed forms from precomputed filter integrals and gating factor.
Prediction predict(double p0_per_ghz, const SpectralIntegrals& integrals, double k_t,
                   const ChannelParams& ch);

// Accidentals as the product of the dark-corrected singles.
double accidental_from_singles(const CountProbabilities& p, double p_dark_a, double p_dark_b);

// Noise coincidences: one photon and one dark count, or two dark counts.
double noise_coincidences(double p_a, double p_b, double p_dark_a, double p_dark_b);

}  // namespace spdc
