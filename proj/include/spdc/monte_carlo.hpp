#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spdc/filters.hpp"
#include "spdc/forward_model.hpp"

namespace spdc {

struct SimConfig {
    SourceParams src;
    ChannelParams ch;
    std::uint64_t n_pulses = 1;
    std::uint64_t seed = 0;
    // Spectral sampling window for the signal photon (GHz offsets from the
    // filter center). Derived from the filter support when absent.
    std::optional<Interval> band;
    // 0 selects std::thread::hardware_concurrency().
    unsigned threads = 0;
};

struct SimCounts {
    std::uint64_t n_gates = 0;
    std::uint64_t singles_a = 0;
    std::uint64_t singles_b = 0;
    std::uint64_t coincidences = 0;

    double p_a() const { return fraction(singles_a); }
    double p_b() const { return fraction(singles_b); }
    double p_c() const { return fraction(coincidences); }
    double sigma_a() const { return binomial_sigma(singles_a); }
    double sigma_b() const { return binomial_sigma(singles_b); }
    double sigma_c() const { return binomial_sigma(coincidences); }

    friend bool operator==(const SimCounts&, const SimCounts&) = default;

private:
    double fraction(std::uint64_t k) const {
        return n_gates ? static_cast<double>(k) / static_cast<double>(n_gates) : 0.0;
    }
    double binomial_sigma(std::uint64_t k) const;
};

// Largest transmission allowed at the edges of the sampling band.
inline constexpr double kBandEdgeTransmission = 1e-6;
// Largest mean pair number per pulse accepted by the sampler.
inline constexpr double kMaxMeanPairs = 30.0;

// Sampling band used for `cfg`; validates an explicit band.
Interval simulation_band(const SimConfig& cfg);

// Pulse-by-pulse simulation with Poisson pair numbers, statistical splitting,
// Gaussian emission times and threshold detectors. The outcome depends only on
// (seed, configuration), never on the number of worker threads.
SimCounts simulate(const SimConfig& cfg);

// simulate() for each value of p0; run k uses seed + k.
std::vector<std::pair<double, SimCounts>> sweep_p0(const SimConfig& cfg,
                                                   const std::vector<double>& p0_values);

// Counter-based generator: one independent stream per (key, pulse index).
class PulseRng {
public:
    PulseRng(std::uint64_t key, std::uint64_t index);

    std::uint64_t next();
    // Uniform in [0, 1).
    double uniform();
    // Uniform in (0, 1].
    double uniform_open_zero();

    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t state_;
};

}  // namespace spdc
