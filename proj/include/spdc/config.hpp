#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spdc/estimator.hpp"
#include "spdc/filters.hpp"
#include "spdc/forward_model.hpp"
#include "spdc/monte_carlo.hpp"

namespace spdc {

inline constexpr int kSchemaVersion = 1;

struct SourceSection {
    // exactly one of the two is set
    std::optional<double> p0_per_ghz;
    std::optional<double> p0_i1;
};

struct CalibrationOverrides {
    std::optional<double> ratio_i1_over_i2;
    std::optional<double> k_t;
    std::optional<double> p_dark_a;
    std::optional<double> p_dark_b;
    std::optional<double> r_tau_a;
    std::optional<double> r_tau_b;
    std::optional<double> eta_a;
    std::optional<double> eta_b;
};

// Line transmission given either directly or as (tau, coupling efficiency).
struct ChannelSection {
    Channel channel;
    std::optional<double> tau;
    std::optional<double> c_f;
};

struct SimulationSection {
    std::uint64_t n_pulses = 1'000'000;
    std::uint64_t seed = 1;
    std::optional<Interval> band;
    unsigned threads = 0;
    std::vector<double> p0_per_ghz_values;
    std::vector<double> p0_i1_values;
};

struct SweepSection {
    double d_min_ghz = -50.0;
    double d_max_ghz = 50.0;
    int n_points = 201;
};

// Parsed toolkit configuration. All units are fixed: GHz, THz, ns, MHz, mW,
// probabilities per gate.
struct ToolkitConfig {
    int schema_version = kSchemaVersion;
    std::optional<std::vector<NamedFilter>> filters;  // absent: built-in reference set
    FilterSpec filter = default_dwdm();
    SpectralEnvelope envelope = UnityEnvelope{};
    double detuning_ghz = 0.0;
    IntegralOptions integration;
    std::optional<PulseGate> pulse_gate;
    SourceSection source;
    std::optional<ChannelSection> channel_a;
    std::optional<ChannelSection> channel_b;
    CalibrationOverrides calibration;
    SimulationSection simulation;
    SweepSection sweep;
};

// Parses JSON text; relative tabulated-filter paths resolve against `base_dir`.
// Unknown keys are rejected with ValidationError.
ToolkitConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ToolkitConfig load_config(const std::filesystem::path& path);

const PulseGate& require_pulse_gate(const ToolkitConfig& cfg);
ChannelParams channel_params(const ToolkitConfig& cfg);

// p0 per GHz, converting from p0*I1 when needed.
double source_p0(const ToolkitConfig& cfg);
SourceParams source_params(const ToolkitConfig& cfg);
SimConfig sim_config(const ToolkitConfig& cfg);

// Calibration from the filter, gate and channels, with explicit overrides.
Calibration calibration(const ToolkitConfig& cfg);

// Measurement CSV: label,gates,counts_a,counts_b,coincidences[,fluorescence_mw]
std::vector<MeasurementRecord> parse_measurements_csv(const std::string& text);
std::vector<MeasurementRecord> load_measurements_csv(const std::filesystem::path& path);
std::string format_measurements_csv(const std::vector<MeasurementRecord>& records);

}  // namespace spdc
