#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spdc/config.hpp"
#include "spdc/report_io.hpp"

namespace spdc {

// Each command renders its result as text in the requested format.

std::vector<FilterRow> filter_rows(const std::vector<NamedFilter>& filters,
                                   const SpectralEnvelope& envelope,
                                   const IntegralOptions& options);

// Without a config (or without a 'filters' list) the built-in reference set is used.
std::string cmd_filters(const std::optional<ToolkitConfig>& cfg, Format format);

std::string cmd_sweep(const ToolkitConfig& cfg, Format format);

std::string cmd_predict(const ToolkitConfig& cfg, Format format);

struct SimulationRun {
    std::string label;
    double p0_per_ghz;
    double p0_i1;
    SimCounts counts;
};

std::vector<SimulationRun> run_simulations(const ToolkitConfig& cfg);
std::vector<MeasurementRecord> to_measurements(const std::vector<SimulationRun>& runs);

// JSON summary, or the measurement CSV for Format::csv.
std::string cmd_simulate(const ToolkitConfig& cfg, Format format);
std::string format_simulation(const ToolkitConfig& cfg, const std::vector<SimulationRun>& runs,
                              Format format);

std::string cmd_estimate(const std::vector<MeasurementRecord>& records, const ToolkitConfig& cfg,
                         Format format);

}  // namespace spdc
