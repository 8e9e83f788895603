#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace spdc {

// Quantities established once before characterization: the filter ratio at
// the operating detuning, the gating factor and the detector noise. The loss
// calibration (coupler ratio x line transmission, detector efficiency) is
// only needed for the coupling efficiency.
struct Calibration {
    double ratio_i1_over_i2;
    double k_t;
    double p_dark_a;
    double p_dark_b;
    std::optional<double> r_tau_a;
    std::optional<double> r_tau_b;
    std::optional<double> eta_a;
    std::optional<double> eta_b;
};

void validate(const Calibration& cal);

struct MeasurementRecord {
    std::string label;
    std::uint64_t gates = 0;
    std::uint64_t counts_a = 0;
    std::uint64_t counts_b = 0;
    std::uint64_t coincidences = 0;
    std::optional<double> fluorescence_mw;  // carried through untouched
};

void validate(const MeasurementRecord& m);

// Per-gate probabilities with their standard errors. A zero sigma means the
// value is taken as exact.
struct ObservedProbabilities {
    double p_a;
    double p_b;
    double p_c;
    double sigma_a = 0.0;
    double sigma_b = 0.0;
    double sigma_c = 0.0;
};

// Counts divided by gates, with binomial standard errors.
ObservedProbabilities observed_probabilities(const MeasurementRecord& m);

struct Estimate {
    double value = 0.0;
    double sigma = 0.0;
};

struct PerformanceReport {
    std::string label;
    ObservedProbabilities observed{};
    Estimate p0_i1;
    Estimate x_a;
    Estimate x_b;
    Estimate f_sys;
    Estimate f_spdc;
    double bell_margin = 0.0;  // f_sys - 1/sqrt(2)
    std::optional<double> c_f_a;
    std::optional<double> c_f_b;
    double p_tc = 0.0;
    double p_ac = 0.0;
    double p_nab = 0.0;
    // Largest p0*I1 keeping the source fidelity above 1/sqrt(2).
    double bell_threshold_spdc = 0.0;
    // Same bound for the system fidelity at the estimated transmissions and
    // the calibrated dark counts; empty when F_sys never reaches 1/sqrt(2).
    std::optional<double> bell_threshold_sys;
    std::optional<double> fluorescence_mw;
    std::vector<std::string> warnings;
};

// Inverts singles and coincidences into pair probability, transmissions and
// fidelities. Throws EstimationError when the record carries no excess
// coincidences or the singles do not exceed the dark counts.
PerformanceReport estimate(const ObservedProbabilities& observed, const Calibration& cal);
PerformanceReport estimate(const MeasurementRecord& m, const Calibration& cal);

struct LossDecomposition {
    double c_f;
    bool consistent;  // false when c_f > 1
};

// Coupling efficiency x / (r_tau eta).
LossDecomposition decompose_losses(double x, double r_tau, double eta);

// Source fidelity predicted from the pair probability: 1 / (1 + 4 p0I1 K_T I1/I2).
double fidelity_from_rate(double p0_i1, const Calibration& cal);

// p0*I1 at which fidelity_from_rate falls to 1/sqrt(2).
double bell_threshold(const Calibration& cal);

// System fidelity for given pair probability and transmissions.
double system_fidelity(double p0_i1, double x_a, double x_b, const Calibration& cal);

// Largest p0*I1 with system_fidelity >= 1/sqrt(2), if any.
std::optional<double> bell_threshold_sys(double x_a, double x_b, const Calibration& cal);

// Approximate per-window probability for a continuous-wave source: rate times
// detector dead time. Not part of the pulsed model; use with care.
double approximate_cw_probability(double rate_hz, double dead_time_ns);

}  // namespace spdc
