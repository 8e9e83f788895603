#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace spdc {

// Frequencies are GHz offsets from the filter center unless stated otherwise.

struct Rectangular {
    double full_width_ghz;
};

struct Triangular {
    double base_half_width_ghz;
};

// F(u) = exp(-u^2 / w^2)
struct Gaussian {
    double one_over_e_half_width_ghz;
};

// Full widths of the flat top and of the base; linear edges in between.
struct Trapezoid {
    double plateau_width_ghz;
    double base_width_ghz;
};

// Airy transmission 1 / (1 + (2 finesse / pi)^2 sin^2(pi u / fsr)).
struct FabryPerot {
    double fsr_ghz;
    double finesse;
};

struct TabulatedPoint {
    double offset_ghz;
    double transmission;
};

// Linear interpolation between samples, zero outside the sampled range.
struct Tabulated {
    std::vector<TabulatedPoint> points;
};

struct FilterSpec;

// Filters in series; the transmission is the product of the members.
struct Cascade {
    std::vector<FilterSpec> members;
};

using FilterShape =
    std::variant<Rectangular, Triangular, Gaussian, Trapezoid, FabryPerot, Cascade, Tabulated>;

struct FilterSpec {
    FilterShape shape;
    std::optional<double> center_thz;
};

struct Interval {
    double lo;
    double hi;

    double width() const { return hi - lo; }
    bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

// Throws ValidationError describing the first violated constraint.
void validate(const FilterSpec& spec);

double transmission(const FilterSpec& spec, double offset_ghz);

// True for every parametric shape and for cascades of them. Tabulated shapes
// are even only if their samples mirror exactly about zero.
bool is_even(const FilterSpec& spec);

// Interval outside of which the transmission is negligible (exactly zero for
// compact shapes, below 1e-35 for the Gaussian). Empty for a bare Fabry-Perot.
std::optional<Interval> effective_support(const FilterSpec& spec);

// Kinks and resonance peaks of the transmission inside `range`, sorted.
std::vector<double> breakpoints(const FilterSpec& spec, const Interval& range);

// Full width at half maximum of the central transmission lobe.
double fwhm(const FilterSpec& spec);

std::string describe(const FilterSpec& spec);

// ---------------------------------------------------------------------------
// Spectral envelope (phase-matching function)

struct UnityEnvelope {};

struct GaussianEnvelope {
    double fwhm_ghz;
    // Absolute center frequency; when the filter has no center frequency the
    // envelope is taken to be centered on the filter.
    std::optional<double> center_thz;
};

struct TabulatedEnvelope {
    std::vector<TabulatedPoint> points;  // offsets relative to the filter center
};

using SpectralEnvelope = std::variant<UnityEnvelope, GaussianEnvelope, TabulatedEnvelope>;

void validate(const SpectralEnvelope& envelope);

// Envelope value at `offset_ghz` from the filter center.
double envelope_value(const SpectralEnvelope& envelope, const FilterSpec& filter,
                      double offset_ghz);

// ---------------------------------------------------------------------------
// Filtering integrals

struct IntegralOptions {
    // Absolute quadrature tolerance, expressed as a fraction of I1.
    double relative_tolerance = 1e-9;
    // Required for filters without finite support (a standalone etalon).
    std::optional<Interval> band;
};

struct SpectralIntegrals {
    double i1;                   // GHz
    double i2;                   // GHz, at `detuning_ghz`
    double i2_max;               // GHz, at zero detuning
    double detuning_ghz;         // degeneracy frequency minus filter center
    double ratio_i1_over_i2max;
    double quadrature_abs_tol;   // absolute tolerance used for every integral (GHz)
};

// i1 = integral of F G; i2 = autoconvolution of F G evaluated at twice the
// detuning. Throws ValidationError for infinite support without a band and
// NumericalError when the quadrature does not converge.
SpectralIntegrals spectral_integrals(const FilterSpec& spec, const SpectralEnvelope& envelope,
                                     double detuning_ghz, const IntegralOptions& options = {});

struct SweepPoint {
    double detuning_ghz;
    double i2_over_i2max;
    double transmission;
};

std::vector<SweepPoint> detuning_sweep(const FilterSpec& spec, const SpectralEnvelope& envelope,
                                       double d_min_ghz, double d_max_ghz, int n_points,
                                       const IntegralOptions& options = {});

// Trapezoid with (plateau + base) / 2 == target_fwhm and I1/I2max == target_ratio.
// Requires 1 < target_ratio <= 1.5 (1.5 is the triangle limit).
Trapezoid calibrate_trapezoid(double target_fwhm_ghz, double target_ratio);

// DWDM add/drop filter model: calibrate_trapezoid(73 GHz, 1.14).
FilterSpec default_dwdm();

// DWDM filter followed by a 50 GHz FSR, finesse 31.5 etalon.
FilterSpec default_dwdm_fabry_perot();

struct NamedFilter {
    std::string name;
    FilterSpec spec;
};

// The five reference cases: rectangular, triangular, Gaussian, DWDM, DWDM + FP.
std::vector<NamedFilter> builtin_filters();

// Two-column CSV (offset_GHz, transmission); an optional header row is skipped.
Tabulated load_tabulated_csv(const std::string& path);

}  // namespace spdc
