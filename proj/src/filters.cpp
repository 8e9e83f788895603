#include "spdc/filters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/quadrature.hpp"

namespace spdc {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// exp(-81) < 1e-35
constexpr double kGaussianSupportWidths = 9.0;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

double interpolate(const std::vector<TabulatedPoint>& pts, double x) {
    if (pts.empty() || x < pts.front().offset_ghz || x > pts.back().offset_ghz) return 0.0;
    auto hi = std::lower_bound(pts.begin(), pts.end(), x,
                               [](const TabulatedPoint& p, double v) { return p.offset_ghz < v; });
    if (hi == pts.begin()) return hi->transmission;
    auto lo = hi - 1;
    if (hi == pts.end()) return lo->transmission;
    const double span = hi->offset_ghz - lo->offset_ghz;
    const double w = (x - lo->offset_ghz) / span;
    return (1.0 - w) * lo->transmission + w * hi->transmission;
}

void validate_table(const std::vector<TabulatedPoint>& pts, const char* what) {
    if (pts.size() < 2) throw ValidationError(std::string(what) + " needs at least two samples");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        if (!std::isfinite(p.offset_ghz) || !std::isfinite(p.transmission))
            throw ValidationError(std::string(what) + " contains a non-finite sample");
        if (p.transmission < 0.0 || p.transmission > 1.0)
            throw ValidationError(std::string(what) + " transmission outside [0, 1]");
        if (i > 0 && !(p.offset_ghz > pts[i - 1].offset_ghz))
            throw ValidationError(std::string(what) + " offsets must be strictly increasing");
    }
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Integration domain for the filtering integrals.
Interval integration_domain(const FilterSpec& spec, const IntegralOptions& options) {
    const auto support = effective_support(spec);
    if (!support && !options.band) {
        throw ValidationError(
            "filter has infinite support; combine it with a finite-support filter or give an "
            "integration band");
    }
    Interval domain = support ? *support : *options.band;
    if (support && options.band) {
        domain.lo = std::max(support->lo, options.band->lo);
        domain.hi = std::min(support->hi, options.band->hi);
    }
    if (!(domain.hi > domain.lo)) throw ValidationError("filter has an empty passband");
    return domain;
}

std::vector<double> with_ends(std::vector<double> points, const Interval& range) {
    points.push_back(range.lo);
    points.push_back(range.hi);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

// Integrals sharing one filter, envelope and domain.
class FilterIntegrator {
public:
    FilterIntegrator(const FilterSpec& spec, const SpectralEnvelope& envelope,
                     const IntegralOptions& options)
        : spec_(spec), envelope_(envelope), domain_(integration_domain(spec, options)) {
        if (!(options.relative_tolerance > 0.0))
            throw ValidationError("quadrature tolerance must be positive");
        const auto single = [this](double u) { return weighted(u); };
        const auto points = with_ends(breakpoints(spec_, domain_), domain_);
        // F <= 1, so the domain width bounds I1 from above; refine once I1 is known.
        const double coarse_tol = options.relative_tolerance * domain_.width();
        const double rough = quadrature::integrate(single, points, coarse_tol).value;
        if (!(rough > 0.0)) throw ValidationError("filter transmits nothing inside its passband");
        abs_tol_ = options.relative_tolerance * rough;
        i1_ = quadrature::integrate(single, points, abs_tol_).value;
        abs_tol_ = options.relative_tolerance * i1_;
    }

    double i1() const { return i1_; }
    double abs_tol() const { return abs_tol_; }

    // Autoconvolution of F G at 2 d.
    double i2(double detuning_ghz) const {
        const double shift = 2.0 * detuning_ghz;
        const Interval overlap{std::max(domain_.lo, shift - domain_.hi),
                               std::min(domain_.hi, shift - domain_.lo)};
        if (!(overlap.hi > overlap.lo)) return 0.0;
        auto points = breakpoints(spec_, overlap);
        for (double b : breakpoints(spec_, Interval{shift - overlap.hi, shift - overlap.lo}))
            points.push_back(shift - b);
        points = with_ends(std::move(points), overlap);
        const auto pair = [this, shift](double u) { return weighted(u) * weighted(shift - u); };
        return std::max(0.0, quadrature::integrate(pair, points, abs_tol_).value);
    }

private:
    double weighted(double u) const {
        return transmission(spec_, u) * envelope_value(envelope_, spec_, u);
    }

    const FilterSpec& spec_;
    const SpectralEnvelope& envelope_;
    Interval domain_;
    double i1_ = 0.0;
    double abs_tol_ = 0.0;
};

}  // namespace

void validate(const FilterSpec& spec) {
    if (spec.center_thz && !finite_positive(*spec.center_thz))
        throw ValidationError("filter center frequency must be positive");
    std::visit(
        overloaded{
            [](const Rectangular& s) {
                if (!finite_positive(s.full_width_ghz))
                    throw ValidationError("rectangular filter width must be positive");
            },
            [](const Triangular& s) {
                if (!finite_positive(s.base_half_width_ghz))
                    throw ValidationError("triangular filter half width must be positive");
            },
            [](const Gaussian& s) {
                if (!finite_positive(s.one_over_e_half_width_ghz))
                    throw ValidationError("gaussian filter half width must be positive");
            },
            [](const Trapezoid& s) {
                if (!finite_positive(s.base_width_ghz) || !std::isfinite(s.plateau_width_ghz) ||
                    s.plateau_width_ghz < 0.0)
                    throw ValidationError("trapezoid widths must be non-negative and finite");
                if (!(s.plateau_width_ghz < s.base_width_ghz))
                    throw ValidationError("trapezoid plateau must be narrower than its base");
            },
            [](const FabryPerot& s) {
                if (!finite_positive(s.fsr_ghz)) throw ValidationError("etalon FSR must be positive");
                if (!finite_positive(s.finesse))
                    throw ValidationError("etalon finesse must be positive");
            },
            [](const Cascade& s) {
                if (s.members.empty()) throw ValidationError("cascade needs at least one member");
                for (const auto& m : s.members) validate(m);
            },
            [](const Tabulated& s) { validate_table(s.points, "tabulated filter"); },
        },
        spec.shape);
}

double transmission(const FilterSpec& spec, double u) {
    return std::visit(
        overloaded{
            [u](const Rectangular& s) { return std::abs(u) <= 0.5 * s.full_width_ghz ? 1.0 : 0.0; },
            [u](const Triangular& s) { return std::max(0.0, 1.0 - std::abs(u) / s.base_half_width_ghz); },
            [u](const Gaussian& s) {
                const double x = u / s.one_over_e_half_width_ghz;
                return std::exp(-x * x);
            },
            [u](const Trapezoid& s) {
                const double a = std::abs(u);
                const double top = 0.5 * s.plateau_width_ghz;
                const double base = 0.5 * s.base_width_ghz;
                if (a <= top) return 1.0;
                if (a >= base) return 0.0;
                return (base - a) / (base - top);
            },
            [u](const FabryPerot& s) {
                const double coeff = 2.0 * s.finesse / std::numbers::pi;
                const double sn = std::sin(std::numbers::pi * u / s.fsr_ghz);
                return 1.0 / (1.0 + coeff * coeff * sn * sn);
            },
            [u](const Cascade& s) {
                double t = 1.0;
                for (const auto& m : s.members) {
                    t *= transmission(m, u);
                    if (t == 0.0) break;
                }
                return t;
            },
            [u](const Tabulated& s) { return interpolate(s.points, u); },
        },
        spec.shape);
}

bool is_even(const FilterSpec& spec) {
    if (const auto* c = std::get_if<Cascade>(&spec.shape))
        return std::all_of(c->members.begin(), c->members.end(),
                           [](const FilterSpec& m) { return is_even(m); });
    if (const auto* t = std::get_if<Tabulated>(&spec.shape)) {
        const auto& p = t->points;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto& mirror = p[p.size() - 1 - i];
            if (std::abs(p[i].offset_ghz + mirror.offset_ghz) > 1e-12) return false;
            if (std::abs(p[i].transmission - mirror.transmission) > 1e-12) return false;
        }
        return true;
    }
    return true;
}

std::optional<Interval> effective_support(const FilterSpec& spec) {
    return std::visit(
        overloaded{
            [](const Rectangular& s) -> std::optional<Interval> {
                return Interval{-0.5 * s.full_width_ghz, 0.5 * s.full_width_ghz};
            },
            [](const Triangular& s) -> std::optional<Interval> {
                return Interval{-s.base_half_width_ghz, s.base_half_width_ghz};
            },
            [](const Gaussian& s) -> std::optional<Interval> {
                const double h = kGaussianSupportWidths * s.one_over_e_half_width_ghz;
                return Interval{-h, h};
            },
            [](const Trapezoid& s) -> std::optional<Interval> {
                return Interval{-0.5 * s.base_width_ghz, 0.5 * s.base_width_ghz};
            },
            [](const FabryPerot&) -> std::optional<Interval> { return std::nullopt; },
            [](const Cascade& s) -> std::optional<Interval> {
                std::optional<Interval> out;
                for (const auto& m : s.members) {
                    const auto sup = effective_support(m);
                    if (!sup) continue;
                    if (!out) {
                        out = sup;
                    } else {
                        out->lo = std::max(out->lo, sup->lo);
                        out->hi = std::min(out->hi, sup->hi);
                    }
                }
                if (out && out->hi < out->lo) out->hi = out->lo;
                return out;
            },
            [](const Tabulated& s) -> std::optional<Interval> {
                return Interval{s.points.front().offset_ghz, s.points.back().offset_ghz};
            },
        },
        spec.shape);
}

std::vector<double> breakpoints(const FilterSpec& spec, const Interval& range) {
    std::vector<double> out;
    const auto add = [&](double x) {
        if (x > range.lo && x < range.hi) out.push_back(x);
    };
    std::visit(overloaded{
                   [&](const Rectangular& s) {
                       add(-0.5 * s.full_width_ghz);
                       add(0.5 * s.full_width_ghz);
                   },
                   [&](const Triangular& s) {
                       add(-s.base_half_width_ghz);
                       add(0.0);
                       add(s.base_half_width_ghz);
                   },
                   [&](const Gaussian&) { add(0.0); },
                   [&](const Trapezoid& s) {
                       add(-0.5 * s.base_width_ghz);
                       add(-0.5 * s.plateau_width_ghz);
                       add(0.5 * s.plateau_width_ghz);
                       add(0.5 * s.base_width_ghz);
                   },
                   [&](const FabryPerot& s) {
                       // resonances and the half-maximum points around them
                       const double coeff = 2.0 * s.finesse / std::numbers::pi;
                       const double half = s.fsr_ghz / std::numbers::pi *
                                           std::asin(std::min(1.0, 1.0 / coeff));
                       const auto first = static_cast<long long>(std::ceil(range.lo / s.fsr_ghz));
                       const auto last = static_cast<long long>(std::floor(range.hi / s.fsr_ghz));
                       for (long long k = first - 1; k <= last + 1; ++k) {
                           const double peak = static_cast<double>(k) * s.fsr_ghz;
                           add(peak - half);
                           add(peak);
                           add(peak + half);
                       }
                   },
                   [&](const Cascade& s) {
                       for (const auto& m : s.members) {
                           const auto inner = breakpoints(m, range);
                           out.insert(out.end(), inner.begin(), inner.end());
                       }
                   },
                   [&](const Tabulated& s) {
                       for (const auto& p : s.points) add(p.offset_ghz);
                   },
               },
               spec.shape);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double fwhm(const FilterSpec& spec) {
    validate(spec);
    const double peak = transmission(spec, 0.0);
    if (!(peak > 0.0)) throw ValidationError("filter does not transmit at its center");
    const double half = 0.5 * peak;

    double scale = 0.0;
    if (const auto sup = effective_support(spec)) {
        scale = std::max(std::abs(sup->lo), std::abs(sup->hi));
    } else if (const auto* fp = std::get_if<FabryPerot>(&spec.shape)) {
        scale = 0.5 * fp->fsr_ghz;
    }
    if (!(scale > 0.0)) throw ValidationError("filter has no passband");

    const auto crossing = [&](double direction) {
        constexpr int steps = 1 << 14;
        const double h = scale / steps;
        double inside = 0.0;
        for (int i = 1; i <= steps; ++i) {
            const double x = direction * h * i;
            if (transmission(spec, x) <= half) {
                double lo = inside;
                double hi = x;
                for (int k = 0; k < 100; ++k) {
                    const double mid = 0.5 * (lo + hi);
                    (transmission(spec, mid) > half ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            }
            inside = x;
        }
        return direction * scale;
    };
    return crossing(1.0) - crossing(-1.0);
}

std::string describe(const FilterSpec& spec) {
    return std::visit(
        overloaded{
            [](const Rectangular& s) { return "rectangular(width=" + num(s.full_width_ghz) + ")"; },
            [](const Triangular& s) {
                return "triangular(half_width=" + num(s.base_half_width_ghz) + ")";
            },
            [](const Gaussian& s) {
                return "gaussian(half_width=" + num(s.one_over_e_half_width_ghz) + ")";
            },
            [](const Trapezoid& s) {
                return "trapezoid(plateau=" + num(s.plateau_width_ghz) +
                       ", base=" + num(s.base_width_ghz) + ")";
            },
            [](const FabryPerot& s) {
                return "fabry_perot(fsr=" + num(s.fsr_ghz) + ", finesse=" + num(s.finesse) + ")";
            },
            [](const Cascade& s) {
                std::string out = "cascade(";
                for (std::size_t i = 0; i < s.members.size(); ++i) {
                    if (i) out += " x ";
                    out += describe(s.members[i]);
                }
                return out + ")";
            },
            [](const Tabulated& s) {
                return "tabulated(" + std::to_string(s.points.size()) + " samples)";
            },
        },
        spec.shape);
}

void validate(const SpectralEnvelope& envelope) {
    std::visit(overloaded{
                   [](const UnityEnvelope&) {},
                   [](const GaussianEnvelope& g) {
                       if (!finite_positive(g.fwhm_ghz))
                           throw ValidationError("envelope FWHM must be positive");
                       if (g.center_thz && !finite_positive(*g.center_thz))
                           throw ValidationError("envelope center frequency must be positive");
                   },
                   [](const TabulatedEnvelope& t) { validate_table(t.points, "tabulated envelope"); },
               },
               envelope);
}

double envelope_value(const SpectralEnvelope& envelope, const FilterSpec& filter, double u) {
    return std::visit(
        overloaded{
            [](const UnityEnvelope&) { return 1.0; },
            [&](const GaussianEnvelope& g) {
                double center = 0.0;
                if (g.center_thz && filter.center_thz)
                    center = (*g.center_thz - *filter.center_thz) * 1000.0;
                const double x = (u - center) / g.fwhm_ghz;
                return std::exp(-4.0 * std::numbers::ln2 * x * x);
            },
            [u](const TabulatedEnvelope& t) { return interpolate(t.points, u); },
        },
        envelope);
}

SpectralIntegrals spectral_integrals(const FilterSpec& spec, const SpectralEnvelope& envelope,
                                     double detuning_ghz, const IntegralOptions& options) {
    validate(spec);
    validate(envelope);
    if (!std::isfinite(detuning_ghz)) throw ValidationError("detuning must be finite");
    const FilterIntegrator integrator(spec, envelope, options);
    const double i2_max = integrator.i2(0.0);
    if (!(i2_max > 0.0)) throw ValidationError("filter autoconvolution vanishes at zero detuning");
    const double i2 = detuning_ghz == 0.0 ? i2_max : integrator.i2(detuning_ghz);
    return {integrator.i1(), i2,           i2_max, detuning_ghz, integrator.i1() / i2_max,
            integrator.abs_tol()};
}

std::vector<SweepPoint> detuning_sweep(const FilterSpec& spec, const SpectralEnvelope& envelope,
                                       double d_min_ghz, double d_max_ghz, int n_points,
                                       const IntegralOptions& options) {
    validate(spec);
    validate(envelope);
    if (n_points < 2) throw ValidationError("a detuning sweep needs at least two points");
    if (!std::isfinite(d_min_ghz) || !std::isfinite(d_max_ghz) || !(d_max_ghz > d_min_ghz))
        throw ValidationError("detuning range must satisfy d_min < d_max");
    const FilterIntegrator integrator(spec, envelope, options);
    const double i2_max = integrator.i2(0.0);
    if (!(i2_max > 0.0)) throw ValidationError("filter autoconvolution vanishes at zero detuning");

    std::vector<SweepPoint> out;
    out.reserve(static_cast<std::size_t>(n_points));
    const double step = (d_max_ghz - d_min_ghz) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) {
        const double d = i + 1 == n_points ? d_max_ghz : d_min_ghz + step * i;
        out.push_back({d, integrator.i2(d) / i2_max, transmission(spec, d)});
    }
    return out;
}

Trapezoid calibrate_trapezoid(double target_fwhm_ghz, double target_ratio) {
    if (!finite_positive(target_fwhm_ghz)) throw ValidationError("target FWHM must be positive");
    if (!(target_ratio > 1.0 && target_ratio <= 1.5))
        throw ValidationError("trapezoid ratio must lie in (1, 1.5]");

    const double sum = 2.0 * target_fwhm_ghz;  // plateau + base
    const auto ratio_at = [&](double plateau) {
        const FilterSpec trial{Trapezoid{plateau, sum - plateau}, std::nullopt};
        return spectral_integrals(trial, UnityEnvelope{}, 0.0).ratio_i1_over_i2max;
    };

    // ratio falls from 1.5 (triangle, plateau 0) towards 1 (rectangle).
    double lo = 0.0;
    double hi = target_fwhm_ghz * (1.0 - 1e-12);
    if (ratio_at(lo) <= target_ratio) return {0.0, sum};
    if (ratio_at(hi) > target_ratio)
        throw NumericalError("no trapezoid reaches the requested ratio", ratio_at(hi) - target_ratio);
    for (int i = 0; i < 200 && hi - lo > 1e-12 * target_fwhm_ghz; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ratio_at(mid) > target_ratio ? lo : hi) = mid;
    }
    const double plateau = 0.5 * (lo + hi);
    return {plateau, sum - plateau};
}

FilterSpec default_dwdm() {
    static const Trapezoid dwdm = calibrate_trapezoid(73.0, 1.14);
    return FilterSpec{dwdm, std::nullopt};
}

FilterSpec default_dwdm_fabry_perot() {
    return FilterSpec{Cascade{{default_dwdm(), FilterSpec{FabryPerot{50.0, 31.5}, std::nullopt}}},
                      std::nullopt};
}

std::vector<NamedFilter> builtin_filters() {
    return {
        {"rectangular", FilterSpec{Rectangular{100.0}, std::nullopt}},
        {"triangular", FilterSpec{Triangular{100.0}, std::nullopt}},
        {"gaussian", FilterSpec{Gaussian{50.0}, std::nullopt}},
        {"dwdm", default_dwdm()},
        {"dwdm+fp", default_dwdm_fabry_perot()},
    };
}

Tabulated load_tabulated_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open tabulated filter file: " + path);
    Tabulated table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError(path + ":" + std::to_string(line_no) + ": expected two columns");
        const std::string a = line.substr(0, comma);
        const std::string b = line.substr(comma + 1);
        char* end_a = nullptr;
        char* end_b = nullptr;
        const double offset = std::strtod(a.c_str(), &end_a);
        const double value = std::strtod(b.c_str(), &end_b);
        const bool ok_a = end_a != a.c_str() && *end_a == '\0';
        const bool ok_b = end_b != b.c_str() && (*end_b == '\0' || *end_b == ' ');
        if (!ok_a || !ok_b) {
            if (table.points.empty() && line_no == 1) continue;  // header
            throw ValidationError(path + ":" + std::to_string(line_no) + ": not a number");
        }
        table.points.push_back({offset, value});
    }
    validate_table(table.points, "tabulated filter");
    return table;
}

}  // namespace spdc
