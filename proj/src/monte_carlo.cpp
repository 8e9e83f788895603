#include "spdc/monte_carlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "spdc/errors.hpp"
#include "spdc/quadrature.hpp"

namespace spdc {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kChunk = 1ULL << 18;

struct Sampler {
    const SimConfig& cfg;
    Interval band;
    double mean_pairs;
    std::vector<double> poisson_cdf;
    double sigma_t;
    double half_gate;
    double x_a;
    double x_b;
    bool unit_envelope;

    int draw_pairs(double u) const {
        const auto it = std::upper_bound(poisson_cdf.begin(), poisson_cdf.end(), u);
        return static_cast<int>(it - poisson_cdf.begin());
    }

    double draw_signal_offset(PulseRng& rng) const {
        for (;;) {
            const double u = band.lo + band.width() * rng.uniform();
            if (unit_envelope) return u;
            if (rng.uniform() < envelope_value(cfg.src.envelope, cfg.src.filter, u)) return u;
        }
    }

    // 0 lost, 1 channel A, 2 channel B.
    int route_photon(PulseRng& rng, double offset) const {
        if (!(rng.uniform() < transmission(cfg.src.filter, offset))) return 0;
        const double r = rng.uniform();
        if (r < x_a) return 1;
        if (r < x_a + x_b) return 2;
        return 0;
    }

    void run_pulse(std::uint64_t index, SimCounts& counts) const {
        PulseRng rng(cfg.seed, index);
        const int pairs = draw_pairs(rng.uniform());
        bool click_a = false;
        bool click_b = false;
        const double shift = 2.0 * cfg.src.detuning_ghz;
        for (int k = 0; k < pairs; ++k) {
            const double signal = draw_signal_offset(rng);
            // signal and idler share one emission time
            const double radius = std::sqrt(-2.0 * std::log(rng.uniform_open_zero()));
            const double t = sigma_t * radius * std::cos(2.0 * std::numbers::pi * rng.uniform());
            if (std::abs(t) > half_gate) continue;
            for (const double offset : {signal, shift - signal}) {
                const int where = route_photon(rng, offset);
                click_a = click_a || where == 1;
                click_b = click_b || where == 2;
            }
        }
        if (rng.uniform() < cfg.ch.a.p_dark) click_a = true;
        if (rng.uniform() < cfg.ch.b.p_dark) click_b = true;
        counts.singles_a += click_a;
        counts.singles_b += click_b;
        counts.coincidences += click_a && click_b;
    }
};

std::vector<double> poisson_table(double mean) {
    std::vector<double> cdf;
    double term = std::exp(-mean);
    double sum = term;
    cdf.push_back(sum);
    for (int k = 1; 1.0 - sum > 1e-17 && k < 400; ++k) {
        term *= mean / k;
        sum += term;
        if (term == 0.0) break;
        cdf.push_back(sum);
    }
    return cdf;
}

bool negligible_outside(const FilterSpec& filter, const Interval& covered) {
    const auto support = effective_support(filter);
    if (!support) return true;
    constexpr int steps = 4096;
    const auto scan = [&](double lo, double hi) {
        if (!(hi > lo)) return true;
        for (int i = 0; i <= steps; ++i) {
            const double u = lo + (hi - lo) * i / steps;
            if (transmission(filter, u) > kBandEdgeTransmission) return false;
        }
        return true;
    };
    return scan(support->lo, std::min(covered.lo, support->hi)) &&
           scan(std::max(covered.hi, support->lo), support->hi);
}

}  // namespace

double SimCounts::binomial_sigma(std::uint64_t k) const {
    if (n_gates == 0) return 0.0;
    const double p = fraction(k);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n_gates));
}

PulseRng::PulseRng(std::uint64_t key, std::uint64_t index) : state_(mix(mix(key) ^ mix(~index))) {}

std::uint64_t PulseRng::mix(std::uint64_t z) {
    z += kGamma;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t PulseRng::next() {
    state_ += kGamma;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double PulseRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double PulseRng::uniform_open_zero() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
}

Interval simulation_band(const SimConfig& cfg) {
    const auto& filter = cfg.src.filter;
    const double shift = 2.0 * cfg.src.detuning_ghz;
    if (!cfg.band) {
        const auto support = effective_support(filter);
        if (!support)
            throw ValidationError("filter has infinite support; an explicit sampling band is required");
        return {std::min(support->lo, shift - support->hi), std::max(support->hi, shift - support->lo)};
    }
    const Interval band = *cfg.band;
    if (!std::isfinite(band.lo) || !std::isfinite(band.hi) || !(band.hi > band.lo))
        throw ValidationError("sampling band must satisfy lo < hi");
    for (const double edge : {band.lo, band.hi, shift - band.lo, shift - band.hi}) {
        if (transmission(filter, edge) > kBandEdgeTransmission)
            throw ValidationError("sampling band too narrow: transmission at its edge exceeds 1e-6");
    }
    // idler offsets span the band mirrored about the detuning
    if (!negligible_outside(filter, band) ||
        !negligible_outside(filter, Interval{shift - band.hi, shift - band.lo}))
        throw ValidationError("sampling band does not cover the filter passband");
    return band;
}

SimCounts simulate(const SimConfig& cfg) {
    validate(cfg.src.filter);
    validate(cfg.src.envelope);
    validate(cfg.src.pulse_gate);
    validate(cfg.ch);
    if (cfg.n_pulses < 1) throw ValidationError("at least one pulse must be simulated");
    if (!std::isfinite(cfg.src.p0_per_ghz) || cfg.src.p0_per_ghz < 0.0)
        throw ValidationError("pair probability density must be non-negative");
    if (!std::isfinite(cfg.src.detuning_ghz)) throw ValidationError("detuning must be finite");

    const Interval band = simulation_band(cfg);
    const bool unit_envelope = std::holds_alternative<UnityEnvelope>(cfg.src.envelope);
    double weighted_width = band.width();
    if (!unit_envelope) {
        const auto g = [&](double u) { return envelope_value(cfg.src.envelope, cfg.src.filter, u); };
        weighted_width = quadrature::integrate(g, band.lo, band.hi, 1e-12 * band.width()).value;
    }
    const double mean_pairs = cfg.src.p0_per_ghz * weighted_width;
    if (mean_pairs > kMaxMeanPairs)
        throw ValidationError("mean pair number per pulse exceeds " + std::to_string(kMaxMeanPairs));

    const Sampler sampler{cfg,
                          band,
                          mean_pairs,
                          poisson_table(mean_pairs),
                          cfg.src.pulse_gate.delta_t_ns / std::numbers::sqrt2,
                          0.5 * cfg.src.pulse_gate.gate_ns,
                          cfg.ch.a.x(),
                          cfg.ch.b.x(),
                          unit_envelope};

    unsigned workers = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t chunks = (cfg.n_pulses + kChunk - 1) / kChunk;
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));

    std::atomic<std::uint64_t> next_chunk{0};
    std::vector<SimCounts> partial(workers);
    const auto work = [&](unsigned w) {
        SimCounts& local = partial[w];
        for (;;) {
            const std::uint64_t c = next_chunk.fetch_add(1);
            if (c >= chunks) break;
            const std::uint64_t begin = c * kChunk;
            const std::uint64_t end = std::min(cfg.n_pulses, begin + kChunk);
            for (std::uint64_t i = begin; i < end; ++i) sampler.run_pulse(i, local);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    SimCounts total;
    total.n_gates = cfg.n_pulses;
    for (const auto& p : partial) {
        total.singles_a += p.singles_a;
        total.singles_b += p.singles_b;
        total.coincidences += p.coincidences;
    }
    return total;
}

std::vector<std::pair<double, SimCounts>> sweep_p0(const SimConfig& cfg,
                                                   const std::vector<double>& p0_values) {
    std::vector<std::pair<double, SimCounts>> out;
    out.reserve(p0_values.size());
    for (std::size_t k = 0; k < p0_values.size(); ++k) {
        SimConfig run = cfg;
        run.src.p0_per_ghz = p0_values[k];
        run.seed = cfg.seed + k;
        out.emplace_back(p0_values[k], simulate(run));
    }
    return out;
}

}  // namespace spdc
