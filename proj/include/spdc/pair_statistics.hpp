#pragma once

#include <cstdint>

namespace spdc {

// Per-photon probabilities of reaching detector A or B after statistical
// splitting; the remainder 1 - x_a - x_b is lost.
struct SplitChannels {
    double x_a;
    double x_b;
};

void validate(const SplitChannels& ch);

// Largest pair number handled with exact 64-bit binomials.
inline constexpr int kMaxPairs = 10;

std::uint64_t binomial(int n, int k);

// Probability that n_a photons reach A and n_b reach B when n_pairs pairs are
// split independently. Out-of-range counts give 0.
double splitting_pmf(int n_pairs, const SplitChannels& ch, int n_a, int n_b);

// One pair, at least one photon on A: x_a (2 - x_a).
double p_at_least_one(const SplitChannels& ch);

// Two pairs, at least one photon on each channel.
double p_coincidence_two_pairs(const SplitChannels& ch);

struct Rational {
    int num;
    int den;
    constexpr double value() const { return static_cast<double>(num) / den; }
    friend constexpr bool operator==(Rational, Rational) = default;
};

// Share of two-pair coincidences in which the two detected photons come from
// different pairs.
constexpr Rational accidental_fraction() { return {2, 3}; }

}  // namespace spdc
