#include "spdc/pair_statistics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spdc/errors.hpp"

namespace spdc {

void validate(const SplitChannels& ch) {
    if (!std::isfinite(ch.x_a) || !std::isfinite(ch.x_b) || ch.x_a < 0.0 || ch.x_b < 0.0)
        throw ValidationError("channel transmissions must be non-negative");
    // allow rounding when x_a + x_b is computed as 1 - loss
    if (ch.x_a + ch.x_b > 1.0 + 1e-15)
        throw ValidationError("channel transmissions must sum to at most 1");
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (n > 2 * kMaxPairs + 2) throw ValidationError("binomial argument too large");
    k = std::min(k, n - k);
    std::uint64_t out = 1;
    for (int i = 1; i <= k; ++i) out = out * static_cast<std::uint64_t>(n - k + i) / i;
    return out;
}

double splitting_pmf(int n_pairs, const SplitChannels& ch, int n_a, int n_b) {
    validate(ch);
    if (n_pairs < 0 || n_pairs > kMaxPairs)
        throw ValidationError("pair number must lie in [0, " + std::to_string(kMaxPairs) + "]");
    const int photons = 2 * n_pairs;
    if (n_a < 0 || n_b < 0 || n_a + n_b > photons) return 0.0;
    const int detected = n_a + n_b;
    const int lost = photons - detected;
    const double loss = std::max(0.0, 1.0 - ch.x_a - ch.x_b);
    return static_cast<double>(binomial(photons, lost)) * std::pow(loss, lost) *
           static_cast<double>(binomial(detected, n_a)) * std::pow(ch.x_a, n_a) *
           std::pow(ch.x_b, n_b);
}

double p_at_least_one(const SplitChannels& ch) {
    validate(ch);
    return ch.x_a * (2.0 - ch.x_a);
}

double p_coincidence_two_pairs(const SplitChannels& ch) {
    validate(ch);
    const double a = ch.x_a;
    const double b = ch.x_b;
    return (6.0 - 6.0 * (a + b) + 2.0 * (a * a + b * b) + 3.0 * a * b) * a * b;
}

}  // namespace spdc
