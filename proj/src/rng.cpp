#include "dqsim/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dqsim {

namespace {
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t idx) {
    return mix64(mix64(seed + 0x9E3779B97F4A7C15ULL) ^ (idx + 0xD1B54A32D192ED03ULL));
}

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
    // Rejection-free scaling is fine here: bound is tiny next to 2^64.
    return static_cast<std::uint64_t>(next_double() * static_cast<double>(bound));
}

double SplitMix64::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 1.0 - next_double();  // (0, 1]
    double u2 = next_double();
    double mag = std::sqrt(-2.0 * std::log(u1));
    have_spare_ = true;
    spare_ = mag * std::sin(2.0 * std::numbers::pi * u2);
    return mag * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t sample_categorical(SplitMix64& rng, const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("sample_categorical: no positive weight");
    const double u = rng.next_double() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last_positive = i;
        acc += weights[i];
        if (u < acc) return i;
    }
    return last_positive;  // u landed in the rounding gap at the top
}

}  // namespace dqsim
