#pragma once

#include <cstdint>
#include <vector>

namespace dqsim {

/// splitmix64 stream: tiny, fast, and trivially splittable. Per-shot streams
/// are derived with derive_stream so a batch is reproducible under any
/// execution order.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound).
    std::uint64_t next_below(std::uint64_t bound);

    /// Standard normal via Box-Muller.
    double next_gaussian();

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Stream seed for substream `idx` of master seed `seed`: two finalizer
/// rounds keep nearby (seed, idx) pairs decorrelated.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t idx);

/// Inverse-CDF draw from an unnormalized nonnegative weight vector.
std::size_t sample_categorical(SplitMix64& rng, const std::vector<double>& weights);

}  // namespace dqsim
