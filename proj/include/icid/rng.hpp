#pragma once

#include <cstdint>

namespace icid {

/// SplitMix64 (Steele, Lea, Flood 2014) used in counter mode: the k-th draw
/// is mix(seed + k * 0x9E3779B97F4A7C15). The algorithm and draw order are
/// part of the reproducibility contract for cascades and benchmarks.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : key_(seed) {}

    [[nodiscard]] static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Seed for an independent stream; used to give every sample its own stream.
    [[nodiscard]] static constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
        return mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL));
    }

    std::uint64_t next_u64() noexcept {
        ++counter_;
        return mix(key_ + counter_ * kGolden);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound)) % bound;
    }

    [[nodiscard]] std::uint64_t draws() const noexcept { return counter_; }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace icid
