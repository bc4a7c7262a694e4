#pragma once

#include <cstdint>
#include <random>

namespace equiloc::nd {

/// Seeded generator whose streams are identical on every platform:
/// mt19937_64 is fully specified, and the conversions below avoid the
/// implementation-defined standard distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), n > 0, by rejection.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal via Box-Muller.
    double normal();

private:
    std::mt19937_64 engine_;
};

/// Independent child seed for stream `index` of `master` (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace equiloc::nd
