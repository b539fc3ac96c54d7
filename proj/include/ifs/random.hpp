#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace ifs {

/// Seeded generator with platform-independent draws.
///
/// The standard distributions are implementation-defined, so draws are
/// derived from the raw 64-bit engine output instead. This keeps experiment
/// metrics identical across standard libraries for the same seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

}  // namespace ifs
