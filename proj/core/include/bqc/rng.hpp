#pragma once

#include <cstdint>

namespace bqc {

/// Counter-based deterministic generator (SplitMix64).
///
/// The n-th output is a pure function of (seed, n), so streams can be
/// replayed, split by key, and evaluated out of order. This is the only
/// randomness source in the project; a 64-bit seed fully determines a run.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Value of the counter stream at (seed, index), order-independent.
    static std::uint64_t at(std::uint64_t seed, std::uint64_t index) {
        return mix(seed + index * 0x9e3779b97f4a7c15ULL);
    }

    std::uint64_t operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0,1) with 53 random bits.
    double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform double in [a,b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    long long uniform_int(long long lo, long long hi) {
        return lo + (long long)((*this)() % (std::uint64_t)(hi - lo + 1));
    }

    /// Derive an independent stream keyed by a small tag.
    Rng split(std::uint64_t tag) const { return Rng(mix(state_ ^ mix(tag))); }

  private:
    std::uint64_t state_;
};

} // namespace bqc
