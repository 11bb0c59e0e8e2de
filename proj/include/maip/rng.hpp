#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace maip {

// Deterministic random source. All transforms are hand-rolled on top of
// std::mt19937_64 so that a (seed, call sequence) pair produces the same
// values on every platform; std::*_distribution is implementation-defined
// and would break bit-reproducibility of datasets and checkpoints.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(scramble(seed)) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    // Standard normal via Box-Muller (two uniforms per draw, no cached state).
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Independent stream derived from this generator's seed lineage.
    static Rng stream(uint64_t seed, uint64_t stream_id) {
        return Rng(seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1)));
    }

  private:
    static uint64_t scramble(uint64_t x) {
        // splitmix64 finalizer; spreads low-entropy seeds over the state space.
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace maip
