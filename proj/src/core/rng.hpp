// Seed derivation and seeded Gaussian streams. Every random quantity in the
// library is derived from a user-supplied 64-bit seed through mix64, so
// replicate k of a run is reproducible without generating replicates 0..k-1.

#ifndef STOCHSYNC_CORE_RNG_HPP
#define STOCHSYNC_CORE_RNG_HPP

#include <cstdint>
#include <random>

namespace stochsync::rng {

// Stream tags keep independently-consumed streams (Brownian increments,
// initial conditions, ...) from colliding when derived from one base seed.
enum class Stream : std::uint64_t {
    brownian = 1,
    initial_condition = 2,
    sweep_value = 3,
    graph = 4,
    constants = 5,
};

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

constexpr std::uint64_t derive_seed(std::uint64_t base, Stream stream,
                                    std::uint64_t index) {
    std::uint64_t z = base;
    z = mix64(z + kGolden * (static_cast<std::uint64_t>(stream) + 1));
    z = mix64(z + kGolden * (index + 1));
    return z;
}

// Deterministic Gaussian stream for a fixed seed.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next(double mean, double stddev) {
        return mean + stddev * normal_(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace stochsync::rng

#endif
