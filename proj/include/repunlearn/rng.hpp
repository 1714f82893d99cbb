// Deterministic random source: xoshiro256++ seeded through splitmix64.
// The exact algorithms are pinned so that identical seeds reproduce identical
// streams on any platform:
//   - seeding: four rounds of splitmix64 starting from the seed
//   - uniform doubles: top 53 bits of next_u64, divided by 2^53 -> [0, 1)
//   - gaussians: Box-Muller cosine branch, exactly two uniforms per draw,
//       z = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)
//   - fork(k): child seeded with splitmix64(next_u64() + k); consumes one
//       parent draw, children with distinct k are independent streams
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace repunlearn {

std::uint64_t splitmix64(std::uint64_t& state);

class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double uniform();

    // Uniform integer in [0, n), n >= 1. Rejection-free via 128-bit multiply.
    std::uint64_t below(std::uint64_t n);

    // One draw from N(mean, stddev^2).
    double gaussian(double mean = 0.0, double stddev = 1.0);

    // Fills `out` with iid N(mean, stddev^2) draws.
    void gaussian_fill(std::span<double> out, double mean, double stddev);

    // Fisher-Yates, back-to-front.
    void shuffle(std::span<std::size_t> idx);

    // k distinct values from [0, n), ascending order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    // Independent child stream; see header comment.
    Rng fork(std::uint64_t k);

private:
    std::array<std::uint64_t, 4> s_{};
};

// Seed derivation for pipeline stages: splitmix64 mix of (base, salt).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

}  // namespace repunlearn
