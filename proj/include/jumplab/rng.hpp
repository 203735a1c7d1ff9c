#pragma once

#include <cstdint>
#include <random>

namespace jumplab {

// Deterministic random source with per-path substreams: the pair
// (seed, stream) fully determines the draw sequence, so path i can be
// regenerated in isolation and parallel sampling is schedule-independent.
// All variates are produced by inverse CDF from a single uniform stream.
class Rng {
  public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    double uniform01();                       // [0, 1)
    double normal();                          // standard normal, inverse CDF
    double exponential(double rate);          // mean 1/rate
    std::size_t uniform_index(std::size_t n); // {0, ..., n-1}

  private:
    std::mt19937_64 eng_;
};

// Standard normal CDF and its inverse (Acklam's rational approximation,
// relative error below 1.2e-9 which is ample for simulation use).
double normal_cdf(double x);
double normal_icdf(double p);

}  // namespace jumplab
