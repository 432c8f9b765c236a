#pragma once

#include <cstdint>
#include <random>

namespace wsntrack {

// splitmix64 finalizer, used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Well-known stream ids. Target mobility uses kTargetBase + target index so
// that adding a target never perturbs the others.
namespace stream {
inline constexpr std::uint64_t kDeploy = 1;
inline constexpr std::uint64_t kNoise = 2;
inline constexpr std::uint64_t kFailure = 3;
inline constexpr std::uint64_t kGossipValue = 4;
inline constexpr std::uint64_t kFailureSchedule = 5;
inline constexpr std::uint64_t kTargetBase = 1000;
}  // namespace stream

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}
  Rng(std::uint64_t seed, std::uint64_t stream_id) : engine_(mix64(mix64(seed) ^ mix64(~stream_id))) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double uniform01() { return uniform(0.0, 1.0); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  // Uniform integer in [lo, hi].
  long uniform_int(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(engine_); }
  bool bernoulli(double p) { return uniform01() < p; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wsntrack
