#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

namespace evac {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stateless counter-based generator: the draw for (seed, stream, counter)
/// depends on nothing else, so per-agent noise is independent of the order
/// in which agents are evaluated.
struct CounterRng {
  std::uint64_t seed = 0;

  constexpr std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    return splitmix64(seed ^ splitmix64(stream ^ splitmix64(counter)));
  }
  constexpr double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return to_unit(bits(stream, counter));
  }
  /// Two independent standard normals (Box-Muller).
  std::pair<double, double> gaussian_pair(std::uint64_t stream, std::uint64_t counter) const {
    const double u1 = 1.0 - uniform(stream, 2 * counter);  // (0, 1]
    const double u2 = uniform(stream, 2 * counter + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
  }
};

/// Sequential engine for event-driven code; mt19937_64 output is fully
/// specified by the standard, and the conversions below avoid the
/// implementation-defined std distributions.
class SeqRng {
public:
  explicit SeqRng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform() { return to_unit(engine_()); }
  /// (0, 1], safe for log.
  double uniform_open_zero() { return 1.0 - uniform(); }
  double exponential(double rate) { return -std::log(uniform_open_zero()) / rate; }

  /// Uniform integer in [0, n), n > 0, without modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace evac
