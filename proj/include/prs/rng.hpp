#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "prs/rational.hpp"

namespace prs {

// splitmix64 finalizer; used to derive independent per-run seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t run_index) noexcept {
  return mix64(base_seed ^ mix64(run_index + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0,1) with 53 random bits; platform independent.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n) by rejection, n >= 1.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do x = engine_(); while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

// Cumulative double table built from exact weights; last entry pinned to 1.
inline std::vector<double> cumulative_table(std::span<const Rational> weights) {
  std::vector<double> cum(weights.size());
  Rational acc = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cum[i] = to_double(acc);
  }
  if (!cum.empty()) cum.back() = 1.0;
  return cum;
}

// Draws an index from a cumulative table. Zero-weight values are never drawn.
inline std::uint32_t draw_index(std::span<const double> cum, Rng& rng) {
  const double u = rng.uniform01();
  std::uint32_t i = 0;
  const auto n = static_cast<std::uint32_t>(cum.size());
  while (i + 1 < n && !(u < cum[i])) ++i;
  return i;
}

}  // namespace prs
