#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "surfelgrad/vec.hpp"

namespace surfelgrad {

// 64-bit mixer used to derive independent child seeds from (seed, index).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

/// Seeded generator with platform-independent sampling routines; the
/// standard distributions are avoided because their output is unspecified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do v = engine_();
    while (v >= limit);
    return lo + static_cast<std::int64_t>(v % span);
  }

  Vec3 uniform_vec(const Vec3& lo, const Vec3& hi) {
    const double x = uniform(lo.x, hi.x);
    const double y = uniform(lo.y, hi.y);
    const double z = uniform(lo.z, hi.z);
    return {x, y, z};
  }

  // Uniform direction on the unit sphere.
  Vec3 unit_sphere() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 6.283185307179586);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(phi), s * std::sin(phi), z};
  }

  // Uniform random rotation (Shoemake).
  Quat rotation() {
    const double u1 = uniform();
    const double u2 = uniform(0.0, 6.283185307179586);
    const double u3 = uniform(0.0, 6.283185307179586);
    const double a = std::sqrt(1.0 - u1);
    const double b = std::sqrt(u1);
    return Quat{a * std::sin(u2), a * std::cos(u2), b * std::sin(u3), b * std::cos(u3)}.normalized();
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace surfelgrad
