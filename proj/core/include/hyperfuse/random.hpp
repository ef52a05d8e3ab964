#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace hyperfuse {

/// SplitMix64 finalizer; a good 64-bit mixing function for counter-based
/// streams.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent per-module seed derived from a master seed and a tag.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix64(master ^ mix64(h));
}

/// Uniform double in (0, 1] from the top 53 bits of a 64-bit word.
constexpr double unit_open_closed(std::uint64_t bits) noexcept {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal variate number `counter` of the stream `seed`. The value
/// depends only on (seed, counter), so any evaluation order gives the same
/// result.
inline double counter_normal(std::uint64_t seed, std::uint64_t counter) noexcept {
  const auto base = mix64(seed) ^ (counter * 0xd1342543de82ef95ULL);
  const double u1 = unit_open_closed(mix64(base));
  const double u2 = unit_open_closed(mix64(base ^ 0x5851f42d4c957f2dULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Uniform (0, 1] draws from mt19937_64. Bypasses std::uniform_real_distribution,
/// whose output is implementation-defined, to keep runs identical across
/// standard libraries.
class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return unit_open_closed(engine_()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hyperfuse
