// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace rfaug::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stateless draw keyed by (seed, epoch, index, stream). Equal keys give
/// equal values regardless of call order or thread.
inline constexpr std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t epoch,
                                            std::uint64_t index,
                                            std::uint64_t stream) noexcept {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ epoch);
  h = splitmix64(h ^ index);
  return splitmix64(h ^ stream);
}

/// Top 53 bits as a double in [0, 1).
inline constexpr double to_unit(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Multiply-shift reduction onto [0, n).
inline constexpr std::uint64_t bounded(std::uint64_t h, std::uint64_t n) noexcept {
  // High 64 bits of h * n.
  const std::uint64_t h_lo = h & 0xffffffffULL, h_hi = h >> 32;
  const std::uint64_t n_lo = n & 0xffffffffULL, n_hi = n >> 32;
  const std::uint64_t lo_lo = h_lo * n_lo;
  const std::uint64_t hi_lo = h_hi * n_lo;
  const std::uint64_t lo_hi = h_lo * n_hi;
  const std::uint64_t cross = (lo_lo >> 32) + (hi_lo & 0xffffffffULL) + lo_hi;
  return h_hi * n_hi + (hi_lo >> 32) + (cross >> 32);
}

}  // namespace rfaug::rng
