#pragma once

#include <cstdint>

namespace pli {

//! Counter-based uniform stream: draw n is a pure function of (key, n), so a
//! stream can be split, replayed or consumed out of order.
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t key) : key_(mix(key ^ 0x6a09e667f3bcc909ULL)) {}

  /// Stream for a sub-task (input dimension, replicate, ...).
  CounterStream split(std::uint64_t index) const {
    return CounterStream(mix(key_ + 0x9e3779b97f4a7c15ULL * (index + 1)));
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ + 0x9e3779b97f4a7c15ULL * counter);
  }

  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
    const auto wide = static_cast<unsigned __int128>(bits(counter)) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace pli
