// Copyright 2026 The qldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qldp {

namespace detail {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

}  // namespace detail

/// Splittable counter-based pseudo-random stream.
///
/// Every output is a pure function of (key, counter), and `split` derives a
/// child key without consuming parent state, so any tree of streams built
/// from one master seed reproduces exactly regardless of thread scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed)
      : key_(detail::mix64(seed ^ 0x7c4d9d3f9be4a6b1ull)) {}

  /// Child stream for the given index; the parent is not advanced.
  RngStream split(std::uint64_t index) const {
    RngStream child(0);
    child.key_ = detail::mix64(detail::mix64(key_ ^ 0xd1342543de82ef95ull) + index);
    child.counter_ = 0;
    return child;
  }

  std::uint64_t next_u64() {
    return detail::mix64(key_ + detail::kGolden * ++counter_);
  }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Index in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    return next_u64() % n;
  }

  /// Standard normal via Box-Muller (two uniforms per draw).
  double next_gaussian() {
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qldp
