// Copyright 2026 The stabforest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace stabforest {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 stream. The whole state is one 64-bit word, so a copy of an
/// RngState replays exactly the same sequence on every platform.
struct RngState {
  std::uint64_t state = 0;

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state += kGoldenGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, bound) by Lemire's multiply-and-reject method;
  /// bound must be > 0.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }
};

struct SplitMixResult {
  RngState state;
  std::uint64_t value;
};

/// Functional form of one SplitMix64 step.
constexpr SplitMixResult splitmix64_next(RngState s) noexcept {
  const std::uint64_t v = s.next();
  return {s, v};
}

/// Seed for the (subject, trial) cell of a randomized-trials run. Also used
/// wherever an independent sub-stream is needed (trees, folds, permutations).
constexpr std::uint64_t derive_trial_seed(std::uint64_t master_seed,
                                          std::uint64_t subject_index,
                                          std::uint64_t trial) noexcept {
  return splitmix64_next(
             RngState{master_seed ^ (subject_index * kGoldenGamma + trial)})
      .value;
}

/// Fisher-Yates permutation of [0, n) driven by a SplitMix64 stream.
std::vector<std::size_t> shuffle(std::size_t n, std::uint64_t seed);

/// In-place variant used on hot paths; consumes draws from `rng`.
template <typename T>
void shuffle_in_place(std::vector<T>& v, RngState& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

/// Parses a decimal or 0x-prefixed hexadecimal 64-bit seed.
std::optional<std::uint64_t> parse_seed(std::string_view text);

}  // namespace stabforest
