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
#include <vector>

#include "stabforest/dataset.hpp"
#include "stabforest/rng.hpp"

namespace stabforest {

/// Synthetic data where a known feature subset carries all class signal.
struct PlantedSpec {
  std::size_t n_rows = 200;
  std::size_t n_informative = 5;
  std::size_t n_noise = 15;
  /// Gaussian mode: class means sit at +-signal/2 with unit variance.
  /// Separable mode: the gap between the two class ranges.
  double signal = 1.0;
  bool separable = false;
  std::uint64_t seed = 0;
};

struct PlantedDataset {
  Dataset dataset;
  /// Column indices of the informative features, ascending.
  std::vector<std::size_t> informative;
};

/// Balanced labels (row i has class i % 2); noise columns are N(0, 1);
/// informative columns are placed at seeded positions among the noise.
PlantedDataset make_planted_dataset(const PlantedSpec& spec);

/// Box-Muller standard normal from a SplitMix64 stream.
double standard_normal(RngState& rng);

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(RngState& rng) {
  return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

}  // namespace stabforest
