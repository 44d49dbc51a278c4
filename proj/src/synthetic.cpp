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

#include "stabforest/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "stabforest/error.hpp"

namespace stabforest {

double standard_normal(RngState& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

PlantedDataset make_planted_dataset(const PlantedSpec& spec) {
  const std::size_t p = spec.n_informative + spec.n_noise;
  if (spec.n_rows < 2 || p < 2) throw Error("planted dataset needs >= 2 rows and >= 2 features");

  PlantedDataset out;
  auto positions = shuffle(p, derive_trial_seed(spec.seed, 0, 1));
  out.informative.assign(positions.begin(),
                         positions.begin() + static_cast<std::ptrdiff_t>(spec.n_informative));
  std::sort(out.informative.begin(), out.informative.end());
  std::vector<bool> is_informative(p, false);
  for (auto j : out.informative) is_informative[j] = true;

  RngState rng{derive_trial_seed(spec.seed, 0, 0)};
  std::vector<double> features(spec.n_rows * p);
  std::vector<std::uint8_t> labels(spec.n_rows);
  for (std::size_t r = 0; r < spec.n_rows; ++r) {
    labels[r] = static_cast<std::uint8_t>(r % 2);
    const double sign = labels[r] ? 1.0 : -1.0;
    for (std::size_t j = 0; j < p; ++j) {
      double v;
      if (!is_informative[j]) {
        v = standard_normal(rng);
      } else if (spec.separable) {
        v = sign * (spec.signal / 2.0 + uniform01(rng));
      } else {
        v = sign * spec.signal / 2.0 + standard_normal(rng);
      }
      features[r * p + j] = v;
    }
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "f%02zu", j);
    names.emplace_back(buf);
  }
  out.dataset = make_dataset(std::move(features), std::move(labels), std::move(names));
  return out;
}

}  // namespace stabforest
