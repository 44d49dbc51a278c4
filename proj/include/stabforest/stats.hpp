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
#include <span>
#include <vector>

namespace stabforest {

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

double pearson_r(std::span<const double> x, std::span<const double> y);

/// Pearson correlation of average ranks. Throws on length mismatch, fewer
/// than two items, or a constant input.
double spearman_rho(std::span<const double> x, std::span<const double> y);

/// I_x(a, b) by Lentz's continued fraction, converged to 1e-15 relative.
double regularized_incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `df` degrees of freedom (df > 0).
double student_t_cdf(double t, double df);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_sided = 1.0;
};

/// Unequal-variance two-sample t test with Welch-Satterthwaite df.
WelchResult welch_t(std::span<const double> a, std::span<const double> b);

/// |a n b| / |a u b| over feature indices; two empty sets give 1.
double set_jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace stabforest
