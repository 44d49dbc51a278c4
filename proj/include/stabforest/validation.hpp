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
#include <string>
#include <string_view>
#include <vector>

#include "stabforest/dataset.hpp"
#include "stabforest/forest.hpp"

namespace stabforest {

enum class Scheme { kHoldout, kKFold, kLoso, kLoocv };

std::string_view to_string(Scheme s);
/// Accepts holdout, kfold, loso, loocv.
Scheme parse_scheme(std::string_view name);

/// Class 1 is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  void add(std::uint8_t truth, std::uint8_t predicted);
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  bool operator==(const ConfusionMatrix&) const = default;
};

struct Metrics {
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  /// A class had no actual members, so balanced accuracy is the one
  /// defined recall rather than the mean of two.
  bool partial = false;
};

Metrics compute_metrics(const ConfusionMatrix& cm);

struct FoldResult {
  std::size_t fold_id = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> test_rows;
  std::vector<std::uint8_t> predictions;
  ConfusionMatrix confusion;
  ImportanceVector importance;
  ImportanceVector mdi;
  bool single_class_test = false;
  /// Training side had one class; the fold was not evaluated.
  bool skipped = false;
};

struct ValidationReport {
  Scheme scheme = Scheme::kHoldout;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  double test_fraction = 0.0;
  ConfusionMatrix pooled;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  bool balanced_partial = false;
  std::vector<FoldResult> per_fold;
  /// Element-wise mean of evaluated fold importances.
  ImportanceVector mean_importance;
  /// Mean MDI, reported alongside whatever method is configured.
  ImportanceVector mean_mdi;
  /// Per original row: 0/1, or -1 when the row was never tested.
  std::vector<std::int8_t> predictions;
  std::size_t skipped_folds = 0;
  std::vector<std::string> warnings;
  double wall_time_ms = 0.0;
};

struct ValidationOptions {
  std::size_t k = 10;
  double test_fraction = 0.2;
  std::size_t workers = 1;
};

ValidationReport holdout_validate(const Dataset& d, const ForestConfig& cfg, std::uint64_t seed,
                                  double test_fraction = 0.2);

/// Sizes of k contiguous folds over n rows; the first n % k folds get one
/// extra row.
std::vector<std::size_t> fold_sizes(std::size_t n, std::size_t k);

/// Shuffle-then-slice folds. Fold forests are seeded with
/// derive_trial_seed(seed, subject of the fold's first row, 0), which makes
/// k = n_rows reproduce leave-one-out exactly.
ValidationReport kfold_validate(const Dataset& d, const ForestConfig& cfg, std::uint64_t seed,
                                std::size_t k = 10, std::size_t workers = 1);

/// One fold per subject, seeded with derive_trial_seed(seed, subject, 0).
ValidationReport loso_validate(const Dataset& d, const ForestConfig& cfg, std::uint64_t seed,
                               std::size_t workers = 1);

/// LOSO with every row treated as its own subject.
ValidationReport loocv_validate(const Dataset& d, const ForestConfig& cfg, std::uint64_t seed,
                                std::size_t workers = 1);

ValidationReport validate(const Dataset& d, const ForestConfig& cfg, Scheme scheme,
                          std::uint64_t seed, const ValidationOptions& options = {});

}  // namespace stabforest
