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

#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "stabforest/error.hpp"
#include "stabforest/report.hpp"
#include "stabforest/commands.hpp"
#include "stabforest/synthetic.hpp"
#include "stabforest/validation.hpp"

namespace stabforest {
namespace {

Dataset small_planted(std::size_t n = 60, std::uint64_t seed = 1) {
  return make_planted_dataset({.n_rows = n, .n_informative = 2, .n_noise = 3, .signal = 2.0, .seed = seed})
      .dataset;
}

ForestConfig quick() {
  ForestConfig cfg;
  cfg.n_trees = 25;
  return cfg;
}

TEST(Metrics, Examples) {
  Metrics m = compute_metrics({.tp = 5, .fp = 0, .tn = 5, .fn = 0});
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.balanced_accuracy, 1.0);
  m = compute_metrics({.tp = 9, .fp = 6, .tn = 4, .fn = 1});
  EXPECT_DOUBLE_EQ(m.accuracy, 0.65);
  EXPECT_DOUBLE_EQ(m.balanced_accuracy, 0.65);
  EXPECT_FALSE(m.partial);
  // Always-positive predictor on balanced data.
  m = compute_metrics({.tp = 10, .fp = 10, .tn = 0, .fn = 0});
  EXPECT_DOUBLE_EQ(m.balanced_accuracy, 0.5);
  m = compute_metrics({.tp = 3, .fp = 0, .tn = 0, .fn = 1});
  EXPECT_TRUE(m.partial);
  EXPECT_DOUBLE_EQ(m.balanced_accuracy, 0.75);
  EXPECT_THROW(compute_metrics({}), Error);
}

TEST(Schemes, ParseAndPrint) {
  for (auto s : {Scheme::kHoldout, Scheme::kKFold, Scheme::kLoso, Scheme::kLoocv})
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  EXPECT_THROW(parse_scheme("bootstrap"), Error);
}

TEST(KFold, FoldArithmetic) {
  EXPECT_EQ(fold_sizes(3, 2), (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(fold_sizes(10, 5), (std::vector<std::size_t>(5, 2)));
  EXPECT_EQ(fold_sizes(7, 7), (std::vector<std::size_t>(7, 1)));
  EXPECT_THROW(fold_sizes(3, 4), Error);

  const Dataset d = small_planted(23);
  const auto k = kfold_validate(d, quick(), 9, 5);
  std::vector<std::size_t> seen;
  for (const auto& f : k.per_fold) {
    EXPECT_TRUE(f.test_rows.size() == 4 || f.test_rows.size() == 5);
    seen.insert(seen.end(), f.test_rows.begin(), f.test_rows.end());
  }
  std::sort(seen.begin(), seen.end());
  std::vector<std::size_t> all(23);
  std::iota(all.begin(), all.end(), std::size_t{0});
  EXPECT_EQ(seen, all);
  EXPECT_THROW(kfold_validate(d, quick(), 1, 1), Error);
  EXPECT_THROW(kfold_validate(d, quick(), 1, 24), Error);
}

TEST(KFold, PooledMatchesConcatenatedPredictions) {
  const Dataset d = small_planted(80, 4);
  const auto r = kfold_validate(d, quick(), 3, 10);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.n_rows; ++i) {
    ASSERT_GE(r.predictions[i], 0);
    correct += static_cast<std::size_t>(r.predictions[i]) == d.labels[i];
  }
  EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(correct) / static_cast<double>(d.n_rows));
  EXPECT_EQ(r.pooled.total(), d.n_rows);
  EXPECT_EQ(r.per_fold.size(), 10u);
  EXPECT_EQ(r.mean_importance.scores.size(), d.n_features);
}

TEST(KFold, FullKMatchesLeaveOneOut) {
  const Dataset d = small_planted(40, 7);
  const auto k = kfold_validate(d, quick(), 42, d.n_rows);
  const auto loso = loso_validate(d, quick(), 42);
  const auto loocv = loocv_validate(d, quick(), 42);
  EXPECT_EQ(k.predictions, loso.predictions);
  EXPECT_EQ(loocv.predictions, loso.predictions);
  EXPECT_EQ(loocv.per_fold.size(), d.n_rows);
  EXPECT_EQ(k.mean_importance.scores.size(), loso.mean_importance.scores.size());
}

TEST(Holdout, DeterministicReport) {
  const Dataset d = small_planted(50, 2);
  const auto a = holdout_validate(d, quick(), 5);
  const auto b = holdout_validate(d, quick(), 5);
  EXPECT_EQ(mask_timing(to_json(a, d.feature_names, 3)).dump(),
            mask_timing(to_json(b, d.feature_names, 3)).dump());
  EXPECT_EQ(a.per_fold.size(), 1u);
  EXPECT_EQ(a.per_fold[0].test_rows.size(), 10u);
  EXPECT_EQ(a.per_fold[0].seed, 5u);
}

TEST(Loso, SubjectsAndDegenerateFolds) {
  // Subject 2 owns every class-1 row, so its fold trains on one class.
  std::vector<double> f;
  std::vector<std::uint8_t> y;
  std::vector<std::size_t> s;
  for (std::size_t r = 0; r < 12; ++r) {
    f.push_back(static_cast<double>(r));
    f.push_back(static_cast<double>(r % 4));
    y.push_back(r >= 9 ? 1 : 0);
    s.push_back(r / 3);
  }
  const Dataset d = make_dataset(f, y, {"a", "b"}, s);
  const auto r = loso_validate(d, quick(), 1);
  EXPECT_EQ(r.per_fold.size(), 4u);
  EXPECT_EQ(r.skipped_folds, 1u);
  EXPECT_TRUE(r.per_fold[3].skipped);
  EXPECT_EQ(r.predictions[9], -1);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.pooled.total(), 9u);

  const Dataset one = make_dataset({0, 1, 2, 3}, {0, 1}, {"a", "b"}, {0, 0});
  EXPECT_THROW(loso_validate(one, quick(), 1), Error);
}

TEST(Loso, WorkerCountDoesNotChangeResults) {
  const Dataset d = small_planted(30, 5);
  const auto a = loso_validate(d, quick(), 11, 1);
  const auto b = loso_validate(d, quick(), 11, 3);
  EXPECT_EQ(mask_timing(to_json(a, d.feature_names, 3)).dump(),
            mask_timing(to_json(b, d.feature_names, 3)).dump());
}

TEST(Validate, DispatchesOnScheme) {
  const Dataset d = small_planted(30, 5);
  ValidationOptions o;
  o.k = 3;
  EXPECT_EQ(validate(d, quick(), Scheme::kKFold, 1, o).per_fold.size(), 3u);
  EXPECT_EQ(validate(d, quick(), Scheme::kHoldout, 1, o).per_fold.size(), 1u);
  EXPECT_EQ(validate(d, quick(), Scheme::kLoso, 1, o).per_fold.size(), 30u);
  EXPECT_EQ(validate(d, quick(), Scheme::kLoocv, 1, o).scheme, Scheme::kLoocv);
}

}  // namespace
}  // namespace stabforest
