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
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stabforest/error.hpp"
#include "stabforest/forest.hpp"
#include "stabforest/report.hpp"
#include "stabforest/rng.hpp"
#include "stabforest/synthetic.hpp"

namespace stabforest {
namespace {

Dataset breast_cancer() {
  return load_csv(STABFOREST_DATA_DIR "/breast_cancer.csv",
                  read_manifest(STABFOREST_DATA_DIR "/breast_cancer.cfg"))
      .dataset;
}

TEST(Gini, Values) {
  EXPECT_EQ(gini_impurity(0, 8), 0.0);
  EXPECT_EQ(gini_impurity(4, 4), 0.5);
  EXPECT_DOUBLE_EQ(gini_impurity(3, 1), 0.375);
  EXPECT_THROW(gini_impurity(0, 0), Error);
}

TEST(Config, Validation) {
  ForestConfig c;
  EXPECT_EQ(c.resolved_mtry(9), 3u);
  EXPECT_EQ(c.resolved_mtry(2), 1u);
  c.mtry = 0;
  EXPECT_THROW(c.validate(4), Error);
  c.mtry = 5;
  EXPECT_THROW(c.validate(4), Error);
  c.mtry.reset();
  c.n_trees = 0;
  EXPECT_THROW(c.validate(4), Error);
  c.n_trees = 1;
  c.min_node_size = 0;
  EXPECT_THROW(c.validate(4), Error);
  EXPECT_EQ(parse_importance_method("mdi"), ImportanceMethod::kMdi);
  EXPECT_THROW(parse_importance_method("gini"), Error);
}

TEST(TrainForest, SplitsMatchExhaustiveEnumeration) {
  int trees_checked = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    RngState gen{seed * 7919};
    const std::size_t n = 4 + gen.below(9);   // 4..12 rows
    const std::size_t p = 2 + gen.below(2);   // 2..3 features
    std::vector<double> f(n * p);
    std::vector<std::uint8_t> y(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < p; ++j) f[r * p + j] = static_cast<double>(gen.below(5)) * 0.5;
      y[r] = static_cast<std::uint8_t>(gen.below(2));
    }
    y[0] = 0;
    y[1] = 1;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < p; ++j) names.push_back("f" + std::to_string(j));
    const Dataset d = make_dataset(f, y, names);
    ForestConfig cfg;
    cfg.n_trees = 3;
    cfg.mtry = d.n_features;
    const Forest forest = train_forest(d, cfg, seed);
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
      const auto mismatch = oracle::tree_mismatch(d, forest.trees[t], oracle::bootstrap_weights(n, seed, t));
      ASSERT_FALSE(mismatch) << "seed " << seed << " tree " << t << ": " << *mismatch;
      ++trees_checked;
    }
  }
  EXPECT_EQ(trees_checked, 900);
}

TEST(TrainForest, OobIndicesAreRowsOutsideTheBootstrap) {
  const Dataset d = make_planted_dataset({.n_rows = 200, .seed = 3}).dataset;
  ForestConfig cfg;
  cfg.n_trees = 500;
  const Forest forest = train_forest(d, cfg, 11);
  double fraction = 0.0;
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const auto w = oracle::bootstrap_weights(d.n_rows, 11, t);
    std::vector<std::uint32_t> expected;
    for (std::size_t r = 0; r < d.n_rows; ++r)
      if (w[r] == 0) expected.push_back(static_cast<std::uint32_t>(r));
    ASSERT_EQ(forest.oob_indices[t], expected);
    fraction += static_cast<double>(expected.size()) / static_cast<double>(d.n_rows);
  }
  fraction /= static_cast<double>(forest.trees.size());
  EXPECT_GE(fraction, 0.33);
  EXPECT_LE(fraction, 0.41);
}

TEST(TrainForest, DeterministicAndSeedSensitive) {
  const Dataset d = breast_cancer();
  ForestConfig cfg;
  cfg.n_trees = 20;
  const Forest a = train_forest(d, cfg, 42);
  const Forest b = train_forest(d, cfg, 42);
  const Forest c = train_forest(d, cfg, 43);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_NE(a.oob_indices, c.oob_indices);
}

TEST(TrainForest, RejectsSingleClass) {
  const Dataset d = make_dataset({1, 2, 3, 4}, {1, 1}, {"a", "b"}, {}, false);
  EXPECT_THROW(train_forest(d, {}, 1), Error);
}

TEST(TrainForest, MaxDepthAndMinNodeSize) {
  const Dataset d = breast_cancer();
  ForestConfig cfg;
  cfg.n_trees = 10;
  cfg.max_depth = 2;
  for (const auto& tree : train_forest(d, cfg, 5).trees) EXPECT_LE(tree.nodes.size(), 7u);
  cfg.max_depth.reset();
  cfg.min_node_size = 20;
  for (const auto& tree : train_forest(d, cfg, 5).trees)
    for (const auto& node : tree.nodes) EXPECT_GE(node.count0 + node.count1, 20u);
}

TEST(Predict, TieGoesToClassZero) {
  Forest f;
  f.n_features = 2;
  Tree zero, one;
  TreeNode leaf0;
  leaf0.count0 = 3;
  TreeNode leaf1;
  leaf1.count1 = 3;
  zero.nodes = {leaf0};
  one.nodes = {leaf1};
  f.trees = {zero, one};
  const std::vector<double> row{0.0, 0.0};
  EXPECT_EQ(predict(f, row), 0);
  f.trees = {one, one, zero};
  EXPECT_EQ(predict(f, row), 1);
  f.trees = {one};
  EXPECT_EQ(predict(f, row), 1);
  EXPECT_THROW(predict(f, std::vector<double>{1.0}), Error);
}

TEST(Predict, SeparableFeatureGivesHighOobAccuracy) {
  const auto planted = make_planted_dataset(
      {.n_rows = 200, .n_informative = 1, .n_noise = 4, .signal = 1.0, .separable = true, .seed = 9});
  ForestConfig cfg;
  const Forest f = train_forest(planted.dataset, cfg, 1);
  EXPECT_GE(oob_accuracy(f, planted.dataset), 0.95);
}

TEST(Predict, InBagAccuracyAtLeastOob) {
  const Dataset d = breast_cancer();
  ForestConfig cfg;
  cfg.n_trees = 100;
  const Forest f = train_forest(d, cfg, 8);
  std::vector<bool> in_bag(d.n_rows, false);
  for (std::size_t t = 0; t < f.trees.size(); ++t) {
    std::vector<bool> oob(d.n_rows, false);
    for (auto r : f.oob_indices[t]) oob[r] = true;
    for (std::size_t r = 0; r < d.n_rows; ++r)
      if (!oob[r]) in_bag[r] = true;
  }
  std::size_t used = 0, correct = 0;
  for (std::size_t r = 0; r < d.n_rows; ++r) {
    if (!in_bag[r]) continue;
    ++used;
    correct += predict(f, d.row(r)) == d.labels[r];
  }
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(used), oob_accuracy(f, d));
}

TEST(Mdi, NeverSplitFeatureScoresZero) {
  auto planted = make_planted_dataset({.n_rows = 100, .n_informative = 2, .n_noise = 2, .seed = 4});
  Dataset d = planted.dataset;
  for (std::size_t r = 0; r < d.n_rows; ++r) d.features[r * d.n_features + 0] = 1.0;
  ForestConfig cfg;
  cfg.n_trees = 50;
  const auto imp = mdi_importance(train_forest(d, cfg, 3));
  EXPECT_EQ(imp.scores[0], 0.0);
  for (double s : imp.scores) {
    EXPECT_GE(s, 0.0);
    EXPECT_TRUE(std::isfinite(s));
  }
}

TEST(Mdi, PlantedFeatureHasMaxScore) {
  const auto planted = make_planted_dataset(
      {.n_rows = 200, .n_informative = 1, .n_noise = 9, .signal = 2.0, .seed = 21});
  ForestConfig cfg;
  cfg.n_trees = 200;
  const auto imp = mdi_importance(train_forest(planted.dataset, cfg, 5));
  const auto top = std::max_element(imp.scores.begin(), imp.scores.end()) - imp.scores.begin();
  EXPECT_EQ(static_cast<std::size_t>(top), planted.informative[0]);
}

// Equal-gain splits on different features are broken by feature index, and
// deep nodes tie often (peeling off a few pure rows scores the same on any
// feature). Stumps on a strong signal have no ties, so symmetry is exact.
TEST(Mdi, EquivariantUnderColumnReordering) {
  const Dataset d = make_planted_dataset(
      {.n_rows = 200, .n_informative = 2, .n_noise = 3, .signal = 2.0, .seed = 2}).dataset;
  const std::vector<std::size_t> order{3, 0, 4, 1, 2};
  std::vector<double> f(d.features.size());
  std::vector<std::string> names;
  for (std::size_t j = 0; j < order.size(); ++j) names.push_back(d.feature_names[order[j]]);
  for (std::size_t r = 0; r < d.n_rows; ++r)
    for (std::size_t j = 0; j < order.size(); ++j) f[r * 5 + j] = d.at(r, order[j]);
  const Dataset e = make_dataset(f, d.labels, names);
  ForestConfig cfg;
  cfg.n_trees = 50;
  cfg.mtry = 5;
  cfg.max_depth = 1;
  const auto a = mdi_importance(train_forest(d, cfg, 17));
  const auto b = mdi_importance(train_forest(e, cfg, 17));
  for (std::size_t j = 0; j < order.size(); ++j) EXPECT_EQ(b.scores[j], a.scores[order[j]]);
}

// Direct restatement of permutation importance: every OOB row of every tree
// is re-predicted with column j taken from its permutation donor.
ImportanceVector naive_permutation_importance(const Forest& forest, const Dataset& d,
                                              std::uint64_t seed) {
  ImportanceVector out;
  out.scores.assign(d.n_features, 0.0);
  std::size_t used = 0;
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const auto& oob = forest.oob_indices[t];
    if (oob.empty()) continue;
    ++used;
    std::int64_t base = 0;
    for (auto r : oob) base += forest.trees[t].predict(d.row(r)) == d.labels[r];
    for (std::size_t j = 0; j < d.n_features; ++j) {
      const auto perm = oob_permutation(oob.size(), derive_trial_seed(seed, t, j + 1));
      std::int64_t correct = 0;
      for (std::size_t i = 0; i < oob.size(); ++i) {
        std::vector<double> x(d.row(oob[i]).begin(), d.row(oob[i]).end());
        x[j] = d.at(oob[perm[i]], j);
        correct += forest.trees[t].predict(x) == d.labels[oob[i]];
      }
      out.scores[j] += static_cast<double>(base - correct) / static_cast<double>(oob.size());
    }
  }
  for (auto& s : out.scores) s /= static_cast<double>(used);
  return out;
}

TEST(OobPermutation, MatchesNaiveRestatement) {
  const Dataset d = breast_cancer();
  ForestConfig cfg;
  cfg.n_trees = 40;
  const Forest f = train_forest(d, cfg, 77);
  EXPECT_EQ(oob_permutation_importance(f, d, 77).scores, naive_permutation_importance(f, d, 77).scores);
  const auto planted = make_planted_dataset({.n_rows = 120, .seed = 6}).dataset;
  const Forest g = train_forest(planted, cfg, 5);
  EXPECT_EQ(oob_permutation_importance(g, planted, 5).scores,
            naive_permutation_importance(g, planted, 5).scores);
}

TEST(OobPermutation, PermutationIsAPermutation) {
  auto p = oob_permutation(77, 123);
  EXPECT_EQ(p, oob_permutation(77, 123));
  std::sort(p.begin(), p.end());
  for (std::uint32_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], i);
  EXPECT_TRUE(oob_permutation(0, 1).empty());
}

TEST(OobPermutation, NoiseNearZeroSeparatingFeatureLarge) {
  const auto planted = make_planted_dataset(
      {.n_rows = 200, .n_informative = 1, .n_noise = 4, .signal = 1.0, .separable = true, .seed = 9});
  const Forest f = train_forest(planted.dataset, {}, 1);
  const auto imp = oob_permutation_importance(f, planted.dataset, 1);
  EXPECT_EQ(oob_permutation_importance(f, planted.dataset, 1).scores, imp.scores);
  for (std::size_t j = 0; j < imp.scores.size(); ++j) {
    if (j == planted.informative[0]) {
      EXPECT_GE(imp.scores[j], 0.4);
    } else {
      EXPECT_LT(std::fabs(imp.scores[j]), 0.05);
    }
  }
  EXPECT_EQ(imp.rows_never_oob, 0u);
}

}  // namespace
}  // namespace stabforest
