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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stabforest/dataset.hpp"

namespace stabforest {

enum class ImportanceMethod { kMdi, kOobPermutation };

std::string_view to_string(ImportanceMethod m);
/// Accepts "mdi" and "oob".
ImportanceMethod parse_importance_method(std::string_view name);

/// Defaults follow R randomForest: 500 trees, mtry = floor(sqrt(p)), fully
/// grown trees (terminal node size 1).
struct ForestConfig {
  std::size_t n_trees = 500;
  std::optional<std::size_t> mtry;
  std::size_t min_node_size = 1;
  std::optional<std::size_t> max_depth;
  ImportanceMethod importance_method = ImportanceMethod::kOobPermutation;

  std::size_t resolved_mtry(std::size_t n_features) const;
  /// Throws Error unless 1 <= mtry <= p, n_trees >= 1, min_node_size >= 1.
  void validate(std::size_t n_features) const;
};

/// One node of a CART tree. Internal nodes send `x[feature] <= threshold`
/// to `left`. Counts are bootstrap-weighted class counts that reached the
/// node during training.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t count0 = 0;
  std::uint32_t count1 = 0;

  bool is_leaf() const { return feature < 0; }
  std::uint8_t leaf_class() const { return count1 > count0 ? 1 : 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(std::span<const double> row) const;
  std::uint8_t predict(std::span<const double> row) const { return leaf_for(row).leaf_class(); }
};

struct Forest {
  std::vector<Tree> trees;
  ForestConfig config;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
  std::vector<std::string> feature_names;
  /// Per tree, training rows that were never drawn into its bootstrap.
  std::vector<std::vector<std::uint32_t>> oob_indices;
};

struct ImportanceVector {
  std::vector<double> scores;
  ImportanceMethod method = ImportanceMethod::kOobPermutation;
  /// Training rows that were in-bag for every tree (permutation only).
  std::size_t rows_never_oob = 0;
};

/// 1 - sum_i (c_i / n)^2 for a two-class node.
double gini_impurity(std::uint64_t count0, std::uint64_t count1);

/// Greedy CART forest on bootstrap samples. Tree t draws all of its
/// randomness from derive_trial_seed(seed, t, 0), so the result is a pure
/// function of (train, config, seed).
Forest train_forest(const Dataset& train, const ForestConfig& config, std::uint64_t seed);

/// Majority vote over trees; an exact tie predicts class 0.
std::uint8_t predict(const Forest& forest, std::span<const double> row);
std::vector<std::uint8_t> predict_all(const Forest& forest, const Dataset& d);

/// Accuracy of the out-of-bag majority vote over rows that are OOB for at
/// least one tree. Returns 0 when no row is ever OOB.
double oob_accuracy(const Forest& forest, const Dataset& train);

/// Mean decrease in Gini impurity, weighted by node sample fraction and
/// averaged over trees.
ImportanceVector mdi_importance(const Forest& forest);

/// Per feature: mean over trees of (OOB accuracy - OOB accuracy with the
/// feature permuted among that tree's OOB rows). Permutation for (tree t,
/// feature j) uses derive_trial_seed(seed, t, j + 1).
ImportanceVector oob_permutation_importance(const Forest& forest, const Dataset& train,
                                            std::uint64_t seed);

/// The permutation of a tree's q OOB rows used for one feature, drawn from
/// the given stream seed.
std::vector<std::uint32_t> oob_permutation(std::size_t q, std::uint64_t stream_seed);

/// Dispatches on forest.config.importance_method.
ImportanceVector compute_importance(const Forest& forest, const Dataset& train,
                                    std::uint64_t seed);

}  // namespace stabforest
