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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stabforest {

/// Numeric feature matrix with binary labels and a row -> subject mapping.
///
/// Rows are stored row-major. A Dataset is never mutated after it has been
/// built, so sharing one between worker threads is safe.
struct Dataset {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<double> features;
  std::vector<std::uint8_t> labels;
  std::vector<std::string> feature_names;
  std::vector<std::size_t> subject_ids;
  std::size_t n_subjects = 0;
  std::string label_name = "label";
  /// Raw label text for class 0 and class 1.
  std::array<std::string, 2> label_values{"0", "1"};

  double at(std::size_t row, std::size_t feature) const {
    return features[row * n_features + feature];
  }
  std::span<const double> row(std::size_t r) const {
    return {features.data() + r * n_features, n_features};
  }
  std::array<std::size_t, 2> class_counts() const;
  bool has_both_classes() const;
  std::vector<std::size_t> rows_of_subject(std::size_t subject) const;
};

struct DatasetProfile {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::size_t n_ordinals = 0;
  std::size_t total_cardinality = 0;
  std::size_t n_dropped_rows = 0;
};

struct LoadOptions {
  std::string label_column;
  std::optional<std::string> subject_column;
  /// Column name -> categories in ascending order.
  std::map<std::string, std::vector<std::string>> ordinal_spec;
  std::vector<std::string> na_tokens{"", "NA", "?"};
};

struct LoadResult {
  Dataset dataset;
  DatasetProfile profile;
};

/// Builds a Dataset from raw parts, checking every structural invariant.
/// With `require_loadable` the loaded-dataset invariants (n_features >= 2,
/// both classes present) are enforced as well.
Dataset make_dataset(std::vector<double> features, std::vector<std::uint8_t> labels,
                     std::vector<std::string> feature_names,
                     std::vector<std::size_t> subject_ids = {},
                     bool require_loadable = true);

LoadResult load_csv(const std::filesystem::path& path, const LoadOptions& options);
LoadResult parse_csv(std::istream& in, const LoadOptions& options);

/// Reads a `key = value` manifest: `label`, `subject`, `na` (comma list) and
/// `ordinal.<column>` (comma list of categories, lowest first).
LoadOptions read_manifest(const std::filesystem::path& path);
LoadOptions parse_manifest(std::istream& in);

/// Writes features, subject column (when subjects are not one per row) and
/// the raw label text. Values use shortest round-trip formatting.
void write_csv(const Dataset& d, std::ostream& out);
void write_csv(const Dataset& d, const std::filesystem::path& path);

/// Row subset in the given order. Subject indices are renumbered densely in
/// order of first appearance.
Dataset select_rows(const Dataset& d, std::span<const std::size_t> rows);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  bool test_single_class = false;
};

TrainTestSplit split_train_test(const Dataset& d, double test_fraction, std::uint64_t seed);

struct SubjectSplit {
  Dataset train;
  Dataset holdout;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> holdout_rows;
};

/// Leave-one-subject-out partition. Both halves keep the original row order.
SubjectSplit subject_partition(const Dataset& d, std::size_t subject);

/// Subsample of `n` rows taken as the prefix of a seeded shuffle.
Dataset subsample(const Dataset& d, std::size_t n, std::uint64_t seed);

}  // namespace stabforest
