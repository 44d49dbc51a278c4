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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stabforest/forest.hpp"
#include "stabforest/report.hpp"
#include "stabforest/trials.hpp"
#include "stabforest/validation.hpp"

namespace stabforest {

inline constexpr const char* kVersion = "0.1.0";

/// Everything a subcommand needs. Built by the CLI from flags and an
/// optional key-value config file.
struct RunConfig {
  std::filesystem::path data;
  std::optional<std::filesystem::path> manifest;
  std::filesystem::path out;
  /// Overrides for the manifest's label and subject columns.
  std::optional<std::string> label;
  std::optional<std::string> subject;
  /// Missing-value tokens, overriding the manifest's `na` list.
  std::optional<std::vector<std::string>> na_tokens;
  /// holdout, kfold, loso, loocv or trials. Empty picks the command default.
  std::vector<std::string> schemes;
  std::vector<std::uint64_t> seeds{42, 43};
  ForestConfig forest;
  /// master_seed and forest are taken from `seeds` and `forest`.
  TrialsConfig trials;
  ValidationOptions validation;
  std::vector<std::size_t> sizes{250, 500, 2000};
  /// Score CSVs for `stats`; an optional cell label picks one cell.
  std::optional<std::filesystem::path> input_a, input_b;
  std::optional<std::string> cell_a, cell_b;
  /// Cell filter and title for `plot`.
  std::optional<std::string> cell;
  std::string title;
  std::size_t workers = 1;
};

/// Result of one compare cell: a scheme (or the trials protocol) under one
/// seed, reduced to a score vector and its top-k.
struct CellResult {
  std::string scheme;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  std::vector<double> scores;
  /// Mean MDI for validation schemes; empty for the trials protocol.
  std::vector<double> mdi_scores;
  Ranking top;
  double wall_time_ms = 0.0;

  std::string label() const { return scheme + "/" + std::to_string(seed); }
};

struct BenchmarkRow {
  std::string dataset;
  std::size_t sample_size = 0;
  std::string scheme;
  double wall_time_ms = 0.0;
  double accuracy = 0.0;
};

/// Cells completed so far; reported in error.json when a command fails.
struct Progress {
  std::vector<std::string> completed;
  std::string current;
};

Json cmd_validate(const RunConfig& cfg, Progress& progress);
Json cmd_trials(const RunConfig& cfg, Progress& progress);
Json cmd_compare(const RunConfig& cfg, Progress& progress);
Json cmd_benchmark(const RunConfig& cfg, Progress& progress);
Json cmd_stats(const RunConfig& cfg, Progress& progress);
Json cmd_plot(const RunConfig& cfg, Progress& progress);

/// Writes out/error.json describing a failed command. Never throws.
void write_error_log(const std::filesystem::path& out, const std::string& command,
                     const std::string& message, const Progress& progress);

/// Runs a subcommand, writing its outputs into cfg.out. On failure writes
/// cfg.out/error.json and returns 1; returns 0 when every cell completed.
int run_command(const std::string& name, const RunConfig& cfg);

/// Pairwise agreement between two cells of a comparison.
struct Agreement {
  double jaccard = 0.0;
  /// Empty when a score vector is constant.
  std::optional<double> spearman;
};

Agreement compare_cells(const CellResult& a, const CellResult& b);

/// Recursively replaces every "wall_time_ms" value with null.
Json mask_timing(Json j);

}  // namespace stabforest
