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
#include <vector>

#include "stabforest/dataset.hpp"
#include "stabforest/forest.hpp"

namespace stabforest {

/// Feature indices, most important first.
using Ranking = std::vector<std::size_t>;

struct TrialsConfig {
  std::size_t max_trials_per_subject = 400;
  std::size_t top_k = 5;
  std::uint64_t master_seed = 42;
  /// Stop a subject once its cumulative top-k set survived this many
  /// consecutive correct trials. 0 runs every trial.
  std::size_t early_stop_window = 50;
  ForestConfig forest;
  std::size_t workers = 1;

  void validate(std::size_t n_features) const;
};

struct TrialRecord {
  std::size_t subject = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool correct = false;
  /// Present only for correct trials.
  Ranking top_features;
  /// One prediction per holdout row of the subject.
  std::vector<std::uint8_t> predictions;
};

struct VoteTally {
  std::vector<double> borda;
  std::vector<std::size_t> membership;
  std::size_t n_ballots = 0;

  explicit VoteTally(std::size_t n_features = 0) : borda(n_features, 0.0), membership(n_features, 0) {}
  /// Borda weight k - r + 1 for the feature at 1-based rank r.
  void add_ballot(const Ranking& ballot, std::size_t k);
  void remove_ballot(const Ranking& ballot, std::size_t k);
  bool operator==(const VoteTally&) const = default;
};

struct SubjectSummary {
  std::size_t subject = 0;
  VoteTally tally;
  /// Empty when the subject was never predicted correctly.
  Ranking ranking;
  std::size_t trials_run = 0;
  std::size_t trials_correct = 0;
  bool stopped_early = false;
};

struct SetFrequency {
  Ranking features;  // ascending feature index
  std::size_t count = 0;
};

struct StabilityReport {
  std::size_t top_k = 0;
  std::uint64_t master_seed = 0;
  std::vector<std::string> feature_names;
  std::vector<SubjectSummary> per_subject;
  VoteTally group_tally;
  Ranking group_ranking;
  double trial_accuracy = 0.0;
  double majority_accuracy = 0.0;
  std::optional<std::size_t> stability_iteration;
  std::vector<std::size_t> never_correct_subjects;
  /// Most frequent whole top-k sets over all correct trials.
  std::vector<SetFrequency> set_frequencies;
  /// Every trial, sorted by (subject, trial).
  std::vector<TrialRecord> records;
  /// Trials whose derived seed repeats an earlier trial's seed in this run.
  std::size_t seed_collisions = 0;
  double wall_time_ms = 0.0;
};

/// k highest scores; ties go to the lower feature index.
Ranking top_k_features(const ImportanceVector& importance, std::size_t k);

/// Seeded repeated LOSO trials for one subject.
std::vector<TrialRecord> run_subject_trials(const Dataset& d, std::size_t subject,
                                            const TrialsConfig& cfg);

VoteTally tally_votes(std::span<const Ranking> ballots, std::size_t k, std::size_t n_features);

/// Top k by descending borda, then descending membership, then ascending
/// index. Features that never received a vote are not ranked.
Ranking subject_ranking(const VoteTally& tally, std::size_t k);

struct GroupResult {
  VoteTally tally;
  Ranking ranking;
};

/// Each subject ranking is one ballot; empty rankings are ignored.
GroupResult group_ranking(std::span<const Ranking> subject_rankings, std::size_t k,
                          std::size_t n_features);

/// Smallest trial T such that the cumulative group top-k set is the final
/// set at every trial >= T. nullopt when it settles only at the last trial.
std::optional<std::size_t> stability_iteration(std::span<const TrialRecord> records, std::size_t k,
                                               std::size_t n_features);

StabilityReport run_randomized_trials(const Dataset& d, const TrialsConfig& cfg);

}  // namespace stabforest
