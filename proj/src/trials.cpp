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

#include "stabforest/trials.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <set>

#include "stabforest/error.hpp"
#include "stabforest/parallel.hpp"
#include "stabforest/rng.hpp"

namespace stabforest {

namespace {

Ranking sorted_set(Ranking r) {
  std::sort(r.begin(), r.end());
  return r;
}

void check_ballot(const Ranking& ballot, std::size_t k, std::size_t n_features) {
  if (ballot.size() > k) throw Error("ballot longer than k");
  std::set<std::size_t> seen;
  for (auto f : ballot) {
    if (f >= n_features) throw Error("ballot feature index out of range");
    if (!seen.insert(f).second) throw Error("ballot repeats a feature");
  }
}

}  // namespace

void TrialsConfig::validate(std::size_t n_features) const {
  if (top_k < 1 || top_k > n_features) throw Error("top_k must be in [1, n_features]");
  if (max_trials_per_subject < 1) throw Error("max_trials_per_subject must be >= 1");
  forest.validate(n_features);
}

void VoteTally::add_ballot(const Ranking& ballot, std::size_t k) {
  for (std::size_t r = 0; r < ballot.size(); ++r) {
    borda[ballot[r]] += static_cast<double>(k - r);
    ++membership[ballot[r]];
  }
  ++n_ballots;
}

void VoteTally::remove_ballot(const Ranking& ballot, std::size_t k) {
  for (std::size_t r = 0; r < ballot.size(); ++r) {
    borda[ballot[r]] -= static_cast<double>(k - r);
    --membership[ballot[r]];
  }
  --n_ballots;
}

Ranking top_k_features(const ImportanceVector& importance, std::size_t k) {
  const auto& s = importance.scores;
  if (k > s.size()) throw Error("k exceeds the number of features");
  Ranking idx(s.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  idx.resize(k);
  return idx;
}

VoteTally tally_votes(std::span<const Ranking> ballots, std::size_t k, std::size_t n_features) {
  VoteTally tally(n_features);
  for (const auto& b : ballots) {
    check_ballot(b, k, n_features);
    tally.add_ballot(b, k);
  }
  return tally;
}

Ranking subject_ranking(const VoteTally& tally, std::size_t k) {
  if (tally.n_ballots == 0) throw Error("no correct trials for subject");
  Ranking idx;
  for (std::size_t f = 0; f < tally.membership.size(); ++f)
    if (tally.membership[f] > 0) idx.push_back(f);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (tally.borda[a] != tally.borda[b]) return tally.borda[a] > tally.borda[b];
    if (tally.membership[a] != tally.membership[b]) return tally.membership[a] > tally.membership[b];
    return a < b;
  });
  if (idx.size() > k) idx.resize(k);
  return idx;
}

GroupResult group_ranking(std::span<const Ranking> subject_rankings, std::size_t k,
                          std::size_t n_features) {
  std::vector<Ranking> ballots;
  for (const auto& r : subject_rankings)
    if (!r.empty()) ballots.push_back(r);
  if (ballots.empty()) throw Error("all subjects were never predicted correctly");
  GroupResult g;
  g.tally = tally_votes(ballots, k, n_features);
  g.ranking = subject_ranking(g.tally, k);
  return g;
}

std::optional<std::size_t> stability_iteration(std::span<const TrialRecord> records, std::size_t k,
                                               std::size_t n_features) {
  if (records.empty()) return std::nullopt;
  std::vector<const TrialRecord*> order;
  std::size_t n_subjects = 0, last_trial = 0;
  for (const auto& r : records) {
    order.push_back(&r);
    n_subjects = std::max(n_subjects, r.subject + 1);
    last_trial = std::max(last_trial, r.trial);
  }
  std::sort(order.begin(), order.end(), [](const TrialRecord* a, const TrialRecord* b) {
    return a->trial != b->trial ? a->trial < b->trial : a->subject < b->subject;
  });

  // Subject tallies and the group tally are updated in place as each trial
  // index is absorbed; only subjects touched in that trial are re-ranked.
  std::vector<VoteTally> subject_tally(n_subjects, VoteTally(n_features));
  std::vector<Ranking> subject_rank(n_subjects);
  VoteTally group(n_features);
  std::vector<std::optional<Ranking>> group_set(last_trial + 1);
  std::size_t pos = 0;
  for (std::size_t t = 0; t <= last_trial; ++t) {
    for (; pos < order.size() && order[pos]->trial == t; ++pos) {
      const TrialRecord& rec = *order[pos];
      if (!rec.correct) continue;
      check_ballot(rec.top_features, k, n_features);
      subject_tally[rec.subject].add_ballot(rec.top_features, k);
      Ranking updated = subject_ranking(subject_tally[rec.subject], k);
      auto& current = subject_rank[rec.subject];
      if (updated == current) continue;
      if (!current.empty()) group.remove_ballot(current, k);
      group.add_ballot(updated, k);
      current = std::move(updated);
    }
    if (group.n_ballots > 0) group_set[t] = sorted_set(subject_ranking(group, k));
  }

  const auto& final_set = group_set[last_trial];
  if (!final_set) return std::nullopt;
  std::size_t settled = last_trial;
  while (settled > 0 && group_set[settled - 1] == final_set) --settled;
  if (settled == last_trial) return std::nullopt;
  return settled;
}

std::vector<TrialRecord> run_subject_trials(const Dataset& d, std::size_t subject,
                                            const TrialsConfig& cfg) {
  cfg.validate(d.n_features);
  const SubjectSplit split = subject_partition(d, subject);
  std::vector<TrialRecord> records;
  VoteTally tally(d.n_features);
  Ranking current_set;
  std::size_t stable_for = 0;
  for (std::size_t t = 0; t < cfg.max_trials_per_subject; ++t) {
    TrialRecord rec;
    rec.subject = subject;
    rec.trial = t;
    rec.seed = derive_trial_seed(cfg.master_seed, subject, t);
    const Forest forest = train_forest(split.train, cfg.forest, rec.seed);
    rec.correct = true;
    for (std::size_t i = 0; i < split.holdout.n_rows; ++i) {
      rec.predictions.push_back(predict(forest, split.holdout.row(i)));
      rec.correct = rec.correct && rec.predictions.back() == split.holdout.labels[i];
    }
    if (rec.correct) {
      rec.top_features = top_k_features(compute_importance(forest, split.train, rec.seed), cfg.top_k);
      tally.add_ballot(rec.top_features, cfg.top_k);
      Ranking set = sorted_set(subject_ranking(tally, cfg.top_k));
      if (set == current_set) {
        ++stable_for;
      } else {
        current_set = std::move(set);
        stable_for = 0;
      }
    }
    records.push_back(std::move(rec));
    if (cfg.early_stop_window > 0 && stable_for >= cfg.early_stop_window) break;
  }
  return records;
}

StabilityReport run_randomized_trials(const Dataset& d, const TrialsConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (d.n_subjects < 2) throw Error("randomized trials need at least 2 subjects");
  cfg.validate(d.n_features);
  const std::size_t k = cfg.top_k;
  const std::size_t p = d.n_features;

  std::vector<std::vector<TrialRecord>> by_subject(d.n_subjects);
  parallel_for(d.n_subjects, cfg.workers,
               [&](std::size_t s) { by_subject[s] = run_subject_trials(d, s, cfg); });

  StabilityReport report;
  report.top_k = k;
  report.master_seed = cfg.master_seed;
  report.feature_names = d.feature_names;
  std::size_t run = 0, correct = 0, rows_scored = 0, rows_right = 0;
  std::map<Ranking, std::size_t> set_counts;
  std::vector<Ranking> rankings(d.n_subjects);
  for (std::size_t s = 0; s < d.n_subjects; ++s) {
    const auto& recs = by_subject[s];
    SubjectSummary summary;
    summary.subject = s;
    summary.tally = VoteTally(p);
    summary.trials_run = recs.size();
    summary.stopped_early = recs.size() < cfg.max_trials_per_subject;
    const auto holdout_rows = d.rows_of_subject(s);
    std::vector<std::size_t> votes1(holdout_rows.size(), 0);
    for (const auto& rec : recs) {
      for (std::size_t i = 0; i < holdout_rows.size(); ++i) votes1[i] += rec.predictions[i];
      if (!rec.correct) continue;
      ++summary.trials_correct;
      summary.tally.add_ballot(rec.top_features, k);
      ++set_counts[sorted_set(rec.top_features)];
    }
    for (std::size_t i = 0; i < holdout_rows.size(); ++i) {
      const std::uint8_t majority = 2 * votes1[i] > recs.size() ? 1 : 0;
      rows_right += majority == d.labels[holdout_rows[i]];
      ++rows_scored;
    }
    if (summary.trials_correct > 0) {
      summary.ranking = subject_ranking(summary.tally, k);
    } else {
      report.never_correct_subjects.push_back(s);
    }
    rankings[s] = summary.ranking;
    run += summary.trials_run;
    correct += summary.trials_correct;
    report.per_subject.push_back(std::move(summary));
  }
  report.trial_accuracy = static_cast<double>(correct) / static_cast<double>(run);
  report.majority_accuracy = static_cast<double>(rows_right) / static_cast<double>(rows_scored);
  GroupResult group = group_ranking(rankings, k, p);
  report.group_tally = std::move(group.tally);
  report.group_ranking = std::move(group.ranking);

  for (auto& recs : by_subject)
    for (auto& rec : recs) report.records.push_back(std::move(rec));
  report.stability_iteration = stability_iteration(report.records, k, p);
  std::vector<std::uint64_t> seeds;
  for (const auto& rec : report.records) seeds.push_back(rec.seed);
  std::sort(seeds.begin(), seeds.end());
  for (std::size_t i = 1; i < seeds.size(); ++i) report.seed_collisions += seeds[i] == seeds[i - 1];

  for (auto& [set, count] : set_counts) report.set_frequencies.push_back({set, count});
  std::stable_sort(report.set_frequencies.begin(), report.set_frequencies.end(),
                   [](const SetFrequency& a, const SetFrequency& b) { return a.count > b.count; });
  if (report.set_frequencies.size() > 20) report.set_frequencies.resize(20);
  report.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace stabforest
