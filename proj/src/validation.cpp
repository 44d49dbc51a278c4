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

#include "stabforest/validation.hpp"

#include <algorithm>
#include <array>
#include <chrono>

#include "stabforest/error.hpp"
#include "stabforest/parallel.hpp"
#include "stabforest/rng.hpp"

namespace stabforest {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct FoldPlan {
  std::vector<std::size_t> test_rows;
  std::uint64_t seed = 0;
};

// Trains on every row outside the fold (original order) and scores the fold.
FoldResult run_fold(const Dataset& d, const ForestConfig& cfg, std::size_t fold_id,
                    const FoldPlan& plan) {
  FoldResult fold;
  fold.fold_id = fold_id;
  fold.seed = plan.seed;
  fold.test_rows = plan.test_rows;
  std::vector<bool> in_test(d.n_rows, false);
  for (auto r : plan.test_rows) in_test[r] = true;
  std::vector<std::size_t> train_rows;
  train_rows.reserve(d.n_rows - plan.test_rows.size());
  for (std::size_t r = 0; r < d.n_rows; ++r)
    if (!in_test[r]) train_rows.push_back(r);
  const Dataset train = select_rows(d, train_rows);
  std::array<bool, 2> seen{false, false};
  for (auto r : plan.test_rows) seen[d.labels[r]] = true;
  fold.single_class_test = !(seen[0] && seen[1]);
  if (!train.has_both_classes()) {
    fold.skipped = true;
    return fold;
  }
  const Forest forest = train_forest(train, cfg, plan.seed);
  for (auto r : plan.test_rows) {
    const std::uint8_t pred = predict(forest, d.row(r));
    fold.predictions.push_back(pred);
    fold.confusion.add(d.labels[r], pred);
  }
  fold.importance = compute_importance(forest, train, plan.seed);
  fold.mdi = cfg.importance_method == ImportanceMethod::kMdi ? fold.importance
                                                             : mdi_importance(forest);
  return fold;
}

ValidationReport assemble(const Dataset& d, const ForestConfig& cfg, Scheme scheme,
                          std::uint64_t seed, const std::vector<FoldPlan>& plans,
                          std::size_t workers) {
  ValidationReport report;
  report.scheme = scheme;
  report.seed = seed;
  report.per_fold.resize(plans.size());
  parallel_for(plans.size(), workers,
               [&](std::size_t f) { report.per_fold[f] = run_fold(d, cfg, f, plans[f]); });

  report.predictions.assign(d.n_rows, -1);
  report.mean_importance.method = cfg.importance_method;
  report.mean_importance.scores.assign(d.n_features, 0.0);
  report.mean_mdi.method = ImportanceMethod::kMdi;
  report.mean_mdi.scores.assign(d.n_features, 0.0);
  std::size_t evaluated = 0;
  for (const auto& fold : report.per_fold) {
    if (fold.skipped) {
      ++report.skipped_folds;
      report.warnings.push_back("fold " + std::to_string(fold.fold_id) +
                                " skipped: training rows hold a single class");
      continue;
    }
    if (fold.single_class_test && scheme != Scheme::kLoso && scheme != Scheme::kLoocv)
      report.warnings.push_back("fold " + std::to_string(fold.fold_id) +
                                " test rows hold a single class");
    ++evaluated;
    report.pooled += fold.confusion;
    for (std::size_t i = 0; i < fold.test_rows.size(); ++i)
      report.predictions[fold.test_rows[i]] = static_cast<std::int8_t>(fold.predictions[i]);
    for (std::size_t j = 0; j < d.n_features; ++j) {
      report.mean_importance.scores[j] += fold.importance.scores[j];
      report.mean_mdi.scores[j] += fold.mdi.scores[j];
    }
    if (fold.importance.rows_never_oob > 0)
      report.warnings.push_back("fold " + std::to_string(fold.fold_id) + ": " +
                                std::to_string(fold.importance.rows_never_oob) +
                                " training rows were never out of bag");
  }
  if (evaluated == 0) throw Error("no fold could be evaluated");
  for (auto& s : report.mean_importance.scores) s /= static_cast<double>(evaluated);
  for (auto& s : report.mean_mdi.scores) s /= static_cast<double>(evaluated);
  const Metrics m = compute_metrics(report.pooled);
  report.accuracy = m.accuracy;
  report.balanced_accuracy = m.balanced_accuracy;
  report.balanced_partial = m.partial;
  return report;
}

}  // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kHoldout: return "holdout";
    case Scheme::kKFold: return "kfold";
    case Scheme::kLoso: return "loso";
    case Scheme::kLoocv: return "loocv";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "holdout") return Scheme::kHoldout;
  if (name == "kfold") return Scheme::kKFold;
  if (name == "loso") return Scheme::kLoso;
  if (name == "loocv") return Scheme::kLoocv;
  throw Error("unknown scheme '" + std::string(name) + "' (expected holdout|kfold|loso|loocv)");
}

void ConfusionMatrix::add(std::uint8_t truth, std::uint8_t predicted) {
  if (truth) {
    ++(predicted ? tp : fn);
  } else {
    ++(predicted ? fp : tn);
  }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
  return *this;
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw Error("metrics of an empty confusion matrix");
  Metrics m;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
  const std::size_t pos = cm.tp + cm.fn;
  const std::size_t neg = cm.tn + cm.fp;
  const double tpr = pos ? static_cast<double>(cm.tp) / static_cast<double>(pos) : 0.0;
  const double tnr = neg ? static_cast<double>(cm.tn) / static_cast<double>(neg) : 0.0;
  if (pos && neg) {
    m.balanced_accuracy = 0.5 * (tpr + tnr);
  } else {
    m.balanced_accuracy = pos ? tpr : tnr;
    m.partial = true;
  }
  return m;
}

ValidationReport holdout_validate(const Dataset& d, const ForestConfig& cfg, std::uint64_t seed,
                                  double test_fraction) {
  const auto start = Clock::now();
  const TrainTestSplit split = split_train_test(d, test_fraction, seed);
  auto report = assemble(d, cfg, Scheme::kHoldout, seed, {FoldPlan{split.test_rows, seed}}, 1);
  report.test_fraction = test_fraction;
  if (split.test_single_class) report.warnings.push_back("test split holds a single class");
  report.wall_time_ms = elapsed_ms(start);
  return report;
}

std::vector<std::size_t> fold_sizes(std::size_t n, std::size_t k) {
  if (k < 2 || k > n) throw Error("k must satisfy 2 <= k <= n_rows");
  std::vector<std::size_t> sizes(k, n / k);
  for (std::size_t f = 0; f < n % k; ++f) ++sizes[f];
  return sizes;
}

ValidationReport kfold_validate(const Dataset& d, const ForestConfig& cfg, std::uint64_t seed,
                                std::size_t k, std::size_t workers) {
  const auto sizes = fold_sizes(d.n_rows, k);
  const auto start = Clock::now();
  const auto perm = shuffle(d.n_rows, seed);
  std::vector<FoldPlan> plans(k);
  std::size_t offset = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = sizes[f];
    auto& rows = plans[f].test_rows;
    rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(offset),
                perm.begin() + static_cast<std::ptrdiff_t>(offset + size));
    std::sort(rows.begin(), rows.end());
    plans[f].seed = derive_trial_seed(seed, d.subject_ids[rows.front()], 0);
    offset += size;
  }
  auto report = assemble(d, cfg, Scheme::kKFold, seed, plans, workers);
  report.k = k;
  report.wall_time_ms = elapsed_ms(start);
  return report;
}

ValidationReport loso_validate(const Dataset& d, const ForestConfig& cfg, std::uint64_t seed,
                               std::size_t workers) {
  if (d.n_subjects < 2) throw Error("LOSO needs at least 2 subjects");
  const auto start = Clock::now();
  std::vector<FoldPlan> plans(d.n_subjects);
  for (std::size_t r = 0; r < d.n_rows; ++r) plans[d.subject_ids[r]].test_rows.push_back(r);
  for (std::size_t s = 0; s < d.n_subjects; ++s) plans[s].seed = derive_trial_seed(seed, s, 0);
  auto report = assemble(d, cfg, Scheme::kLoso, seed, plans, workers);
  report.k = d.n_subjects;
  report.wall_time_ms = elapsed_ms(start);
  return report;
}

ValidationReport loocv_validate(const Dataset& d, const ForestConfig& cfg, std::uint64_t seed,
                                std::size_t workers) {
  Dataset rows_as_subjects = d;
  for (std::size_t r = 0; r < d.n_rows; ++r) rows_as_subjects.subject_ids[r] = r;
  rows_as_subjects.n_subjects = d.n_rows;
  auto report = loso_validate(rows_as_subjects, cfg, seed, workers);
  report.scheme = Scheme::kLoocv;
  return report;
}

ValidationReport validate(const Dataset& d, const ForestConfig& cfg, Scheme scheme,
                          std::uint64_t seed, const ValidationOptions& options) {
  switch (scheme) {
    case Scheme::kHoldout: return holdout_validate(d, cfg, seed, options.test_fraction);
    case Scheme::kKFold: return kfold_validate(d, cfg, seed, options.k, options.workers);
    case Scheme::kLoso: return loso_validate(d, cfg, seed, options.workers);
    case Scheme::kLoocv: return loocv_validate(d, cfg, seed, options.workers);
  }
  throw Error("unknown scheme");
}

}  // namespace stabforest
