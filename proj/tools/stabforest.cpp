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

// stabforest: random-forest validation and stable feature-importance
// rankings from the command line.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stabforest/commands.hpp"
#include "stabforest/error.hpp"
#include "stabforest/parallel.hpp"
#include "stabforest/rng.hpp"

namespace {

struct Flags {
  std::string data, manifest, out, label, subject, importance = "oob";
  std::vector<std::string> schemes, seeds, na;
  std::vector<std::size_t> sizes;
  std::size_t trees = 500, min_node_size = 1;
  std::optional<std::size_t> mtry, max_depth;
  std::size_t top_k = 5, max_trials = 400, window = 50, folds = 10;
  double test_fraction = 0.2;
  std::string a, b, a_cell, b_cell, cell, title;
};

stabforest::RunConfig to_run_config(const Flags& f) {
  stabforest::RunConfig cfg;
  cfg.data = f.data;
  if (!f.manifest.empty()) cfg.manifest = f.manifest;
  cfg.out = f.out;
  if (!f.label.empty()) cfg.label = f.label;
  if (!f.subject.empty()) cfg.subject = f.subject;
  if (!f.na.empty()) cfg.na_tokens = f.na;
  cfg.schemes = f.schemes;
  if (!f.seeds.empty()) {
    cfg.seeds.clear();
    for (const auto& s : f.seeds) {
      const auto v = stabforest::parse_seed(s);
      if (!v) throw stabforest::Error("invalid seed '" + s + "'");
      cfg.seeds.push_back(*v);
    }
  }
  cfg.forest.n_trees = f.trees;
  cfg.forest.mtry = f.mtry;
  cfg.forest.min_node_size = f.min_node_size;
  cfg.forest.max_depth = f.max_depth;
  cfg.forest.importance_method = stabforest::parse_importance_method(f.importance);
  cfg.trials.top_k = f.top_k;
  cfg.trials.max_trials_per_subject = f.max_trials;
  cfg.trials.early_stop_window = f.window;
  cfg.validation.k = f.folds;
  cfg.validation.test_fraction = f.test_fraction;
  if (!f.sizes.empty()) cfg.sizes = f.sizes;
  if (!f.a.empty()) cfg.input_a = f.a;
  if (!f.b.empty()) cfg.input_b = f.b;
  if (!f.a_cell.empty()) cfg.cell_a = f.a_cell;
  if (!f.b_cell.empty()) cfg.cell_b = f.b_cell;
  if (!f.cell.empty()) cfg.cell = f.cell;
  cfg.title = f.title;
  cfg.workers = stabforest::default_worker_count();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-forest validation schemes and stabilized feature-importance rankings"};
  app.set_version_flag("--version", stabforest::kVersion);
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value file mirroring the long flags; flags win");

  Flags f;
  app.add_option("--data", f.data, "Input CSV (stats: raw data for the Welch table; plot: score CSV)");
  app.add_option("--manifest", f.manifest, "Dataset manifest (label, subject, na, ordinal.<col>)");
  app.add_option("--out", f.out, "Output directory")->required();
  app.add_option("--label", f.label, "Label column, overriding the manifest");
  app.add_option("--subject", f.subject, "Subject column, overriding the manifest");
  app.add_option("--na", f.na, "Missing-value tokens (default: empty, NA, ?)")->delimiter(',');
  app.add_option("--scheme,--schemes", f.schemes, "holdout, kfold, loso, loocv, trials")
      ->delimiter(',');
  app.add_option("--seed", f.seeds, "Seeds, decimal or 0x hex (default 42,43)")->delimiter(',');
  app.add_option("--trees", f.trees, "Trees per forest")->capture_default_str();
  app.add_option("--mtry", f.mtry, "Features tried per split (default floor(sqrt(p)))");
  app.add_option("--min-node-size", f.min_node_size, "Smallest node that may be split further")
      ->capture_default_str();
  app.add_option("--max-depth", f.max_depth, "Depth limit (default unlimited)");
  app.add_option("--importance", f.importance, "oob or mdi")->capture_default_str();
  app.add_option("--top-k", f.top_k, "Features per ranking")->capture_default_str();
  app.add_option("--max-trials", f.max_trials, "Trials per subject")->capture_default_str();
  app.add_option("--early-stop-window,--window", f.window, "Early-stop window in correct trials (0 disables)")
      ->capture_default_str();
  app.add_option("--k,--folds", f.folds, "k for k-fold validation")->capture_default_str();
  app.add_option("--test-fraction", f.test_fraction, "Holdout test fraction")->capture_default_str();
  app.add_option("--sizes", f.sizes, "Benchmark sample sizes")->delimiter(',');
  app.add_option("--a", f.a, "stats: first score CSV");
  app.add_option("--b", f.b, "stats: second score CSV");
  app.add_option("--a-cell", f.a_cell, "stats: cell label to read from --a");
  app.add_option("--b-cell", f.b_cell, "stats: cell label to read from --b");
  app.add_option("--cell", f.cell, "plot: cell label to draw");
  app.add_option("--title", f.title, "Plot title");

  const std::vector<std::pair<std::string, std::string>> verbs = {
      {"validate", "Run validation schemes once per seed"},
      {"trials", "Randomized-trials protocol with Borda aggregation"},
      {"compare", "Schemes x seeds with pairwise ranking agreement"},
      {"benchmark", "Wall time of each scheme at several sample sizes"},
      {"stats", "Spearman, Jaccard and Welch statistics for rankings"},
      {"plot", "Bar chart of a score CSV"}};
  for (const auto& [name, help] : verbs) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string command = app.get_subcommands().front()->get_name();
  stabforest::RunConfig cfg;
  try {
    cfg = to_run_config(f);
  } catch (const std::exception& e) {
    std::cerr << "stabforest: " << e.what() << '\n';
    stabforest::write_error_log(f.out, command, e.what(), {});
    return 1;
  }
  const int rc = stabforest::run_command(command, cfg);
  if (rc != 0)
    std::cerr << "stabforest: " << command << " failed; see "
              << (cfg.out / "error.json").string() << '\n';
  return rc;
}
