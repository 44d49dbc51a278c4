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

#include "stabforest/commands.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "stabforest/csv.hpp"
#include "stabforest/dataset.hpp"
#include "stabforest/error.hpp"
#include "stabforest/stats.hpp"

namespace stabforest {

namespace {

namespace fs = std::filesystem;
std::vector<std::string> schemes_or(const RunConfig& cfg, std::vector<std::string> fallback) {
  auto s = cfg.schemes.empty() ? std::move(fallback) : cfg.schemes;
  for (const auto& name : s)
    if (name != "trials") parse_scheme(name);
  return s;
}

LoadResult load(const RunConfig& cfg) {
  LoadOptions opts;
  if (cfg.manifest) opts = read_manifest(*cfg.manifest);
  if (cfg.label) opts.label_column = *cfg.label;
  if (cfg.subject) opts.subject_column = *cfg.subject;
  if (cfg.na_tokens) opts.na_tokens = *cfg.na_tokens;
  if (opts.label_column.empty()) opts.label_column = "label";
  return load_csv(cfg.data, opts);
}

TrialsConfig trials_config(const RunConfig& cfg, std::uint64_t seed) {
  TrialsConfig t = cfg.trials;
  t.master_seed = seed;
  t.forest = cfg.forest;
  t.workers = cfg.workers;
  return t;
}

Json header(const std::string& command) {
  Json j;
  j["tool"] = "stabforest";
  j["version"] = kVersion;
  j["command"] = command;
  j["status"] = "ok";
  return j;
}

Json dataset_json(const RunConfig& cfg, const LoadResult& loaded) {
  Json j;
  j["path"] = cfg.data.string();
  j["manifest"] = cfg.manifest ? Json(cfg.manifest->string()) : Json(nullptr);
  j.update(to_json(loaded.profile, loaded.dataset));
  return j;
}

Json config_json(const RunConfig& cfg, const std::vector<std::string>& schemes) {
  Json j;
  j["seeds"] = cfg.seeds;
  j["schemes"] = schemes;
  j["forest"] = to_json(cfg.forest);
  j["top_k"] = cfg.trials.top_k;
  j["k"] = cfg.validation.k;
  j["test_fraction"] = cfg.validation.test_fraction;
  j["max_trials"] = cfg.trials.max_trials_per_subject;
  j["early_stop_window"] = cfg.trials.early_stop_window;
  return j;
}

void check_seeds(const RunConfig& cfg) {
  if (cfg.seeds.empty()) throw Error("at least one seed is required");
}

// Validation run or trials run reduced to a comparable cell.
CellResult run_cell(const Dataset& d, const RunConfig& cfg, const std::string& scheme,
                    std::uint64_t seed, Json* detail) {
  CellResult cell;
  cell.scheme = scheme;
  cell.seed = seed;
  const std::size_t k = cfg.trials.top_k;
  if (scheme == "trials") {
    const StabilityReport rep = run_randomized_trials(d, trials_config(cfg, seed));
    cell.accuracy = rep.trial_accuracy;
    cell.scores = rep.group_tally.borda;
    cell.top = rep.group_ranking;
    cell.wall_time_ms = rep.wall_time_ms;
    if (detail) *detail = to_json(rep);
  } else {
    ValidationOptions opts = cfg.validation;
    opts.workers = cfg.workers;
    const ValidationReport rep = validate(d, cfg.forest, parse_scheme(scheme), seed, opts);
    cell.accuracy = rep.accuracy;
    cell.scores = rep.mean_importance.scores;
    cell.mdi_scores = rep.mean_mdi.scores;
    cell.top = top_k_features(rep.mean_importance, std::min(k, d.n_features));
    cell.wall_time_ms = rep.wall_time_ms;
    if (detail) *detail = to_json(rep, d.feature_names, std::min(k, d.n_features));
  }
  return cell;
}

// Group rankings carry subject "group"; trials reports add one ranking per
// subject, scored by that subject's borda tally.
std::string rankings_csv(const std::vector<CellResult>& cells, const std::vector<std::string>& names,
                         const std::vector<StabilityReport>& subject_reports = {}) {
  std::ostringstream out;
  out << "cell,scheme,seed,subject,rank,feature,score\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const CellResult& c = cells[i];
    const std::string prefix = csv_quote(c.label()) + ',' + c.scheme + ',' + std::to_string(c.seed) + ',';
    for (std::size_t r = 0; r < c.top.size(); ++r)
      out << prefix << "group," << r + 1 << ',' << csv_quote(names[c.top[r]]) << ','
          << format_double(c.scores[c.top[r]]) << '\n';
    if (i >= subject_reports.size()) continue;
    for (const auto& s : subject_reports[i].per_subject)
      for (std::size_t r = 0; r < s.ranking.size(); ++r)
        out << prefix << s.subject << ',' << r + 1 << ',' << csv_quote(names[s.ranking[r]]) << ','
            << format_double(s.tally.borda[s.ranking[r]]) << '\n';
  }
  return out.str();
}

std::string scores_csv(const std::vector<CellResult>& cells,
                       const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "cell,scheme,seed,feature,score\n";
  for (const auto& c : cells)
    for (std::size_t f = 0; f < names.size(); ++f)
      out << csv_quote(c.label()) << ',' << c.scheme << ',' << c.seed << ','
          << csv_quote(names[f]) << ',' << format_double(c.scores[f]) << '\n';
  return out.str();
}

std::string tally_csv(const std::vector<StabilityReport>& reports) {
  std::ostringstream out;
  out << "cell,seed,feature,borda,membership\n";
  for (const auto& r : reports)
    for (std::size_t f = 0; f < r.feature_names.size(); ++f)
      out << "trials/" << r.master_seed << ',' << r.master_seed << ','
          << csv_quote(r.feature_names[f]) << ',' << format_double(r.group_tally.borda[f]) << ','
          << r.group_tally.membership[f] << '\n';
  return out.str();
}

Json pair_json(const std::vector<CellResult>& cells, std::size_t i, std::size_t j) {
  const Agreement a = compare_cells(cells[i], cells[j]);
  Json p;
  p["a"] = cells[i].label();
  p["b"] = cells[j].label();
  p["same_scheme"] = cells[i].scheme == cells[j].scheme;
  p["jaccard"] = a.jaccard;
  p["spearman"] = a.spearman ? Json(*a.spearman) : Json(nullptr);
  return p;
}

Json pairs_json(const std::vector<CellResult>& cells) {
  Json pairs = Json::array();
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j) pairs.push_back(pair_json(cells, i, j));
  return pairs;
}

std::string svg_name(const std::string& prefix, const CellResult& c) {
  return prefix + "_" + c.scheme + "_" + std::to_string(c.seed) + ".svg";
}

struct ScoreFile {
  std::string cell;
  std::vector<ScoredFeature> items;
};

// Reads a score CSV written by this tool (importance.csv, rankings.csv or
// tally.csv) or any CSV with `feature` and `score` or `borda` columns. Only
// group rows of a rankings file are used.
ScoreFile read_scores(const fs::path& path, const std::optional<std::string>& cell) {
  const CsvTable t = read_csv_table(path);
  const std::size_t fcol = t.column("feature");
  auto scol = t.find_column("score");
  if (!scol) scol = t.find_column("borda");
  if (!scol) throw Error(path.string() + " has neither a score nor a borda column");
  const auto ccol = t.find_column("cell");
  const auto subject_col = t.find_column("subject");
  auto wanted = [&](const std::vector<std::string>& row) {
    return !subject_col || row[*subject_col] == "group";
  };
  ScoreFile out;
  if (ccol) {
    std::set<std::string> cells;
    for (const auto& row : t.rows)
      if (wanted(row)) cells.insert(row[*ccol]);
    if (cell) {
      if (!cells.count(*cell)) throw Error(path.string() + " has no cell '" + *cell + "'");
      out.cell = *cell;
    } else if (cells.size() == 1) {
      out.cell = *cells.begin();
    } else if (!cells.empty()) {
      throw Error(path.string() + " holds several cells; choose one");
    }
  } else if (cell) {
    throw Error(path.string() + " has no cell column");
  }
  std::set<std::string> seen;
  for (const auto& row : t.rows) {
    if (!wanted(row) || (ccol && row[*ccol] != out.cell)) continue;
    const auto v = parse_double(row[*scol]);
    if (!v) throw Error(path.string() + ": bad score '" + row[*scol] + "'");
    if (!seen.insert(row[fcol]).second)
      throw Error(path.string() + ": feature '" + row[fcol] + "' listed twice");
    out.items.push_back({row[fcol], *v});
  }
  if (out.items.empty()) throw Error(path.string() + " has no scores");
  return out;
}

std::vector<std::string> top_names(std::vector<ScoredFeature> items, std::size_t k) {
  std::stable_sort(items.begin(), items.end(),
                   [](const ScoredFeature& a, const ScoredFeature& b) { return a.score > b.score; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, items.size()); ++i) out.push_back(items[i].name);
  return out;
}

void prepare_out(const RunConfig& cfg) {
  if (cfg.out.empty()) throw Error("--out is required");
  fs::create_directories(cfg.out);
}

}  // namespace

Agreement compare_cells(const CellResult& a, const CellResult& b) {
  Agreement out;
  out.jaccard = set_jaccard(a.top, b.top);
  try {
    out.spearman = spearman_rho(a.scores, b.scores);
  } catch (const Error&) {
    out.spearman.reset();
  }
  return out;
}

Json mask_timing(Json j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "wall_time_ms") {
        it.value() = nullptr;
      } else {
        it.value() = mask_timing(std::move(it.value()));
      }
    }
  } else if (j.is_array()) {
    for (auto& v : j) v = mask_timing(std::move(v));
  }
  return j;
}

Json cmd_validate(const RunConfig& cfg, Progress& progress) {
  check_seeds(cfg);
  const auto schemes = schemes_or(cfg, {"kfold"});
  const LoadResult loaded = load(cfg);
  const Dataset& d = loaded.dataset;
  Json report = header("validate");
  report["dataset"] = dataset_json(cfg, loaded);
  report["config"] = config_json(cfg, schemes);
  Json runs = Json::array();
  std::vector<CellResult> cells;
  for (const auto& scheme : schemes) {
    if (scheme == "trials") throw Error("use the trials subcommand for the trials protocol");
    for (auto seed : cfg.seeds) {
      CellResult c;
      c.scheme = scheme;
      c.seed = seed;
      progress.current = c.label();
      Json detail;
      cells.push_back(run_cell(d, cfg, scheme, seed, &detail));
      runs.push_back(std::move(detail));
      progress.completed.push_back(progress.current);
    }
  }
  report["runs"] = std::move(runs);

  prepare_out(cfg);
  write_text(rankings_csv(cells, d.feature_names), cfg.out / "rankings.csv");
  write_text(scores_csv(cells, d.feature_names), cfg.out / "importance.csv");
  for (const auto& c : cells)
    write_text(render_svg_bars(scored_features(c.scores, d.feature_names),
                               "Feature importance, " + c.label()),
               cfg.out / svg_name("importance", c));
  return report;
}

Json cmd_trials(const RunConfig& cfg, Progress& progress) {
  check_seeds(cfg);
  const LoadResult loaded = load(cfg);
  const Dataset& d = loaded.dataset;
  Json report = header("trials");
  report["dataset"] = dataset_json(cfg, loaded);
  report["config"] = config_json(cfg, {"trials"});
  std::vector<StabilityReport> reps;
  std::vector<CellResult> cells;
  Json runs = Json::array();
  for (auto seed : cfg.seeds) {
    progress.current = "trials/" + std::to_string(seed);
    reps.push_back(run_randomized_trials(d, trials_config(cfg, seed)));
    const auto& rep = reps.back();
    runs.push_back(to_json(rep));
    cells.push_back({"trials", seed, rep.trial_accuracy, rep.group_tally.borda, {},
                     rep.group_ranking, rep.wall_time_ms});
    progress.completed.push_back(progress.current);
  }
  report["runs"] = std::move(runs);
  report["agreement"] = pairs_json(cells);

  prepare_out(cfg);
  write_text(rankings_csv(cells, d.feature_names, reps), cfg.out / "rankings.csv");
  write_text(tally_csv(reps), cfg.out / "tally.csv");
  write_text(trials_csv(reps), cfg.out / "trials.csv");
  for (const auto& c : cells)
    write_text(render_svg_bars(scored_features(c.scores, d.feature_names),
                               "Borda tally, " + c.label()),
               cfg.out / svg_name("tally", c));
  return report;
}

Json cmd_compare(const RunConfig& cfg, Progress& progress) {
  check_seeds(cfg);
  const auto schemes = schemes_or(cfg, {"holdout", "kfold", "loso"});
  const LoadResult loaded = load(cfg);
  const Dataset& d = loaded.dataset;
  Json report = header("compare");
  report["dataset"] = dataset_json(cfg, loaded);
  report["config"] = config_json(cfg, schemes);
  std::vector<CellResult> cells;
  Json cj = Json::array();
  for (const auto& scheme : schemes) {
    for (auto seed : cfg.seeds) {
      progress.current = scheme + "/" + std::to_string(seed);
      cells.push_back(run_cell(d, cfg, scheme, seed, nullptr));
      const auto& c = cells.back();
      Json j;
      j["cell"] = c.label();
      j["scheme"] = c.scheme;
      j["seed"] = c.seed;
      j["accuracy"] = c.accuracy;
      j["score_kind"] = c.scheme == "trials" ? "borda" : "importance";
      j["top_features"] = feature_labels(c.top, d.feature_names);
      Json scores = Json::object();
      for (std::size_t f = 0; f < d.n_features; ++f) scores[d.feature_names[f]] = c.scores[f];
      j["scores"] = std::move(scores);
      if (!c.mdi_scores.empty()) {
        Json mdi = Json::object();
        for (std::size_t f = 0; f < d.n_features; ++f) mdi[d.feature_names[f]] = c.mdi_scores[f];
        j["mdi_scores"] = std::move(mdi);
      }
      j["wall_time_ms"] = c.wall_time_ms;
      cj.push_back(std::move(j));
      progress.completed.push_back(progress.current);
    }
  }
  report["cells"] = std::move(cj);
  report["pairs"] = pairs_json(cells);

  prepare_out(cfg);
  write_text(rankings_csv(cells, d.feature_names), cfg.out / "rankings.csv");
  write_text(scores_csv(cells, d.feature_names), cfg.out / "importance.csv");
  std::vector<SvgPanel> panels;
  for (const auto& c : cells) {
    std::vector<ScoredFeature> top;
    for (auto f : c.top) top.push_back({d.feature_names[f], c.scores[f]});
    panels.push_back({c.label(), std::move(top)});
  }
  write_text(render_svg_grid(panels, cfg.seeds.size(),
                             cfg.title.empty() ? "Top features by scheme and seed" : cfg.title),
             cfg.out / "compare.svg");
  return report;
}

Json cmd_benchmark(const RunConfig& cfg, Progress& progress) {
  check_seeds(cfg);
  const auto schemes = schemes_or(cfg, {"trials", "loso", "kfold", "holdout"});
  const LoadResult loaded = load(cfg);
  const Dataset& full = loaded.dataset;
  std::vector<std::size_t> sizes = cfg.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  if (sizes.empty()) throw Error("benchmark needs at least one sample size");
  if (sizes.back() > full.n_rows) throw Error("sample size exceeds the dataset rows");
  const std::uint64_t seed = cfg.seeds.front();
  const std::string name = cfg.data.stem().string();
  const std::size_t multiplier = cfg.trials.max_trials_per_subject;
  const std::string estimate = "loso_x" + std::to_string(multiplier);

  std::vector<BenchmarkRow> rows;
  for (auto n : sizes) {
    const Dataset d = subsample(full, n, seed);
    for (const auto& scheme : schemes) {
      progress.current = scheme + "/n=" + std::to_string(n);
      const CellResult c = run_cell(d, cfg, scheme, seed, nullptr);
      rows.push_back({name, n, scheme, c.wall_time_ms, c.accuracy});
      if (scheme == "loso")
        rows.push_back({name, n, estimate, c.wall_time_ms * static_cast<double>(multiplier),
                        c.accuracy});
      progress.completed.push_back(progress.current);
    }
  }

  Json report = header("benchmark");
  report["dataset"] = dataset_json(cfg, loaded);
  report["config"] = config_json(cfg, schemes);
  report["config"]["sizes"] = sizes;
  Json jr = Json::array();
  for (const auto& r : rows)
    jr.push_back(Json{{"dataset", r.dataset},
                      {"sample_size", r.sample_size},
                      {"scheme", r.scheme},
                      {"wall_time_ms", r.wall_time_ms},
                      {"accuracy", r.accuracy}});
  report["rows"] = std::move(jr);

  std::ostringstream csv;
  csv << "dataset,sample_size,scheme,wall_time_ms,accuracy\n";
  for (const auto& r : rows)
    csv << csv_quote(r.dataset) << ',' << r.sample_size << ',' << r.scheme << ','
        << format_double(r.wall_time_ms) << ',' << format_double(r.accuracy) << '\n';
  // Wide layout: one line per sample size, one time column per scheme.
  std::vector<std::string> columns;
  for (const auto& r : rows)
    if (std::find(columns.begin(), columns.end(), r.scheme) == columns.end())
      columns.push_back(r.scheme);
  std::ostringstream wide;
  wide << "dataset,sample_size";
  for (const auto& c : columns) wide << ',' << c << "_ms";
  wide << '\n';
  for (auto n : sizes) {
    wide << csv_quote(name) << ',' << n;
    for (const auto& c : columns)
      for (const auto& r : rows)
        if (r.sample_size == n && r.scheme == c) wide << ',' << format_double(r.wall_time_ms);
    wide << '\n';
  }
  prepare_out(cfg);
  write_text(csv.str(), cfg.out / "benchmark.csv");
  write_text(wide.str(), cfg.out / "benchmark_table.csv");
  return report;
}

Json cmd_stats(const RunConfig& cfg, Progress& progress) {
  if (!cfg.input_a || !cfg.input_b) throw Error("stats needs two score files (--a and --b)");
  progress.current = "agreement";
  const ScoreFile a = read_scores(*cfg.input_a, cfg.cell_a);
  const ScoreFile b = read_scores(*cfg.input_b, cfg.cell_b);
  const std::size_t k = cfg.trials.top_k;

  // Features missing from one file rank below everything present in it.
  std::vector<std::string> names;
  for (const auto& it : a.items) names.push_back(it.name);
  for (const auto& it : b.items)
    if (std::find(names.begin(), names.end(), it.name) == names.end()) names.push_back(it.name);
  auto vector_for = [&](const ScoreFile& f) {
    double floor = 0.0;
    for (const auto& it : f.items) floor = std::min(floor, it.score);
    std::vector<double> v(names.size(), floor - 1.0);
    for (const auto& it : f.items)
      v[std::find(names.begin(), names.end(), it.name) - names.begin()] = it.score;
    return v;
  };
  const auto va = vector_for(a), vb = vector_for(b);
  const auto top_a = top_names(a.items, k), top_b = top_names(b.items, k);
  std::vector<std::size_t> ia, ib;
  for (const auto& n : top_a) ia.push_back(std::find(names.begin(), names.end(), n) - names.begin());
  for (const auto& n : top_b) ib.push_back(std::find(names.begin(), names.end(), n) - names.begin());

  Json report = header("stats");
  report["a"] = Json{{"path", cfg.input_a->string()}, {"cell", a.cell}, {"top", top_a}};
  report["b"] = Json{{"path", cfg.input_b->string()}, {"cell", b.cell}, {"top", top_b}};
  report["top_k"] = k;
  report["features_compared"] = names.size();
  report["jaccard_top_k"] = set_jaccard(ia, ib);
  try {
    report["spearman_rho"] = spearman_rho(va, vb);
  } catch (const Error&) {
    report["spearman_rho"] = nullptr;
  }
  progress.completed.push_back(progress.current);

  std::ostringstream table;
  if (!cfg.data.empty()) {
    progress.current = "welch";
    const LoadResult loaded = load(cfg);
    const Dataset& d = loaded.dataset;
    report["dataset"] = dataset_json(cfg, loaded);
    std::vector<double> labels(d.n_rows);
    for (std::size_t r = 0; r < d.n_rows; ++r) labels[r] = d.labels[r];
    table << "feature,mean_" << d.label_values[0] << ",mean_" << d.label_values[1]
          << ",t,df,p_two_sided,spearman_with_label\n";
    Json rows = Json::array();
    for (std::size_t f = 0; f < d.n_features; ++f) {
      std::vector<double> g0, g1, col(d.n_rows);
      for (std::size_t r = 0; r < d.n_rows; ++r) {
        col[r] = d.at(r, f);
        (d.labels[r] ? g1 : g0).push_back(col[r]);
      }
      Json row;
      row["feature"] = d.feature_names[f];
      row["mean_0"] = std::accumulate(g0.begin(), g0.end(), 0.0) / static_cast<double>(g0.size());
      row["mean_1"] = std::accumulate(g1.begin(), g1.end(), 0.0) / static_cast<double>(g1.size());
      std::string t = "", df = "", p = "", rho = "";
      try {
        const WelchResult w = welch_t(g0, g1);
        row["t"] = w.t;
        row["df"] = w.df;
        row["p_two_sided"] = w.p_two_sided;
        t = format_double(w.t);
        df = format_double(w.df);
        p = format_double(w.p_two_sided);
      } catch (const Error& e) {
        row["t"] = row["df"] = row["p_two_sided"] = nullptr;
        row["note"] = e.what();
      }
      try {
        const double r = spearman_rho(col, labels);
        row["spearman_with_label"] = r;
        rho = format_double(r);
      } catch (const Error&) {
        row["spearman_with_label"] = nullptr;
      }
      table << csv_quote(d.feature_names[f]) << ',' << format_double(row["mean_0"].get<double>())
            << ',' << format_double(row["mean_1"].get<double>()) << ',' << t << ',' << df << ','
            << p << ',' << rho << '\n';
      rows.push_back(std::move(row));
    }
    report["welch"] = std::move(rows);
    progress.completed.push_back(progress.current);
  }
  prepare_out(cfg);
  if (!cfg.data.empty()) write_text(table.str(), cfg.out / "welch.csv");
  return report;
}

Json cmd_plot(const RunConfig& cfg, Progress& progress) {
  if (cfg.data.empty()) throw Error("plot needs a score CSV (--data)");
  progress.current = "plot";
  const ScoreFile f = read_scores(cfg.data, cfg.cell);
  std::string title = cfg.title;
  if (title.empty()) title = f.cell.empty() ? cfg.data.stem().string() : f.cell;
  const std::string svg = render_svg_bars(f.items, title);
  Json report = header("plot");
  report["input"] = cfg.data.string();
  report["cell"] = f.cell;
  report["features"] = f.items.size();
  report["svg"] = "plot.svg";
  prepare_out(cfg);
  write_text(svg, cfg.out / "plot.svg");
  progress.completed.push_back(progress.current);
  return report;
}

void write_error_log(const std::filesystem::path& out, const std::string& command,
                     const std::string& message, const Progress& progress) {
  Json err;
  err["tool"] = "stabforest";
  err["version"] = kVersion;
  err["command"] = command;
  err["status"] = "error";
  err["message"] = message;
  err["failed_cell"] = progress.current.empty() ? Json(nullptr) : Json(progress.current);
  err["completed_cells"] = progress.completed;
  if (out.empty()) return;
  try {
    fs::create_directories(out);
    write_json(err, out / "error.json");
  } catch (const std::exception&) {
  }
}

int run_command(const std::string& name, const RunConfig& cfg) {
  Progress progress;
  try {
    Json report;
    if (name == "validate") {
      report = cmd_validate(cfg, progress);
    } else if (name == "trials") {
      report = cmd_trials(cfg, progress);
    } else if (name == "compare") {
      report = cmd_compare(cfg, progress);
    } else if (name == "benchmark") {
      report = cmd_benchmark(cfg, progress);
    } else if (name == "stats") {
      report = cmd_stats(cfg, progress);
    } else if (name == "plot") {
      report = cmd_plot(cfg, progress);
    } else {
      throw Error("unknown subcommand '" + name + "'");
    }
    write_json(report, cfg.out / "report.json");
    std::error_code ec;
    fs::remove(cfg.out / "error.json", ec);
    return 0;
  } catch (const std::exception& e) {
    if (!cfg.out.empty()) {
      std::error_code ec;
      fs::remove(cfg.out / "report.json", ec);
    }
    write_error_log(cfg.out, name, e.what(), progress);
    return 1;
  }
}

}  // namespace stabforest
