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

#include "stabforest/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stabforest/csv.hpp"
#include "stabforest/error.hpp"

namespace stabforest {

namespace {

constexpr int kPanelWidth = 560;
constexpr int kLabelWidth = 170;
constexpr int kBarArea = 300;
constexpr int kRowHeight = 20;
constexpr int kBarHeight = 14;
constexpr int kTitleHeight = 28;
constexpr int kPad = 10;

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

Json named_list(const Ranking& r, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (const auto& n : feature_labels(r, names)) out.push_back(n);
  return out;
}

int panel_height(const SvgPanel& p) {
  return kTitleHeight + static_cast<int>(p.items.size()) * kRowHeight + kPad;
}

void draw_panel(std::ostream& out, int x, int y, SvgPanel panel) {
  std::stable_sort(panel.items.begin(), panel.items.end(),
                   [](const ScoredFeature& a, const ScoredFeature& b) { return a.score > b.score; });
  double scale = 0.0;
  for (const auto& it : panel.items) scale = std::max(scale, std::fabs(it.score));
  out << "<g transform=\"translate(" << x << ',' << y << ")\">\n";
  out << "<text x=\"" << kPad << "\" y=\"18\" font-size=\"14\" font-weight=\"bold\">"
      << xml_escape(panel.title) << "</text>\n";
  int row_y = kTitleHeight;
  for (const auto& it : panel.items) {
    const double len = scale > 0.0 ? std::fabs(it.score) / scale * kBarArea : 0.0;
    out << "<text x=\"" << kLabelWidth - 6 << "\" y=\"" << row_y + 12
        << "\" font-size=\"12\" text-anchor=\"end\">" << xml_escape(it.name) << "</text>\n";
    out << "<rect x=\"" << kLabelWidth << "\" y=\"" << row_y + 1 << "\" width=\""
        << fmt("%.2f", len) << "\" height=\"" << kBarHeight << "\" fill=\""
        << (it.score < 0 ? "#c0504d" : "#4f81bd") << "\"/>\n";
    out << "<text x=\"" << fmt("%.2f", kLabelWidth + len + 4) << "\" y=\"" << row_y + 12
        << "\" font-size=\"11\">" << fmt("%.4g", it.score) << "</text>\n";
    row_y += kRowHeight;
  }
  out << "</g>\n";
}

void svg_open(std::ostream& out, int width, int height) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::vector<std::string> feature_labels(const Ranking& ranking,
                                        const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (auto f : ranking) out.push_back(names.at(f));
  return out;
}

std::vector<ScoredFeature> scored_features(const std::vector<double>& scores,
                                           const std::vector<std::string>& names) {
  if (scores.size() != names.size()) throw Error("scores and names differ in length");
  std::vector<ScoredFeature> out;
  for (std::size_t j = 0; j < scores.size(); ++j) out.push_back({names[j], scores[j]});
  return out;
}

Json to_json(const ConfusionMatrix& cm) {
  return Json{{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
}

Json to_json(const ForestConfig& cfg) {
  Json j;
  j["n_trees"] = cfg.n_trees;
  j["mtry"] = cfg.mtry ? Json(*cfg.mtry) : Json(nullptr);
  j["min_node_size"] = cfg.min_node_size;
  j["max_depth"] = cfg.max_depth ? Json(*cfg.max_depth) : Json(nullptr);
  j["importance"] = std::string(to_string(cfg.importance_method));
  return j;
}

Json to_json(const DatasetProfile& profile, const Dataset& d) {
  Json j;
  j["n_rows"] = d.n_rows;
  j["n_features"] = d.n_features;
  j["n_subjects"] = d.n_subjects;
  j["n_dropped_rows"] = profile.n_dropped_rows;
  j["n_ordinals"] = profile.n_ordinals;
  j["total_cardinality"] = profile.total_cardinality;
  j["label"] = d.label_name;
  j["classes"] = Json::array({d.label_values[0], d.label_values[1]});
  const auto counts = d.class_counts();
  j["class_counts"] = Json::array({counts[0], counts[1]});
  j["features"] = d.feature_names;
  return j;
}

Json to_json(const ValidationReport& report, const std::vector<std::string>& feature_names,
             std::size_t top_k) {
  Json j;
  j["scheme"] = std::string(to_string(report.scheme));
  j["seed"] = report.seed;
  if (report.scheme == Scheme::kKFold) j["k"] = report.k;
  if (report.scheme == Scheme::kHoldout) j["test_fraction"] = report.test_fraction;
  j["accuracy"] = report.accuracy;
  j["balanced_accuracy"] = report.balanced_accuracy;
  j["balanced_partial"] = report.balanced_partial;
  j["confusion"] = to_json(report.pooled);
  j["n_folds"] = report.per_fold.size();
  j["skipped_folds"] = report.skipped_folds;
  Json folds = Json::array();
  for (const auto& f : report.per_fold) {
    Json fj;
    fj["fold"] = f.fold_id;
    fj["seed"] = f.seed;
    fj["n_test"] = f.test_rows.size();
    fj["correct"] = f.confusion.tp + f.confusion.tn;
    fj["single_class_test"] = f.single_class_test;
    fj["skipped"] = f.skipped;
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  Json imp;
  imp["method"] = std::string(to_string(report.mean_importance.method));
  Json scores = Json::object();
  for (std::size_t f = 0; f < feature_names.size(); ++f)
    scores[feature_names[f]] = report.mean_importance.scores.at(f);
  imp["scores"] = std::move(scores);
  j["importance"] = std::move(imp);
  Json mdi = Json::object();
  for (std::size_t f = 0; f < feature_names.size(); ++f)
    mdi[feature_names[f]] = report.mean_mdi.scores.at(f);
  j["mdi_scores"] = std::move(mdi);
  j["top_features"] = named_list(top_k_features(report.mean_importance, top_k), feature_names);
  j["predictions"] = report.predictions;
  j["warnings"] = report.warnings;
  j["wall_time_ms"] = report.wall_time_ms;
  return j;
}

Json to_json(const Forest& forest) {
  Json j;
  j["seed"] = forest.seed;
  j["config"] = to_json(forest.config);
  j["features"] = forest.feature_names;
  Json trees = Json::array();
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    Json nodes = Json::array();
    for (const auto& n : forest.trees[t].nodes) {
      if (n.is_leaf()) {
        nodes.push_back(Json{{"class", n.leaf_class()}, {"counts", {n.count0, n.count1}}});
      } else {
        nodes.push_back(Json{{"feature", n.feature},
                             {"threshold", n.threshold},
                             {"left", n.left},
                             {"right", n.right},
                             {"counts", {n.count0, n.count1}}});
      }
    }
    trees.push_back(Json{{"nodes", std::move(nodes)}, {"oob", forest.oob_indices[t]}});
  }
  j["trees"] = std::move(trees);
  return j;
}

Json to_json(const StabilityReport& report) {
  const auto& names = report.feature_names;
  Json j;
  j["master_seed"] = report.master_seed;
  j["top_k"] = report.top_k;
  std::size_t run = 0, correct = 0;
  for (const auto& s : report.per_subject) {
    run += s.trials_run;
    correct += s.trials_correct;
  }
  j["trials_run"] = run;
  j["trials_correct"] = correct;
  j["trial_accuracy"] = report.trial_accuracy;
  j["majority_accuracy"] = report.majority_accuracy;
  j["stability_iteration"] =
      report.stability_iteration ? Json(*report.stability_iteration) : Json(nullptr);
  j["group_ranking"] = named_list(report.group_ranking, names);
  Json tally = Json::array();
  for (std::size_t f = 0; f < names.size(); ++f) {
    tally.push_back(Json{{"feature", names[f]},
                         {"borda", report.group_tally.borda[f]},
                         {"membership", report.group_tally.membership[f]}});
  }
  j["group_tally"] = std::move(tally);
  j["subject_ballots"] = report.group_tally.n_ballots;
  j["never_correct_subjects"] = report.never_correct_subjects;
  j["seed_collisions"] = report.seed_collisions;
  Json sets = Json::array();
  for (const auto& s : report.set_frequencies)
    sets.push_back(Json{{"features", named_list(s.features, names)}, {"count", s.count}});
  j["set_frequencies"] = std::move(sets);
  Json subjects = Json::array();
  for (const auto& s : report.per_subject) {
    subjects.push_back(Json{{"subject", s.subject},
                            {"trials_run", s.trials_run},
                            {"trials_correct", s.trials_correct},
                            {"stopped_early", s.stopped_early},
                            {"ranking", named_list(s.ranking, names)},
                            {"borda", s.tally.borda},
                            {"membership", s.tally.membership}});
  }
  j["subjects"] = std::move(subjects);
  j["wall_time_ms"] = report.wall_time_ms;
  return j;
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void write_json(const Json& j, const std::filesystem::path& path) {
  write_text(j.dump(2) + "\n", path);
}

std::string trials_csv(const std::vector<StabilityReport>& reports) {
  std::ostringstream out;
  out << "master_seed,subject,trial,seed,correct,top_features\n";
  for (const auto& report : reports) {
    for (const auto& r : report.records) {
      std::string top;
      for (std::size_t i = 0; i < r.top_features.size(); ++i) {
        if (i) top += ';';
        top += report.feature_names.at(r.top_features[i]);
      }
      out << report.master_seed << ',' << r.subject << ',' << r.trial << ',' << r.seed << ','
          << (r.correct ? 1 : 0) << ',' << csv_quote(top) << '\n';
    }
  }
  return out.str();
}

std::string render_svg_bars(std::vector<ScoredFeature> items, std::string_view title) {
  if (items.empty()) throw Error("bar chart needs at least one feature");
  SvgPanel panel{std::string(title), std::move(items)};
  std::ostringstream out;
  svg_open(out, kPanelWidth, panel_height(panel));
  draw_panel(out, 0, 0, std::move(panel));
  out << "</svg>\n";
  return out.str();
}

std::string render_svg_grid(const std::vector<SvgPanel>& panels, std::size_t columns,
                            std::string_view title) {
  if (panels.empty()) throw Error("grid needs at least one panel");
  columns = std::clamp<std::size_t>(columns, 1, panels.size());
  std::vector<int> row_heights;
  for (std::size_t i = 0; i < panels.size(); i += columns) {
    int h = 0;
    for (std::size_t c = i; c < std::min(i + columns, panels.size()); ++c)
      h = std::max(h, panel_height(panels[c]));
    row_heights.push_back(h);
  }
  int height = kTitleHeight + kPad;
  for (int h : row_heights) height += h;
  const int width = static_cast<int>(columns) * kPanelWidth;
  std::ostringstream out;
  svg_open(out, width, height);
  out << "<text x=\"" << kPad << "\" y=\"20\" font-size=\"16\" font-weight=\"bold\">"
      << xml_escape(title) << "</text>\n";
  int y = kTitleHeight + kPad;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const std::size_t row = i / columns;
    const int x = static_cast<int>(i % columns) * kPanelWidth;
    draw_panel(out, x, y, panels[i]);
    if (i % columns == columns - 1 || i + 1 == panels.size()) y += row_heights[row];
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace stabforest
