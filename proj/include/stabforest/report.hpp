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
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stabforest/dataset.hpp"
#include "stabforest/trials.hpp"
#include "stabforest/validation.hpp"

namespace stabforest {

using Json = nlohmann::ordered_json;

struct ScoredFeature {
  std::string name;
  double score = 0.0;
};

Json to_json(const ConfusionMatrix& cm);
Json to_json(const ForestConfig& cfg);
Json to_json(const DatasetProfile& profile, const Dataset& d);
/// `top_k` names the highest mean-importance features in the summary.
Json to_json(const ValidationReport& report, const std::vector<std::string>& feature_names,
             std::size_t top_k);
/// Node arrays, OOB rows, config and seed of every tree.
Json to_json(const Forest& forest);
/// Per-trial records are left out; see trials_csv.
Json to_json(const StabilityReport& report);

std::vector<std::string> feature_labels(const Ranking& ranking,
                                        const std::vector<std::string>& names);

/// Scores paired with feature names, in feature order.
std::vector<ScoredFeature> scored_features(const std::vector<double>& scores,
                                           const std::vector<std::string>& names);

/// Pretty-printed JSON with a trailing newline.
void write_json(const Json& j, const std::filesystem::path& path);
void write_text(const std::string& text, const std::filesystem::path& path);

/// One row per (master seed, subject, trial): trial seed, outcome and the
/// top-k feature names joined by ';'.
std::string trials_csv(const std::vector<StabilityReport>& reports);

/// Horizontal bars sorted by descending score (stable for ties), labelled
/// with feature names and scores. Bar length is |score| relative to the
/// largest |score|; negative scores use a second colour.
std::string render_svg_bars(std::vector<ScoredFeature> items, std::string_view title);

struct SvgPanel {
  std::string title;
  std::vector<ScoredFeature> items;
};

/// Bar panels laid out row by row, `columns` per row.
std::string render_svg_grid(const std::vector<SvgPanel>& panels, std::size_t columns,
                            std::string_view title);

}  // namespace stabforest
