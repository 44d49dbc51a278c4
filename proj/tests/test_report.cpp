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

#include <regex>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "stabforest/error.hpp"
#include "stabforest/report.hpp"
#include "stabforest/synthetic.hpp"
#include "stabforest/trials.hpp"

namespace stabforest {
namespace {

// Widths of the bar rectangles, in document order.
std::vector<double> bar_widths(const std::string& svg) {
  static const std::regex bar(R"re(<rect x="170" y="\d+" width="([0-9.]+)")re");
  std::vector<double> out;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), bar); it != std::sregex_iterator(); ++it)
    out.push_back(std::stod((*it)[1]));
  return out;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(SvgBars, SortedLongestFirst) {
  const std::vector<ScoredFeature> items{
      {"clump", 0.02}, {"size", 0.08}, {"shape", 0.05}, {"nuclei", 0.11}, {"mitoses", 0.01}};
  const std::string svg = render_svg_bars(items, "Top five");
  const auto widths = bar_widths(svg);
  ASSERT_EQ(widths.size(), 5u);
  EXPECT_DOUBLE_EQ(widths[0], 300.0);
  for (std::size_t i = 1; i < widths.size(); ++i) EXPECT_GT(widths[i - 1], widths[i]);
  EXPECT_LT(svg.find(">nuclei<"), svg.find(">size<"));
  EXPECT_LT(svg.find(">size<"), svg.find(">shape<"));
  EXPECT_LT(svg.find(">clump<"), svg.find(">mitoses<"));
  EXPECT_NE(svg.find(">Top five<"), std::string::npos);
  EXPECT_EQ(svg.rfind("</svg>\n"), svg.size() - 7);
}

TEST(SvgBars, SingleFeatureFillsTheWidth) {
  const auto widths = bar_widths(render_svg_bars({{"only", 0.3}}, "one"));
  ASSERT_EQ(widths.size(), 1u);
  EXPECT_DOUBLE_EQ(widths[0], 300.0);
}

TEST(SvgBars, DeterministicBytes) {
  const std::vector<ScoredFeature> items{{"a", 1.0}, {"b", 1.0}, {"c", 0.5}};
  EXPECT_EQ(render_svg_bars(items, "t"), render_svg_bars(items, "t"));
  // Equal scores keep their input order.
  const std::string svg = render_svg_bars(items, "t");
  EXPECT_LT(svg.find(">a<"), svg.find(">b<"));
}

TEST(SvgBars, NegativeScoresEscapingAndErrors) {
  const std::string svg = render_svg_bars({{"x<&>", 0.5}, {"y", -1.0}, {"z", 0.0}}, "\"q\"");
  EXPECT_EQ(count(svg, "#c0504d"), 1u);
  EXPECT_NE(svg.find("x&lt;&amp;&gt;"), std::string::npos);
  EXPECT_NE(svg.find("&quot;q&quot;"), std::string::npos);
  const auto widths = bar_widths(svg);
  EXPECT_EQ(widths, (std::vector<double>{150.0, 0.0, 300.0}));
  EXPECT_THROW(render_svg_bars({}, "empty"), Error);
}

TEST(SvgGrid, PanelsAndLayout) {
  std::vector<SvgPanel> panels;
  for (int i = 0; i < 5; ++i) panels.push_back({"p" + std::to_string(i), {{"f", 1.0 + i}, {"g", 0.5}}});
  const std::string svg = render_svg_grid(panels, 2, "grid");
  EXPECT_EQ(bar_widths(svg).size(), 10u);
  EXPECT_EQ(count(svg, "<g transform="), 5u);
  EXPECT_NE(svg.find("width=\"1120\""), std::string::npos);
  EXPECT_NE(svg.find("translate(560,"), std::string::npos);
  EXPECT_THROW(render_svg_grid({}, 2, "none"), Error);
}

TEST(ReportJson, ForestRoundTripsDeterministically) {
  const Dataset d =
      make_planted_dataset({.n_rows = 40, .n_informative = 2, .n_noise = 2, .signal = 2.0, .seed = 3})
          .dataset;
  ForestConfig cfg;
  cfg.n_trees = 4;
  const Json a = to_json(train_forest(d, cfg, 7));
  const Json b = to_json(train_forest(d, cfg, 7));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a["seed"], 7);
  EXPECT_EQ(a["trees"].size(), 4u);
  EXPECT_EQ(a["config"]["n_trees"], 4);
  EXPECT_EQ(a["features"].size(), 4u);
  EXPECT_NE(a.dump(), to_json(train_forest(d, cfg, 8)).dump());
}

TEST(ReportJson, HelpersAndTrialsCsv) {
  const std::vector<std::string> names{"a", "b", "c"};
  EXPECT_EQ(feature_labels({2, 0}, names), (std::vector<std::string>{"c", "a"}));
  const auto scored = scored_features({0.1, 0.2, 0.3}, names);
  ASSERT_EQ(scored.size(), 3u);
  EXPECT_EQ(scored[1].name, "b");
  EXPECT_EQ(scored[1].score, 0.2);

  StabilityReport r;
  r.master_seed = 42;
  r.feature_names = names;
  TrialRecord hit;
  hit.subject = 1;
  hit.trial = 3;
  hit.seed = 99;
  hit.correct = true;
  hit.top_features = {2, 1};
  TrialRecord miss = hit;
  miss.correct = false;
  miss.top_features.clear();
  r.records = {hit, miss};
  EXPECT_EQ(trials_csv({r}),
            "master_seed,subject,trial,seed,correct,top_features\n"
            "42,1,3,99,1,c;b\n"
            "42,1,3,99,0,\n");
}

}  // namespace
}  // namespace stabforest
