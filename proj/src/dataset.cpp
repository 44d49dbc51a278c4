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

#include "stabforest/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "stabforest/csv.hpp"
#include "stabforest/error.hpp"
#include "stabforest/rng.hpp"

namespace stabforest {

std::array<std::size_t, 2> Dataset::class_counts() const {
  std::array<std::size_t, 2> counts{0, 0};
  for (auto y : labels) ++counts[y];
  return counts;
}

bool Dataset::has_both_classes() const {
  const auto c = class_counts();
  return c[0] > 0 && c[1] > 0;
}

std::vector<std::size_t> Dataset::rows_of_subject(std::size_t subject) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < n_rows; ++r)
    if (subject_ids[r] == subject) rows.push_back(r);
  return rows;
}

Dataset make_dataset(std::vector<double> features, std::vector<std::uint8_t> labels,
                     std::vector<std::string> feature_names,
                     std::vector<std::size_t> subject_ids, bool require_loadable) {
  Dataset d;
  d.n_rows = labels.size();
  d.n_features = feature_names.size();
  if (features.size() != d.n_rows * d.n_features)
    throw Error("feature matrix size does not match rows x features");
  for (auto y : labels)
    if (y > 1) throw Error("labels must be 0 or 1");
  std::set<std::string> names(feature_names.begin(), feature_names.end());
  if (names.size() != feature_names.size()) throw Error("duplicate feature names");
  for (double v : features)
    if (!std::isfinite(v)) throw Error("feature values must be finite");
  if (subject_ids.empty()) {
    subject_ids.resize(d.n_rows);
    for (std::size_t r = 0; r < d.n_rows; ++r) subject_ids[r] = r;
  }
  if (subject_ids.size() != d.n_rows) throw Error("subject_ids size does not match rows");
  std::size_t n_subjects = 0;
  for (auto s : subject_ids) n_subjects = std::max(n_subjects, s + 1);
  std::vector<bool> seen(n_subjects, false);
  for (auto s : subject_ids) seen[s] = true;
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw Error("every subject index must own at least one row");

  d.features = std::move(features);
  d.labels = std::move(labels);
  d.feature_names = std::move(feature_names);
  d.subject_ids = std::move(subject_ids);
  d.n_subjects = n_subjects;
  if (require_loadable) {
    if (d.n_rows == 0) throw Error("dataset is empty");
    if (d.n_features < 2) throw Error("dataset needs at least 2 features");
    if (!d.has_both_classes()) throw Error("dataset needs both classes");
  }
  return d;
}

LoadResult load_csv(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open CSV file: " + path.string());
  return parse_csv(in, options);
}

LoadResult parse_csv(std::istream& in, const LoadOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw Error("CSV has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_record(line);
  const std::size_t n_cols = header.size();

  auto find_column = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto label_col = find_column(options.label_column);
  if (!label_col) throw Error("missing label column '" + options.label_column + "'");
  std::optional<std::size_t> subject_col;
  if (options.subject_column) {
    subject_col = find_column(*options.subject_column);
    if (!subject_col) throw Error("missing subject column '" + *options.subject_column + "'");
  }
  for (const auto& [name, cats] : options.ordinal_spec) {
    if (!find_column(name)) throw Error("ordinal column '" + name + "' not in header");
    if (cats.empty()) throw Error("ordinal column '" + name + "' has no categories");
  }

  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < n_cols; ++c) {
    if (c == *label_col || (subject_col && c == *subject_col)) continue;
    feature_cols.push_back(c);
    feature_names.push_back(header[c]);
  }
  {
    std::set<std::string> uniq(feature_names.begin(), feature_names.end());
    if (uniq.size() != feature_names.size()) throw Error("duplicate feature names in header");
  }

  const std::set<std::string> na(options.na_tokens.begin(), options.na_tokens.end());
  std::vector<std::vector<std::string>> rows;
  // Label classes come from every row with a label, dropped or not, so
  // the class mapping does not depend on which rows are complete.
  std::set<std::string> label_set;
  std::size_t dropped = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_record(line);
    if (fields.size() != n_cols)
      throw Error("CSV line " + std::to_string(line_no) + " has " +
                  std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(n_cols));
    if (!na.count(fields[*label_col])) label_set.insert(fields[*label_col]);
    const bool complete = std::none_of(fields.begin(), fields.end(),
                                       [&](const std::string& f) { return na.count(f) > 0; });
    if (!complete) {
      ++dropped;
      continue;
    }
    rows.push_back(std::move(fields));
  }
  if (label_set.size() != 2) throw Error("label not binary");
  if (rows.empty()) throw Error("dataset is empty after dropping incomplete rows");
  if (feature_cols.size() < 2) throw Error("dataset needs at least 2 features");

  const std::size_t n = rows.size();
  const std::size_t p = feature_cols.size();
  std::vector<double> features(n * p);
  DatasetProfile profile;
  for (std::size_t j = 0; j < p; ++j) {
    const std::size_t c = feature_cols[j];
    const auto ord = options.ordinal_spec.find(header[c]);
    if (ord != options.ordinal_spec.end()) {
      std::unordered_map<std::string, double> code;
      for (std::size_t k = 0; k < ord->second.size(); ++k)
        code.emplace(ord->second[k], static_cast<double>(k));
      std::set<std::string> used;
      for (std::size_t r = 0; r < n; ++r) {
        const auto it = code.find(rows[r][c]);
        if (it == code.end())
          throw Error("value '" + rows[r][c] + "' not listed for ordinal column '" +
                      header[c] + "'");
        features[r * p + j] = it->second;
        used.insert(rows[r][c]);
      }
      ++profile.n_ordinals;
      profile.total_cardinality += used.size();
      continue;
    }
    bool numeric = true;
    for (std::size_t r = 0; r < n && numeric; ++r) {
      if (auto v = parse_double(rows[r][c])) {
        features[r * p + j] = *v;
      } else {
        numeric = false;
      }
    }
    if (numeric) continue;
    // Categorical: lexicographic integer codes.
    std::set<std::string> cats;
    for (const auto& r : rows) cats.insert(r[c]);
    std::unordered_map<std::string, double> code;
    double k = 0.0;
    for (const auto& cat : cats) code.emplace(cat, k++);
    for (std::size_t r = 0; r < n; ++r) features[r * p + j] = code.at(rows[r][c]);
    profile.total_cardinality += cats.size();
  }

  std::vector<std::uint8_t> labels(n);
  const std::string& class1 = *label_set.rbegin();
  for (std::size_t r = 0; r < n; ++r) labels[r] = rows[r][*label_col] == class1 ? 1 : 0;

  std::vector<std::size_t> subjects;
  if (subject_col) {
    std::unordered_map<std::string, std::size_t> ids;
    subjects.reserve(n);
    for (const auto& r : rows) subjects.push_back(ids.emplace(r[*subject_col], ids.size()).first->second);
  }

  LoadResult result;
  // Both classes may not survive the drop; training code checks that.
  result.dataset = make_dataset(std::move(features), std::move(labels), std::move(feature_names),
                                std::move(subjects), false);
  result.dataset.label_name = header[*label_col];
  result.dataset.label_values = {*label_set.begin(), class1};
  profile.n_rows = n;
  profile.n_features = p;
  profile.n_dropped_rows = dropped;
  result.profile = profile;
  return result;
}

LoadOptions read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest: " + path.string());
  return parse_manifest(in);
}

LoadOptions parse_manifest(std::istream& in) {
  LoadOptions opts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body[0] == '#' || body[0] == ';') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error("manifest line " + std::to_string(line_no) + " is not key = value");
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    if (key == "label") {
      opts.label_column = value;
    } else if (key == "subject") {
      if (!value.empty()) opts.subject_column = value;
    } else if (key == "na") {
      opts.na_tokens = split_list(value);
    } else if (key.rfind("ordinal.", 0) == 0) {
      opts.ordinal_spec[key.substr(8)] = split_list(value);
    } else {
      throw Error("unknown manifest key '" + key + "'");
    }
  }
  return opts;
}

void write_csv(const Dataset& d, std::ostream& out) {
  bool row_subjects = d.n_subjects == d.n_rows;
  for (std::size_t r = 0; r < d.n_rows && row_subjects; ++r) row_subjects = d.subject_ids[r] == r;
  for (const auto& name : d.feature_names) out << csv_quote(name) << ',';
  if (!row_subjects) out << "subject,";
  out << csv_quote(d.label_name) << '\n';
  for (std::size_t r = 0; r < d.n_rows; ++r) {
    for (std::size_t j = 0; j < d.n_features; ++j) out << format_double(d.at(r, j)) << ',';
    if (!row_subjects) out << d.subject_ids[r] << ',';
    out << csv_quote(d.label_values[d.labels[r]]) << '\n';
  }
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write CSV file: " + path.string());
  write_csv(d, out);
}

Dataset select_rows(const Dataset& d, std::span<const std::size_t> rows) {
  Dataset out;
  out.n_rows = rows.size();
  out.n_features = d.n_features;
  out.feature_names = d.feature_names;
  out.label_name = d.label_name;
  out.label_values = d.label_values;
  out.features.reserve(rows.size() * d.n_features);
  out.labels.reserve(rows.size());
  out.subject_ids.reserve(rows.size());
  std::unordered_map<std::size_t, std::size_t> remap;
  for (auto r : rows) {
    if (r >= d.n_rows) throw Error("row index out of range");
    const auto src = d.row(r);
    out.features.insert(out.features.end(), src.begin(), src.end());
    out.labels.push_back(d.labels[r]);
    out.subject_ids.push_back(remap.emplace(d.subject_ids[r], remap.size()).first->second);
  }
  out.n_subjects = remap.size();
  return out;
}

TrainTestSplit split_train_test(const Dataset& d, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error("fraction out of range");
  if (!d.has_both_classes()) throw Error("split needs both classes present");
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(d.n_rows)));
  if (n_test == 0 || n_test >= d.n_rows) throw Error("fraction out of range for dataset size");
  const auto perm = shuffle(d.n_rows, seed);
  TrainTestSplit s;
  s.test_rows.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train_rows.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(s.test_rows.begin(), s.test_rows.end());
  std::sort(s.train_rows.begin(), s.train_rows.end());
  s.train = select_rows(d, s.train_rows);
  s.test = select_rows(d, s.test_rows);
  s.test_single_class = !s.test.has_both_classes();
  return s;
}

SubjectSplit subject_partition(const Dataset& d, std::size_t subject) {
  if (subject >= d.n_subjects) throw Error("subject index out of range");
  SubjectSplit s;
  for (std::size_t r = 0; r < d.n_rows; ++r)
    (d.subject_ids[r] == subject ? s.holdout_rows : s.train_rows).push_back(r);
  s.train = select_rows(d, s.train_rows);
  if (!s.train.has_both_classes()) throw Error("degenerate LOSO fold");
  s.holdout = select_rows(d, s.holdout_rows);
  return s;
}

Dataset subsample(const Dataset& d, std::size_t n, std::uint64_t seed) {
  if (n > d.n_rows) throw Error("subsample size exceeds dataset rows");
  auto perm = shuffle(d.n_rows, seed);
  perm.resize(n);
  return select_rows(d, perm);
}

}  // namespace stabforest
