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

#include "stabforest/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stabforest/error.hpp"
#include "stabforest/rng.hpp"

namespace stabforest {

namespace {

using Wide = __int128;

// Rank codes of every feature: code[j * n + r] indexes values[j], the sorted
// distinct values of column j.
struct ColumnCodes {
  std::size_t n_rows = 0;
  std::vector<std::uint32_t> code;
  std::vector<std::vector<double>> values;

  explicit ColumnCodes(const Dataset& d) : n_rows(d.n_rows), code(d.n_rows * d.n_features) {
    values.resize(d.n_features);
    std::vector<std::pair<double, std::uint32_t>> col(d.n_rows);
    for (std::size_t j = 0; j < d.n_features; ++j) {
      for (std::size_t r = 0; r < d.n_rows; ++r) col[r] = {d.at(r, j), static_cast<std::uint32_t>(r)};
      std::sort(col.begin(), col.end());
      auto& vals = values[j];
      for (const auto& [v, r] : col) {
        if (vals.empty() || vals.back() != v) vals.push_back(v);
        code[j * n_rows + r] = static_cast<std::uint32_t>(vals.size() - 1);
      }
    }
  }
  const std::uint32_t* column(std::size_t j) const { return code.data() + j * n_rows; }
};

struct Bin {
  std::uint32_t code;
  std::uint64_t w0;
  std::uint64_t w1;
};

struct Candidate {
  bool found = false;
  std::int32_t feature = -1;
  std::uint32_t split_code = 0;
  std::uint32_t next_code = 0;
  std::uint64_t left0 = 0;
  std::uint64_t left1 = 0;
  // Split score (L0^2 + L1^2)/nL + (R0^2 + R1^2)/nR as an exact fraction;
  // larger is better and equivalent to a larger Gini decrease.
  Wide num = 0;
  Wide den = 1;
};

bool better(Wide num_a, Wide den_a, Wide num_b, Wide den_b) {
  return num_a * den_b > num_b * den_a;
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& d, const ColumnCodes& codes, const ForestConfig& cfg, std::size_t mtry)
      : d_(d), codes_(codes), cfg_(cfg), mtry_(mtry), weight_(d.n_rows), packed_(d.n_rows) {
    std::size_t max_distinct = 0;
    for (const auto& v : codes.values) max_distinct = std::max(max_distinct, v.size());
    hist_.assign(2 * max_distinct, 0);
    feats_.resize(d.n_features);
  }

  Tree grow(RngState& rng, std::vector<std::uint32_t>& oob) {
    const std::size_t n = d_.n_rows;
    std::fill(weight_.begin(), weight_.end(), 0u);
    for (std::size_t i = 0; i < n; ++i) ++weight_[rng.below(n)];
    idx_.clear();
    oob.clear();
    for (std::size_t r = 0; r < n; ++r) {
      (weight_[r] > 0 ? idx_ : oob).push_back(static_cast<std::uint32_t>(r));
      packed_[r] = weight_[r] << 1 | d_.labels[r];
    }
    tmp_.resize(idx_.size());

    Tree tree;
    std::uint64_t c0 = 0, c1 = 0;
    for (auto r : idx_) (d_.labels[r] ? c1 : c0) += weight_[r];
    tree.nodes.push_back(make_node(c0, c1));

    struct Task {
      std::int32_t node;
      std::uint32_t begin, end;
      std::size_t depth;
    };
    std::vector<Task> stack{{0, 0, static_cast<std::uint32_t>(idx_.size()), 0}};
    while (!stack.empty()) {
      const Task task = stack.back();
      stack.pop_back();
      const auto counts = std::pair{std::uint64_t{tree.nodes[task.node].count0},
                                    std::uint64_t{tree.nodes[task.node].count1}};
      const std::uint64_t total = counts.first + counts.second;
      if (counts.first == 0 || counts.second == 0) continue;
      if (cfg_.max_depth && task.depth >= *cfg_.max_depth) continue;
      if (total < 2 * cfg_.min_node_size) continue;

      const Candidate best = find_split(task.begin, task.end, counts.first, counts.second, rng);
      if (!best.found) continue;

      const auto& vals = codes_.values[static_cast<std::size_t>(best.feature)];
      const double lo = vals[best.split_code];
      const double hi = vals[best.next_code];
      double threshold = lo + (hi - lo) / 2.0;
      if (!(threshold >= lo && threshold < hi)) threshold = lo;

      const std::uint32_t mid = partition(task.begin, task.end, best);
      const auto left = static_cast<std::int32_t>(tree.nodes.size());
      tree.nodes.push_back(make_node(best.left0, best.left1));
      tree.nodes.push_back(make_node(counts.first - best.left0, counts.second - best.left1));
      TreeNode& node = tree.nodes[task.node];
      node.feature = best.feature;
      node.threshold = threshold;
      node.left = left;
      node.right = left + 1;
      stack.push_back({left + 1, mid, task.end, task.depth + 1});
      stack.push_back({left, task.begin, mid, task.depth + 1});
    }
    return tree;
  }

 private:
  static TreeNode make_node(std::uint64_t c0, std::uint64_t c1) {
    TreeNode node;
    node.count0 = static_cast<std::uint32_t>(c0);
    node.count1 = static_cast<std::uint32_t>(c1);
    return node;
  }

  Candidate find_split(std::uint32_t begin, std::uint32_t end, std::uint64_t p0, std::uint64_t p1,
                       RngState& rng) {
    const std::size_t p = d_.n_features;
    std::iota(feats_.begin(), feats_.end(), std::uint32_t{0});
    for (std::size_t i = 0; i < mtry_; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(p - i));
      std::swap(feats_[i], feats_[j]);
    }
    std::sort(feats_.begin(), feats_.begin() + static_cast<std::ptrdiff_t>(mtry_));

    const std::uint64_t total = p0 + p1;
    Candidate best;
    // A split must beat the parent's own score to count as a decrease.
    best.num = static_cast<Wide>(p0 * p0 + p1 * p1);
    best.den = static_cast<Wide>(total);
    for (std::size_t f = 0; f < mtry_; ++f) {
      const std::uint32_t j = feats_[f];
      collect_bins(j, begin, end);
      std::uint64_t l0 = 0, l1 = 0;
      for (std::size_t b = 0; b + 1 < bins_.size(); ++b) {
        l0 += bins_[b].w0;
        l1 += bins_[b].w1;
        const std::uint64_t nl = l0 + l1;
        const std::uint64_t nr = total - nl;
        if (nl < cfg_.min_node_size || nr < cfg_.min_node_size) continue;
        const std::uint64_t r0 = p0 - l0, r1 = p1 - l1;
        const Wide num = static_cast<Wide>(l0 * l0 + l1 * l1) * nr +
                         static_cast<Wide>(r0 * r0 + r1 * r1) * nl;
        const Wide den = static_cast<Wide>(nl) * nr;
        if (better(num, den, best.num, best.den)) {
          best.found = true;
          best.feature = static_cast<std::int32_t>(j);
          best.split_code = bins_[b].code;
          best.next_code = bins_[b + 1].code;
          best.left0 = l0;
          best.left1 = l1;
          best.num = num;
          best.den = den;
        }
      }
    }
    return best;
  }

  // Class weights per distinct code present in the node, ascending by code.
  void collect_bins(std::uint32_t j, std::uint32_t begin, std::uint32_t end) {
    const std::uint32_t* code = codes_.column(j);
    const std::size_t distinct = codes_.values[j].size();
    const std::size_t m = end - begin;
    bins_.clear();
    if (distinct <= 64) {
      for (std::uint32_t i = begin; i < end; ++i) {
        const std::uint32_t r = idx_[i];
        const std::uint32_t lw = packed_[r];
        hist_[code[r] << 1 | (lw & 1u)] += lw >> 1;
      }
      flush_histogram(0, static_cast<std::uint32_t>(distinct - 1));
      return;
    }
    if (distinct <= 2 * m + 16) {
      std::uint32_t lo = UINT32_MAX, hi = 0;
      for (std::uint32_t i = begin; i < end; ++i) {
        const std::uint32_t r = idx_[i];
        const std::uint32_t c = code[r];
        const std::uint32_t lw = packed_[r];
        hist_[c << 1 | (lw & 1u)] += lw >> 1;
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
      flush_histogram(lo, hi);
      return;
    }
    entries_.clear();
    for (std::uint32_t i = begin; i < end; ++i) {
      const std::uint32_t r = idx_[i];
      const std::uint32_t lw = packed_[r];
      entries_.push_back({code[r], (lw & 1u) ? 0 : lw >> 1, (lw & 1u) ? lw >> 1 : 0});
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const Bin& a, const Bin& b) { return a.code < b.code; });
    for (const auto& e : entries_) {
      if (!bins_.empty() && bins_.back().code == e.code) {
        bins_.back().w0 += e.w0;
        bins_.back().w1 += e.w1;
      } else {
        bins_.push_back(e);
      }
    }
  }

  void flush_histogram(std::uint32_t lo, std::uint32_t hi) {
    for (std::uint32_t c = lo; c <= hi; ++c) {
      const std::uint64_t w0 = hist_[2 * c], w1 = hist_[2 * c + 1];
      if ((w0 | w1) != 0) bins_.push_back({c, w0, w1});
      hist_[2 * c] = 0;
      hist_[2 * c + 1] = 0;
    }
  }

  std::uint32_t partition(std::uint32_t begin, std::uint32_t end, const Candidate& c) {
    const std::uint32_t* code = codes_.column(static_cast<std::size_t>(c.feature));
    std::uint32_t left = begin;
    std::uint32_t right = 0;
    for (std::uint32_t i = begin; i < end; ++i) {
      const std::uint32_t r = idx_[i];
      if (code[r] <= c.split_code) {
        idx_[left++] = r;
      } else {
        tmp_[right++] = r;
      }
    }
    std::copy(tmp_.begin(), tmp_.begin() + right, idx_.begin() + left);
    return left;
  }

  const Dataset& d_;
  const ColumnCodes& codes_;
  const ForestConfig& cfg_;
  std::size_t mtry_;
  std::vector<std::uint32_t> weight_;
  // Bootstrap weight << 1 | label, indexed by row.
  std::vector<std::uint32_t> packed_;
  std::vector<std::uint32_t> idx_, tmp_;
  // Interleaved class-0 / class-1 weights per code.
  std::vector<std::uint64_t> hist_;
  std::vector<Bin> bins_, entries_;
  std::vector<std::uint32_t> feats_;
};

inline const TreeNode& walk(const Tree& tree, const double* x) {
  const TreeNode* node = tree.nodes.data();
  while (!node->is_leaf())
    node = &tree.nodes[static_cast<std::size_t>(x[node->feature] <= node->threshold ? node->left
                                                                                   : node->right)];
  return *node;
}

// Walk from `node` with feature `j` replaced by `value`.
inline std::uint8_t walk_replaced(const Tree& tree, std::int32_t node_index, const double* x,
                                  std::int32_t j, double value) {
  const TreeNode* node = &tree.nodes[static_cast<std::size_t>(node_index)];
  while (!node->is_leaf()) {
    const double v = node->feature == j ? value : x[node->feature];
    node = &tree.nodes[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
  }
  return node->leaf_class();
}

// Plain walk that also records, per feature, the first node on the path
// testing it (-1 when the path never tests the feature).
inline std::uint8_t walk_recording(const Tree& tree, const double* x, std::int32_t* first_node,
                                   std::uint8_t* used) {
  std::int32_t index = 0;
  const TreeNode* node = tree.nodes.data();
  while (!node->is_leaf()) {
    if (first_node[node->feature] < 0) first_node[node->feature] = index;
    used[node->feature] = 1;
    index = x[node->feature] <= node->threshold ? node->left : node->right;
    node = &tree.nodes[static_cast<std::size_t>(index)];
  }
  return node->leaf_class();
}

// Fisher-Yates over 32-bit bounded draws, two per SplitMix64 output.
void shuffle_small(std::vector<std::uint32_t>& v, RngState& rng) {
  std::uint64_t buffer = 0;
  bool have_half = false;
  auto half = [&]() -> std::uint32_t {
    if (have_half) {
      have_half = false;
      return static_cast<std::uint32_t>(buffer >> 32);
    }
    buffer = rng.next();
    have_half = true;
    return static_cast<std::uint32_t>(buffer);
  };
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto bound = static_cast<std::uint32_t>(i);
    std::uint64_t m = std::uint64_t{half()} * bound;
    auto low = static_cast<std::uint32_t>(m);
    if (low < bound) {
      const std::uint32_t threshold = (0u - bound) % bound;
      while (low < threshold) {
        m = std::uint64_t{half()} * bound;
        low = static_cast<std::uint32_t>(m);
      }
    }
    std::swap(v[i - 1], v[static_cast<std::size_t>(m >> 32)]);
  }
}

void fill_permutation(std::vector<std::uint32_t>& perm, std::size_t q, std::uint64_t stream_seed) {
  perm.resize(q);
  std::iota(perm.begin(), perm.end(), std::uint32_t{0});
  RngState rng{stream_seed};
  shuffle_small(perm, rng);
}

}  // namespace

std::vector<std::uint32_t> oob_permutation(std::size_t q, std::uint64_t stream_seed) {
  std::vector<std::uint32_t> perm;
  fill_permutation(perm, q, stream_seed);
  return perm;
}

std::string_view to_string(ImportanceMethod m) {
  return m == ImportanceMethod::kMdi ? "mdi" : "oob";
}

ImportanceMethod parse_importance_method(std::string_view name) {
  if (name == "mdi") return ImportanceMethod::kMdi;
  if (name == "oob") return ImportanceMethod::kOobPermutation;
  throw Error("unknown importance method '" + std::string(name) + "' (expected mdi|oob)");
}

std::size_t ForestConfig::resolved_mtry(std::size_t n_features) const {
  if (mtry) return *mtry;
  const auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features))));
  return std::max<std::size_t>(1, m);
}

void ForestConfig::validate(std::size_t n_features) const {
  if (n_trees < 1) throw Error("n_trees must be >= 1");
  if (min_node_size < 1) throw Error("min_node_size must be >= 1");
  const auto m = resolved_mtry(n_features);
  if (m < 1 || m > n_features) throw Error("mtry must be in [1, n_features]");
}

const TreeNode& Tree::leaf_for(std::span<const double> row) const { return walk(*this, row.data()); }

double gini_impurity(std::uint64_t count0, std::uint64_t count1) {
  const std::uint64_t n = count0 + count1;
  if (n == 0) throw Error("gini impurity of an empty node");
  const double p0 = static_cast<double>(count0) / static_cast<double>(n);
  const double p1 = static_cast<double>(count1) / static_cast<double>(n);
  return 1.0 - (p0 * p0 + p1 * p1);
}

Forest train_forest(const Dataset& train, const ForestConfig& config, std::uint64_t seed) {
  config.validate(train.n_features);
  if (!train.has_both_classes()) throw Error("cannot train on single-class data");
  if (train.n_rows > UINT32_MAX / 2) throw Error("too many training rows");
  Forest forest;
  forest.config = config;
  forest.seed = seed;
  forest.n_features = train.n_features;
  forest.feature_names = train.feature_names;
  forest.trees.reserve(config.n_trees);
  forest.oob_indices.resize(config.n_trees);

  const ColumnCodes codes(train);
  TreeBuilder builder(train, codes, config, config.resolved_mtry(train.n_features));
  for (std::size_t t = 0; t < config.n_trees; ++t) {
    RngState rng{derive_trial_seed(seed, t, 0)};
    forest.trees.push_back(builder.grow(rng, forest.oob_indices[t]));
  }
  return forest;
}

std::uint8_t predict(const Forest& forest, std::span<const double> row) {
  if (row.size() != forest.n_features) throw Error("row length does not match forest features");
  std::size_t votes1 = 0;
  for (const auto& tree : forest.trees) votes1 += walk(tree, row.data()).leaf_class();
  return 2 * votes1 > forest.trees.size() ? 1 : 0;
}

std::vector<std::uint8_t> predict_all(const Forest& forest, const Dataset& d) {
  std::vector<std::uint8_t> out(d.n_rows);
  for (std::size_t r = 0; r < d.n_rows; ++r) out[r] = predict(forest, d.row(r));
  return out;
}

double oob_accuracy(const Forest& forest, const Dataset& train) {
  std::vector<std::uint32_t> v0(train.n_rows, 0), v1(train.n_rows, 0);
  for (std::size_t t = 0; t < forest.trees.size(); ++t)
    for (auto r : forest.oob_indices[t])
      ++(walk(forest.trees[t], train.row(r).data()).leaf_class() ? v1 : v0)[r];
  std::size_t used = 0, correct = 0;
  for (std::size_t r = 0; r < train.n_rows; ++r) {
    if (v0[r] + v1[r] == 0) continue;
    ++used;
    correct += static_cast<std::uint8_t>(v1[r] > v0[r] ? 1 : 0) == train.labels[r];
  }
  return used == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(used);
}

ImportanceVector mdi_importance(const Forest& forest) {
  ImportanceVector out;
  out.method = ImportanceMethod::kMdi;
  out.scores.assign(forest.n_features, 0.0);
  for (const auto& tree : forest.trees) {
    const auto& root = tree.nodes.front();
    const double n_root = static_cast<double>(root.count0) + root.count1;
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      const auto& l = tree.nodes[static_cast<std::size_t>(node.left)];
      const auto& r = tree.nodes[static_cast<std::size_t>(node.right)];
      const double n = static_cast<double>(node.count0) + node.count1;
      const double nl = static_cast<double>(l.count0) + l.count1;
      const double nr = static_cast<double>(r.count0) + r.count1;
      const double decrease = gini_impurity(node.count0, node.count1) -
                              nl / n * gini_impurity(l.count0, l.count1) -
                              nr / n * gini_impurity(r.count0, r.count1);
      out.scores[static_cast<std::size_t>(node.feature)] += n / n_root * std::max(0.0, decrease);
    }
  }
  for (auto& s : out.scores) s /= static_cast<double>(forest.trees.size());
  return out;
}

ImportanceVector oob_permutation_importance(const Forest& forest, const Dataset& train,
                                            std::uint64_t seed) {
  if (train.n_features != forest.n_features) throw Error("dataset does not match forest");
  const std::size_t p = forest.n_features;
  ImportanceVector out;
  out.method = ImportanceMethod::kOobPermutation;
  out.scores.assign(p, 0.0);

  std::vector<bool> ever_oob(train.n_rows, false);
  std::vector<std::uint8_t> base_pred;
  std::vector<std::int32_t> first_node;
  std::vector<std::uint8_t> feature_used(p);
  std::vector<std::uint32_t> perm;
  std::size_t used_trees = 0;
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const auto& oob = forest.oob_indices[t];
    if (oob.empty()) continue;
    ++used_trees;
    const auto& tree = forest.trees[t];
    const std::size_t q = oob.size();
    base_pred.resize(q);
    first_node.assign(q * p, -1);
    std::fill(feature_used.begin(), feature_used.end(), 0);
    std::int64_t base_correct = 0;
    for (std::size_t i = 0; i < q; ++i) {
      ever_oob[oob[i]] = true;
      base_pred[i] =
          walk_recording(tree, train.row(oob[i]).data(), &first_node[i * p], feature_used.data());
      base_correct += base_pred[i] == train.labels[oob[i]];
    }
    for (std::size_t j = 0; j < p; ++j) {
      // Rows whose path never tests j keep their prediction under any
      // permutation of column j, and so do rows whose donor value equals
      // their own.
      if (!feature_used[j]) continue;
      fill_permutation(perm, q, derive_trial_seed(seed, t, j + 1));
      std::int64_t correct = base_correct;
      for (std::size_t i = 0; i < q; ++i) {
        const std::int32_t from = first_node[i * p + j];
        if (from < 0) continue;
        const std::uint32_t r = oob[i];
        const double donor = train.at(oob[perm[i]], j);
        if (donor == train.at(r, j)) continue;
        const std::uint8_t y = train.labels[r];
        const std::uint8_t pred =
            walk_replaced(tree, from, train.row(r).data(), static_cast<std::int32_t>(j), donor);
        correct += static_cast<std::int64_t>(pred == y) - static_cast<std::int64_t>(base_pred[i] == y);
      }
      out.scores[j] += static_cast<double>(base_correct - correct) / static_cast<double>(q);
    }
  }
  if (used_trees > 0)
    for (auto& s : out.scores) s /= static_cast<double>(used_trees);
  out.rows_never_oob = static_cast<std::size_t>(std::count(ever_oob.begin(), ever_oob.end(), false));
  return out;
}

ImportanceVector compute_importance(const Forest& forest, const Dataset& train, std::uint64_t seed) {
  if (forest.config.importance_method == ImportanceMethod::kMdi) return mdi_importance(forest);
  return oob_permutation_importance(forest, train, seed);
}

}  // namespace stabforest
