// Copyright 2026 The hopwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hopwalk/linkpred.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "hopwalk/util.hpp"

namespace hopwalk::linkpred {
namespace {

using graph::NodeId;

std::uint64_t pack_pair(NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

// -log(sigmoid(z)) without overflow for large |z|.
double neg_log_sigmoid(double z) {
  if (z >= 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace

std::size_t LabeledPairSet::positive_count() const {
  std::size_t n = 0;
  for (const auto& p : pairs) n += (p.label == 1);
  return n;
}

std::size_t LabeledPairSet::negative_count() const {
  return pairs.size() - positive_count();
}

void LabeledPairSet::validate() const {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& p : pairs) {
    if (p.label != 0 && p.label != 1) {
      throw Error("pair label must be 0 or 1");
    }
    if (p.u == p.v) {
      throw Error("pair connects a node to itself: " + p.u);
    }
    auto canon = std::minmax(p.u, p.v);
    if (!seen.insert({canon.first, canon.second}).second) {
      throw Error("duplicate pair: " + p.u + " / " + p.v);
    }
  }
  if (positive_count() != negative_count()) {
    throw Error("pair set is unbalanced: " + std::to_string(positive_count()) +
                " positives vs " + std::to_string(negative_count()) +
                " negatives");
  }
}

std::vector<KeyPair> extract_positive_pairs(const HeteroGraph& train,
                                            const std::vector<KeyPair>& eval_pairs,
                                            ExtractStats* stats) {
  ExtractStats st;
  st.input_pairs = eval_pairs.size();
  std::vector<KeyPair> out;
  std::unordered_set<std::uint64_t> seen;
  for (const auto& [ku, kv] : eval_pairs) {
    auto u = train.find(ku);
    auto v = train.find(kv);
    if (!u || !v || *u == *v) {
      ++st.skipped_unknown_author;
      continue;
    }
    if (!seen.insert(pack_pair(*u, *v)).second) {
      ++st.duplicates;
      continue;
    }
    if (train.has_common_neighbor(*u, *v)) {
      ++st.skipped_not_new;
      continue;
    }
    NodeId a = std::min(*u, *v), b = std::max(*u, *v);
    out.emplace_back(std::string(train.key_of(a)), std::string(train.key_of(b)));
    ++st.kept;
  }
  if (stats) *stats = st;
  return out;
}

std::vector<KeyPair> sample_negative_pairs(const std::vector<KeyPair>& positives,
                                           const HeteroGraph& train,
                                           std::size_t count, Rng& rng) {
  // Candidate nodes: everything that appears in a positive pair.
  std::vector<NodeId> pool;
  {
    std::unordered_set<NodeId> uniq;
    for (const auto& [ku, kv] : positives) {
      for (const std::string* k : {&ku, &kv}) {
        auto id = train.find(*k);
        if (!id) throw graph::UnknownNodeError("unknown node in positive pair: " + *k);
        if (uniq.insert(*id).second) pool.push_back(*id);
      }
    }
  }
  std::sort(pool.begin(), pool.end());

  std::unordered_set<std::uint64_t> excluded;
  for (const auto& [ku, kv] : positives) {
    excluded.insert(pack_pair(*train.find(ku), *train.find(kv)));
  }

  auto admissible = [&](NodeId a, NodeId b) {
    return !excluded.count(pack_pair(a, b)) && !train.has_common_neighbor(a, b);
  };

  std::vector<KeyPair> out;
  out.reserve(count);
  const std::size_t n = pool.size();
  const std::size_t universe = n < 2 ? 0 : n * (n - 1) / 2;

  if (universe <= 4'000'000) {
    // Small pool: enumerate every admissible pair, shuffle, take a prefix.
    // This is exact; ExhaustedError is only raised when the pairs truly
    // do not exist.
    std::vector<std::pair<NodeId, NodeId>> valid;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (admissible(pool[i], pool[j])) valid.emplace_back(pool[i], pool[j]);
      }
    }
    if (valid.size() < count) {
      throw ExhaustedError("cannot draw " + std::to_string(count) +
                           " negative pairs: only " + std::to_string(valid.size()) +
                           " admissible pairs exist");
    }
    std::vector<std::size_t> idx(valid.size());
    std::iota(idx.begin(), idx.end(), 0);
    shuffle_indices(idx, rng);
    for (std::size_t i = 0; i < count; ++i) {
      const auto& [a, b] = valid[idx[i]];
      out.emplace_back(std::string(train.key_of(a)), std::string(train.key_of(b)));
    }
  } else {
    // Large pool: rejection sampling with a generous retry budget.
    std::unordered_set<std::uint64_t> drawn;
    std::uint64_t budget = 1'000'000 + 200 * static_cast<std::uint64_t>(count);
    while (out.size() < count) {
      if (budget-- == 0) {
        throw ExhaustedError("negative pair sampling exhausted its retry budget "
                             "after " + std::to_string(out.size()) + " of " +
                             std::to_string(count) + " pairs");
      }
      NodeId a = pool[rng.uniform_index(n)];
      NodeId b = pool[rng.uniform_index(n)];
      if (a == b) continue;
      std::uint64_t code = pack_pair(a, b);
      if (drawn.count(code) || !admissible(a, b)) continue;
      drawn.insert(code);
      NodeId lo = std::min(a, b), hi = std::max(a, b);
      out.emplace_back(std::string(train.key_of(lo)), std::string(train.key_of(hi)));
    }
  }
  return out;
}

LabeledPairSet make_labeled_set(const std::vector<KeyPair>& positives,
                                const std::vector<KeyPair>& negatives) {
  LabeledPairSet set;
  set.pairs.reserve(positives.size() + negatives.size());
  for (const auto& [u, v] : positives) set.pairs.push_back({u, v, 1});
  for (const auto& [u, v] : negatives) set.pairs.push_back({u, v, 0});
  set.validate();
  return set;
}

void save_pairs(const LabeledPairSet& set, const std::filesystem::path& path,
                const std::vector<std::string>& extra_header) {
  std::string text;
  text += "# hopwalk labeled pairs\n";
  for (const auto& line : extra_header) text += "# " + line + "\n";
  text += "# positives=" + std::to_string(set.positive_count()) +
          " negatives=" + std::to_string(set.negative_count()) + "\n";
  for (const auto& p : set.pairs) {
    text += p.u;
    text += '\t';
    text += p.v;
    text += '\t';
    text += char('0' + p.label);
    text += '\n';
  }
  write_text_file(path, text);
}

LabeledPairSet load_pairs(const std::filesystem::path& path) {
  LabeledPairSet set;
  for (const auto& [line_no, line] : read_data_lines(path)) {
    auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": expected 3 tab-separated fields, got " +
                    std::to_string(fields.size()));
    }
    if (fields[2] != "0" && fields[2] != "1") {
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": label must be 0 or 1, got '" + std::string(fields[2]) + "'");
    }
    set.pairs.push_back({std::string(fields[0]), std::string(fields[1]),
                         fields[2] == "1" ? 1 : 0});
  }
  set.validate();
  return set;
}

std::vector<double> hadamard_feature(const EmbeddingMatrix& emb,
                                     const std::string& u,
                                     const std::string& v) {
  auto xu = emb.row(emb.vocab.row_of(u));
  auto xv = emb.row(emb.vocab.row_of(v));
  std::vector<double> f(emb.dim);
  for (std::size_t d = 0; d < emb.dim; ++d) f[d] = xu[d] * xv[d];
  return f;
}

void FeatureMatrix::push_row(std::span<const double> values) {
  if (rows == 0 && cols == 0) cols = values.size();
  if (values.size() != cols) {
    throw Error("feature row has " + std::to_string(values.size()) +
                " values, expected " + std::to_string(cols));
  }
  data.insert(data.end(), values.begin(), values.end());
  ++rows;
}

double LogisticRegression::loss(const FeatureMatrix& x, const std::vector<int>& y,
                                std::span<const double> w, double b,
                                double lambda) {
  const std::size_t n = x.rows, d = x.cols;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    double z = b;
    for (std::size_t j = 0; j < d; ++j) z += w[j] * xi[j];
    // y=1: -log(sigma(z)); y=0: -log(1 - sigma(z)) = -log(sigma(-z)).
    total += neg_log_sigmoid(y[i] == 1 ? z : -z);
  }
  double reg = 0.0;
  for (std::size_t j = 0; j < d; ++j) reg += w[j] * w[j];
  return total / static_cast<double>(n) + 0.5 * lambda * reg;
}

void LogisticRegression::gradient(const FeatureMatrix& x, const std::vector<int>& y,
                                  std::span<const double> w, double b,
                                  double lambda, std::span<double> grad_w,
                                  double& grad_b) {
  const std::size_t n = x.rows, d = x.cols;
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  grad_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    double z = b;
    for (std::size_t j = 0; j < d; ++j) z += w[j] * xi[j];
    double r = sigmoid(z) - static_cast<double>(y[i]);
    for (std::size_t j = 0; j < d; ++j) grad_w[j] += r * xi[j];
    grad_b += r;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) grad_w[j] = grad_w[j] * inv_n + lambda * w[j];
  grad_b *= inv_n;
}

void LogisticRegression::fit(const FeatureMatrix& x, const std::vector<int>& y) {
  const std::size_t n = x.rows, d = x.cols;
  if (n == 0 || y.size() != n) {
    throw Error("logistic regression: feature/label size mismatch");
  }
  bool has0 = false, has1 = false;
  for (int label : y) (label == 1 ? has1 : has0) = true;
  if (!has0 || !has1) {
    throw DegenerateLabelsError("logistic regression requires both classes in the train split");
  }

  // Standardize with train-split statistics (population variance).
  mean_.assign(d, 0.0);
  inv_std_.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t j = 0; j < d; ++j) mean_[j] += xi[j];
  }
  for (std::size_t j = 0; j < d; ++j) mean_[j] /= static_cast<double>(n);
  std::vector<double> var(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      double c = xi[j] - mean_[j];
      var[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    double sd = std::sqrt(var[j] / static_cast<double>(n));
    inv_std_[j] = 1.0 / std::max(sd, 1e-12);
  }

  FeatureMatrix xs;
  xs.rows = n;
  xs.cols = d;
  xs.data.resize(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      xs.data[i * d + j] = (xi[j] - mean_[j]) * inv_std_[j];
    }
  }

  weights_.assign(d, 0.0);
  bias_ = 0.0;
  std::vector<double> gw(d);
  double gb = 0.0;
  for (int it = 0; it < cfg_.iterations; ++it) {
    gradient(xs, y, weights_, bias_, cfg_.lambda, gw, gb);
    for (std::size_t j = 0; j < d; ++j) weights_[j] -= cfg_.step * gw[j];
    bias_ -= cfg_.step * gb;
  }
}

double LogisticRegression::score(std::span<const double> x) const {
  double z = bias_;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    z += weights_[j] * (x[j] - mean_[j]) * inv_std_[j];
  }
  return sigmoid(z);
}

void GaussianNaiveBayes::fit(const FeatureMatrix& x, const std::vector<int>& y) {
  const std::size_t n = x.rows, d = x.cols;
  if (n == 0 || y.size() != n) {
    throw Error("naive Bayes: feature/label size mismatch");
  }
  std::size_t count[2] = {0, 0};
  for (int label : y) ++count[label == 1 ? 1 : 0];
  if (count[0] == 0 || count[1] == 0) {
    throw DegenerateLabelsError("naive Bayes requires both classes in the train split");
  }
  for (int c : {0, 1}) {
    mean_[c].assign(d, 0.0);
    var_[c].assign(d, 0.0);
    log_prior_[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    int c = y[i] == 1 ? 1 : 0;
    for (std::size_t j = 0; j < d; ++j) mean_[c][j] += xi[j];
  }
  for (int c : {0, 1}) {
    for (std::size_t j = 0; j < d; ++j) mean_[c][j] /= static_cast<double>(count[c]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    int c = y[i] == 1 ? 1 : 0;
    for (std::size_t j = 0; j < d; ++j) {
      double diff = xi[j] - mean_[c][j];
      var_[c][j] += diff * diff;
    }
  }
  for (int c : {0, 1}) {
    for (std::size_t j = 0; j < d; ++j) {
      var_[c][j] = std::max(var_[c][j] / static_cast<double>(count[c]), 1e-9);
    }
  }
}

double GaussianNaiveBayes::score(std::span<const double> x) const {
  double log_odds = log_prior_[1] - log_prior_[0];
  for (std::size_t j = 0; j < x.size(); ++j) {
    for (int c : {0, 1}) {
      double diff = x[j] - mean_[c][j];
      double lp = -0.5 * std::log(2.0 * M_PI * var_[c][j]) -
                  diff * diff / (2.0 * var_[c][j]);
      log_odds += c == 1 ? lp : -lp;
    }
  }
  return log_odds;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error("auc: score/label size mismatch");
  }
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int label : labels) n_pos += (label == 1);
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw DegenerateLabelsError("auc requires both positive and negative labels");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Rank sum of the positives, averaging ranks within tie groups.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // 1-based ranks i+1 .. j share the average (i + j + 1) / 2.
    double avg_rank = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  double u_stat = rank_sum_pos -
                  0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u_stat / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

namespace {

struct RepeatResult {
  double auc_lr = 0.0;
  double auc_nb = 0.0;
};

RepeatResult run_repeat(const FeatureMatrix& features, const std::vector<int>& labels,
                        const EvalConfig& config, std::uint32_t repeat) {
  const std::size_t n = features.rows;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(Rng::derive(config.rng_seed, 0x5245'5045ULL, repeat));
  shuffle_indices(order, rng);

  auto n_train = static_cast<std::size_t>(config.train_ratio * static_cast<double>(n));
  n_train = std::min(std::max<std::size_t>(n_train, 1), n - 1);

  FeatureMatrix xtr, xte;
  std::vector<int> ytr, yte;
  for (std::size_t i = 0; i < n; ++i) {
    auto r = features.row(order[i]);
    if (i < n_train) {
      xtr.push_row(r);
      ytr.push_back(labels[order[i]]);
    } else {
      xte.push_row(r);
      yte.push_back(labels[order[i]]);
    }
  }

  RepeatResult res;
  {
    LogisticRegression lr;
    lr.fit(xtr, ytr);
    std::vector<double> s(xte.rows);
    for (std::size_t i = 0; i < xte.rows; ++i) s[i] = lr.score(xte.row(i));
    res.auc_lr = auc(s, yte);
  }
  {
    GaussianNaiveBayes nb;
    nb.fit(xtr, ytr);
    std::vector<double> s(xte.rows);
    for (std::size_t i = 0; i < xte.rows; ++i) s[i] = nb.score(xte.row(i));
    res.auc_nb = auc(s, yte);
  }
  return res;
}

std::vector<EvalReport> summarize(const std::vector<RepeatResult>& repeats,
                                  const EvalConfig& config) {
  std::vector<EvalReport> reports(2);
  reports[0].classifier = "LR";
  reports[1].classifier = "NB";
  for (const auto& r : repeats) {
    reports[0].per_repeat_auc.push_back(r.auc_lr);
    reports[1].per_repeat_auc.push_back(r.auc_nb);
  }
  for (auto& rep : reports) {
    rep.config = config;
    double sum = std::accumulate(rep.per_repeat_auc.begin(), rep.per_repeat_auc.end(), 0.0);
    rep.mean_auc = sum / static_cast<double>(rep.per_repeat_auc.size());
    double sq = 0.0;
    for (double a : rep.per_repeat_auc) {
      double diff = a - rep.mean_auc;
      sq += diff * diff;
    }
    rep.std_auc = std::sqrt(sq / static_cast<double>(rep.per_repeat_auc.size()));
  }
  return reports;
}

void prepare_features(const EmbeddingMatrix& emb, const LabeledPairSet& pairs,
                      const EvalConfig& config, FeatureMatrix& features,
                      std::vector<int>& labels) {
  pairs.validate();
  if (pairs.pairs.size() < 10) {
    throw TooFewPairsError("need at least 10 labeled pairs, got " +
                           std::to_string(pairs.pairs.size()));
  }
  if (config.repeats == 0) throw Error("repeats must be positive");
  if (!(config.train_ratio > 0.0) || !(config.train_ratio < 1.0)) {
    throw Error("train_ratio must lie in (0, 1)");
  }
  for (const auto& p : pairs.pairs) {
    auto f = hadamard_feature(emb, p.u, p.v);
    features.push_row(f);
    labels.push_back(p.label);
  }
}

}  // namespace

std::vector<EvalReport> evaluate(const EmbeddingMatrix& emb,
                                 const LabeledPairSet& pairs,
                                 const EvalConfig& config) {
  FeatureMatrix features;
  std::vector<int> labels;
  prepare_features(emb, pairs, config, features, labels);
  std::vector<RepeatResult> repeats(config.repeats);
  for (std::uint32_t r = 0; r < config.repeats; ++r) {
    repeats[r] = run_repeat(features, labels, config, r);
  }
  return summarize(repeats, config);
}

std::vector<EvalReport> evaluate_parallel(const EmbeddingMatrix& emb,
                                          const LabeledPairSet& pairs,
                                          const EvalConfig& config,
                                          int workers) {
#ifndef _OPENMP
  (void)workers;
  return evaluate(emb, pairs, config);
#else
  if (workers <= 1) return evaluate(emb, pairs, config);
  FeatureMatrix features;
  std::vector<int> labels;
  prepare_features(emb, pairs, config, features, labels);
  std::vector<RepeatResult> repeats(config.repeats);
  std::exception_ptr err;
  // Each repeat derives its own RNG stream, so the schedule cannot change
  // the result; slots keep the output order fixed.
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(config.repeats); ++r) {
    try {
      repeats[static_cast<std::size_t>(r)] =
          run_repeat(features, labels, config, static_cast<std::uint32_t>(r));
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return summarize(repeats, config);
#endif
}

}  // namespace hopwalk::linkpred
