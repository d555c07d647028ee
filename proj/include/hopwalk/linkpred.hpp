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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hopwalk/embedding.hpp"
#include "hopwalk/graph.hpp"
#include "hopwalk/rand.hpp"

namespace hopwalk::linkpred {

using embedding::EmbeddingMatrix;
using graph::HeteroGraph;

struct DegenerateLabelsError : Error {
  using Error::Error;
};
struct ExhaustedError : Error {
  using Error::Error;
};
struct TooFewPairsError : Error {
  using Error::Error;
};

using KeyPair = std::pair<std::string, std::string>;

struct LabeledPair {
  std::string u;
  std::string v;
  int label = 0;
};

// Balanced positive/negative node pairs. Pairs are unordered and unique;
// u != v everywhere.
struct LabeledPairSet {
  std::vector<LabeledPair> pairs;

  std::size_t positive_count() const;
  std::size_t negative_count() const;
  void validate() const;
};

struct ExtractStats {
  std::size_t input_pairs = 0;
  std::size_t skipped_unknown_author = 0;
  std::size_t skipped_not_new = 0;  // shared a paper in the train graph
  std::size_t duplicates = 0;
  std::size_t kept = 0;
};

// Filters evaluation-window co-author pairs down to the *new* ones: both
// authors present in the train graph and no common neighbor there. Pairs
// whose authors are missing are skipped and counted.
std::vector<KeyPair> extract_positive_pairs(const HeteroGraph& train,
                                            const std::vector<KeyPair>& eval_pairs,
                                            ExtractStats* stats = nullptr);

// Draws `count` distinct unordered pairs uniformly from the nodes appearing
// in `positives`, excluding the positives themselves and any pair with a
// common neighbor in the train graph. Throws ExhaustedError when fewer than
// `count` valid pairs exist.
std::vector<KeyPair> sample_negative_pairs(const std::vector<KeyPair>& positives,
                                           const HeteroGraph& train,
                                           std::size_t count, Rng& rng);

LabeledPairSet make_labeled_set(const std::vector<KeyPair>& positives,
                                const std::vector<KeyPair>& negatives);

// Pair file: "<key_u>\t<key_v>\t<0|1>" per line, '#' comments.
void save_pairs(const LabeledPairSet& set, const std::filesystem::path& path,
                const std::vector<std::string>& extra_header = {});
LabeledPairSet load_pairs(const std::filesystem::path& path);

// Elementwise product of the two node vectors; symmetric in (u, v).
std::vector<double> hadamard_feature(const EmbeddingMatrix& emb,
                                     const std::string& u,
                                     const std::string& v);

struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data.data() + i * cols, cols);
  }
  void push_row(std::span<const double> values);
};

// Full-batch gradient descent on L2-regularized mean log-loss. Features are
// standardized to zero mean / unit variance with statistics from the fitted
// (train) split only. Deterministic: zero-initialized, fixed iteration count.
class LogisticRegression {
 public:
  struct Config {
    double lambda = 1e-4;
    int iterations = 500;
    double step = 0.1;
  };

  LogisticRegression() = default;
  explicit LogisticRegression(Config cfg) : cfg_(cfg) {}

  void fit(const FeatureMatrix& x, const std::vector<int>& y);
  double score(std::span<const double> x) const;  // P(y=1 | x)

  // Loss and gradient on the features as given (no standardization), shared
  // by fit() and the finite-difference check. loss = mean cross-entropy
  // + lambda/2 * |w|^2; the bias is not regularized.
  static double loss(const FeatureMatrix& x, const std::vector<int>& y,
                     std::span<const double> w, double b, double lambda);
  static void gradient(const FeatureMatrix& x, const std::vector<int>& y,
                       std::span<const double> w, double b, double lambda,
                       std::span<double> grad_w, double& grad_b);

 private:
  Config cfg_;
  std::vector<double> mean_, inv_std_, weights_;
  double bias_ = 0.0;
};

// Gaussian naive Bayes with per-class feature means and (population)
// variances floored at 1e-9; score is the posterior log-odds.
class GaussianNaiveBayes {
 public:
  void fit(const FeatureMatrix& x, const std::vector<int>& y);
  double score(std::span<const double> x) const;

 private:
  std::vector<double> mean_[2], var_[2];
  double log_prior_[2] = {0.0, 0.0};
};

// Mann-Whitney AUC via rank sums with average ranks for ties. Equals the
// all-pairs comparison P(s_pos > s_neg) + 0.5 P(tie) exactly.
double auc(std::span<const double> scores, std::span<const int> labels);

struct EvalConfig {
  std::uint32_t repeats = 10;
  double train_ratio = 0.8;
  std::uint64_t rng_seed = 1;
};

struct EvalReport {
  std::string classifier;
  std::vector<double> per_repeat_auc;
  double mean_auc = 0.0;
  double std_auc = 0.0;
  EvalConfig config;
};

// Repeated shuffled train/test splits: per repeat, fits LR and NB on the
// train portion's Hadamard features and scores the test portion. Reports
// mean and std over repeats, one report per classifier ("LR", "NB").
// Deterministic given the seed.
std::vector<EvalReport> evaluate(const EmbeddingMatrix& emb,
                                 const LabeledPairSet& pairs,
                                 const EvalConfig& config);

// OpenMP over repeats; reports identical to evaluate() for any worker count.
std::vector<EvalReport> evaluate_parallel(const EmbeddingMatrix& emb,
                                          const LabeledPairSet& pairs,
                                          const EvalConfig& config,
                                          int workers);

}  // namespace hopwalk::linkpred
