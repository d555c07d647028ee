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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hopwalk/linkpred.hpp"
#include "test_util.hpp"

using namespace hopwalk;
using namespace hopwalk::graph;
using namespace hopwalk::linkpred;

namespace {

// Brute-force AUC: every positive/negative pair compared directly.
double brute_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double num = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    ++n_pos;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] == 1) continue;
      if (scores[i] > scores[j]) {
        num += 1.0;
      } else if (scores[i] == scores[j]) {
        num += 0.5;
      }
    }
  }
  for (int l : labels) n_neg += (l != 1);
  return num / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// Authors a..e, each with their own papers; (a,b) and (b,c) co-author.
HeteroGraph pair_graph() {
  GraphBuilder b;
  b.add_edge({"author:a", "author"}, {"paper:p1", "paper"});
  b.add_edge({"author:b", "author"}, {"paper:p1", "paper"});
  b.add_edge({"author:b", "author"}, {"paper:p2", "paper"});
  b.add_edge({"author:c", "author"}, {"paper:p2", "paper"});
  b.add_edge({"author:d", "author"}, {"paper:p3", "paper"});
  b.add_edge({"author:e", "author"}, {"paper:p4", "paper"});
  return b.build();
}

linkpred::EmbeddingMatrix planted_embeddings(int pairs, int dim, std::uint64_t seed) {
  // nodes u2i/v2i share a vector (strong hadamard signal), odd nodes are noise
  std::vector<std::vector<std::string>> seqs(1);
  for (int i = 0; i < pairs; ++i) {
    seqs[0].push_back("u" + std::to_string(i));
    seqs[0].push_back("v" + std::to_string(i));
  }
  auto corpus = embedding::build_vocab(seqs);
  linkpred::EmbeddingMatrix m;
  m.vocab = corpus.vocab;
  m.dim = static_cast<std::uint32_t>(dim);
  m.input.resize(static_cast<std::size_t>(2 * pairs) * dim);
  Rng rng(seed);
  for (int i = 0; i < pairs; ++i) {
    for (int j = 0; j < dim; ++j) {
      double v = rng.uniform_real() * 2.0 - 1.0;
      m.input[m.vocab.row_of("u" + std::to_string(i)) * dim + j] = v;
      m.input[m.vocab.row_of("v" + std::to_string(i)) * dim + j] =
          v + 0.05 * (rng.uniform_real() - 0.5);
    }
  }
  m.output.assign(m.input.size(), 0.0);
  return m;
}

}  // namespace

TEST_CASE("auc: hand-counted cases") {
  // positives 0.35, 0.8 vs negatives 0.1, 0.4: wins 3 of 4
  std::vector<double> s1 = {0.1, 0.4, 0.35, 0.8};
  std::vector<int> y1 = {0, 0, 1, 1};
  CHECK(auc(s1, y1) == 0.75);

  // all tied: exactly one half
  std::vector<double> s2 = {0.5, 0.5, 0.5, 0.5};
  std::vector<int> y2 = {0, 1, 0, 1};
  CHECK(auc(s2, y2) == 0.5);

  // perfect and inverted rankings
  std::vector<double> s3 = {0.1, 0.2, 0.8, 0.9};
  std::vector<int> y3 = {0, 0, 1, 1};
  CHECK(auc(s3, y3) == 1.0);
  std::vector<int> y4 = {1, 1, 0, 0};
  CHECK(auc(s3, y4) == 0.0);

  std::vector<int> y5 = {1, 1, 1, 1};
  CHECK_THROWS_AS(auc(s3, y5), DegenerateLabelsError);
}

TEST_CASE("auc equals brute force exactly on random tied instances") {
  Rng rng(777);
  for (int trial = 0; trial < 300; ++trial) {
    auto n = 2 + rng.uniform_index(40);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    // few distinct score values force plenty of ties
    for (auto& s : scores) s = static_cast<double>(rng.uniform_index(6)) / 4.0;
    for (auto& l : labels) l = static_cast<int>(rng.uniform_index(2));
    labels[0] = 1;
    labels[n - 1] = 0;
    CHECK(auc(scores, labels) == brute_auc(scores, labels));
  }
}

TEST_CASE("hadamard feature is the elementwise product") {
  auto m = planted_embeddings(2, 2, 5);
  auto& mm = m;
  mm.input = {1.0, 2.0, 3.0, -4.0, 0.5, 0.5, 1.0, 1.0};
  auto f = hadamard_feature(mm, "u0", "v0");
  REQUIRE(f.size() == 2);
  CHECK(f[0] == 3.0);
  CHECK(f[1] == -8.0);
  auto g = hadamard_feature(mm, "v0", "u0");
  CHECK(f == g);
  CHECK_THROWS_AS(hadamard_feature(mm, "u0", "nope"), embedding::UnknownNodeError);
}

TEST_CASE("logistic regression gradient matches finite differences") {
  Rng rng(4242);
  FeatureMatrix x;
  std::vector<int> y;
  for (int i = 0; i < 24; ++i) {
    std::vector<double> row(5);
    for (auto& v : row) v = rng.uniform_real() * 2 - 1;
    x.push_row(row);
    y.push_back(static_cast<int>(rng.uniform_index(2)));
  }
  y[0] = 1;
  y[1] = 0;
  std::vector<double> w(5);
  for (auto& v : w) v = rng.uniform_real() - 0.5;
  double b = 0.3;
  const double lambda = 1e-2, h = 1e-6;

  std::vector<double> grad(5);
  double grad_b = 0.0;
  LogisticRegression::gradient(x, y, w, b, lambda, grad, grad_b);

  for (std::size_t j = 0; j < 5; ++j) {
    auto wp = w, wm = w;
    wp[j] += h;
    wm[j] -= h;
    double numeric = (LogisticRegression::loss(x, y, wp, b, lambda) -
                      LogisticRegression::loss(x, y, wm, b, lambda)) /
                     (2 * h);
    CHECK(grad[j] == doctest::Approx(numeric).epsilon(1e-6));
  }
  double numeric_b = (LogisticRegression::loss(x, y, w, b + h, lambda) -
                      LogisticRegression::loss(x, y, w, b - h, lambda)) /
                     (2 * h);
  CHECK(grad_b == doctest::Approx(numeric_b).epsilon(1e-6));
}

TEST_CASE("logistic regression separates a linear toy problem") {
  Rng rng(11);
  FeatureMatrix x;
  std::vector<int> y;
  for (int i = 0; i < 80; ++i) {
    double cls = (i % 2 == 0) ? 1.0 : -1.0;
    std::vector<double> row = {cls * 2.0 + (rng.uniform_real() - 0.5),
                               rng.uniform_real()};
    x.push_row(row);
    y.push_back(cls > 0 ? 1 : 0);
  }
  LogisticRegression lr;
  lr.fit(x, y);
  std::vector<double> scores;
  std::vector<int> labels;
  for (std::size_t i = 0; i < x.rows; ++i) {
    scores.push_back(lr.score(x.row(i)));
    labels.push_back(y[i]);
  }
  CHECK(auc(scores, labels) == 1.0);

  FeatureMatrix ones;
  ones.push_row(std::vector<double>{1.0, 1.0});
  std::vector<int> same = {1};
  LogisticRegression lr2;
  CHECK_THROWS_AS(lr2.fit(ones, same), DegenerateLabelsError);
}

TEST_CASE("logistic regression is invariant to feature scaling") {
  Rng rng(31);
  FeatureMatrix x, x_scaled;
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> row(3), scaled(3);
    for (int j = 0; j < 3; ++j) {
      row[j] = rng.uniform_real() * 2 - 1 + (i % 2);
      scaled[j] = row[j] * 1000.0 + 7.0;  // affine per-feature transform
    }
    x.push_row(row);
    x_scaled.push_row(scaled);
    y.push_back(i % 2);
  }
  LogisticRegression a, b;
  a.fit(x, y);
  b.fit(x_scaled, y);
  for (std::size_t i = 0; i < x.rows; ++i) {
    std::vector<double> scaled(3);
    for (int j = 0; j < 3; ++j) scaled[j] = x.row(i)[j] * 1000.0 + 7.0;
    CHECK(a.score(x.row(i)) == doctest::Approx(b.score(scaled)).epsilon(1e-9));
  }
}

TEST_CASE("gaussian naive bayes: exact hand-computed log odds") {
  // class 0 features {0, 2} (mean 1, var 1), class 1 features {4, 6}
  // (mean 5, var 1), equal priors; constants cancel:
  // score(x) = ((x-1)^2 - (x-5)^2) / 2
  FeatureMatrix x;
  x.push_row(std::vector<double>{0.0});
  x.push_row(std::vector<double>{2.0});
  x.push_row(std::vector<double>{4.0});
  x.push_row(std::vector<double>{6.0});
  std::vector<int> y = {0, 0, 1, 1};
  GaussianNaiveBayes nb;
  nb.fit(x, y);
  CHECK(nb.score(std::vector<double>{2.0}) == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(nb.score(std::vector<double>{3.0}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(nb.score(std::vector<double>{4.0}) == doctest::Approx(4.0).epsilon(1e-12));

  // zero-variance class hits the floor but stays finite
  FeatureMatrix xz;
  xz.push_row(std::vector<double>{1.0});
  xz.push_row(std::vector<double>{1.0});
  xz.push_row(std::vector<double>{2.0});
  xz.push_row(std::vector<double>{3.0});
  GaussianNaiveBayes nbz;
  nbz.fit(xz, {0, 0, 1, 1});
  CHECK(std::isfinite(nbz.score(std::vector<double>{1.5})));

  GaussianNaiveBayes nbd;
  CHECK_THROWS_AS(nbd.fit(xz, std::vector<int>{1, 1, 1, 1}), DegenerateLabelsError);
}

TEST_CASE("extract_positive_pairs keeps only new collaborations") {
  auto g = pair_graph();
  std::vector<KeyPair> eval_pairs = {
      {"author:a", "author:b"},  // share p1 -> not new
      {"author:a", "author:c"},  // no common paper -> kept
      {"author:d", "author:e"},  // no common paper -> kept
      {"author:c", "author:a"},  // duplicate of (a,c)
      {"author:a", "author:zz"}, // unknown author
      {"author:a", "author:a"},  // degenerate
  };
  ExtractStats stats;
  auto pos = extract_positive_pairs(g, eval_pairs, &stats);
  REQUIRE(pos.size() == 2);
  CHECK(pos[0] == KeyPair{"author:a", "author:c"});
  CHECK(pos[1] == KeyPair{"author:d", "author:e"});
  CHECK(stats.input_pairs == 6);
  CHECK(stats.skipped_not_new == 1);
  CHECK(stats.duplicates == 1);
  CHECK(stats.skipped_unknown_author == 2);
  CHECK(stats.kept == 2);
}

TEST_CASE("negative sampling draws admissible pairs only") {
  auto g = pair_graph();
  std::vector<KeyPair> pos = {{"author:a", "author:c"}, {"author:d", "author:e"}};
  // pool {a,c,d,e}; excluded: the positives; no other pair shares a paper
  // -> admissible: (a,d),(a,e),(c,d),(c,e) = exactly 4
  Rng rng(123);
  auto neg = sample_negative_pairs(pos, g, 4, rng);
  REQUIRE(neg.size() == 4);
  std::sort(neg.begin(), neg.end());
  std::vector<KeyPair> expect = {{"author:a", "author:d"},
                                 {"author:a", "author:e"},
                                 {"author:c", "author:d"},
                                 {"author:c", "author:e"}};
  CHECK(neg == expect);

  Rng rng2(123);
  CHECK_THROWS_AS(sample_negative_pairs(pos, g, 5, rng2), ExhaustedError);

  // deterministic for a fixed seed
  Rng r3(9), r4(9);
  CHECK(sample_negative_pairs(pos, g, 2, r3) == sample_negative_pairs(pos, g, 2, r4));
}

TEST_CASE("labeled pair sets validate balance and uniqueness") {
  std::vector<KeyPair> pos = {{"a", "b"}};
  std::vector<KeyPair> neg = {{"c", "d"}};
  auto set = make_labeled_set(pos, neg);
  CHECK(set.positive_count() == 1);
  CHECK(set.negative_count() == 1);

  LabeledPairSet unbalanced;
  unbalanced.pairs = {{"a", "b", 1}, {"c", "d", 1}, {"e", "f", 0}};
  CHECK_THROWS_AS(unbalanced.validate(), Error);

  LabeledPairSet dup;
  dup.pairs = {{"a", "b", 1}, {"b", "a", 0}};
  CHECK_THROWS_AS(dup.validate(), Error);

  LabeledPairSet self_pair;
  self_pair.pairs = {{"a", "a", 1}};
  CHECK_THROWS_AS(self_pair.validate(), Error);
}

TEST_CASE("pair file round trip and errors") {
  testutil::TempDir tmp("pairs");
  std::vector<KeyPair> pos = {{"author:a", "author:c"}};
  std::vector<KeyPair> neg = {{"author:d", "author:e"}};
  auto set = make_labeled_set(pos, neg);
  auto path = tmp.file("pairs.tsv");
  save_pairs(set, path, {"seed=3"});
  auto text = testutil::slurp(path);
  CHECK(text.find("# seed=3") != std::string::npos);
  CHECK(text.find("author:a\tauthor:c\t1") != std::string::npos);

  auto loaded = load_pairs(path);
  REQUIRE(loaded.pairs.size() == 2);
  CHECK(loaded.pairs[0].u == "author:a");
  CHECK(loaded.pairs[0].label == 1);
  CHECK(loaded.pairs[1].label == 0);

  auto bad1 = tmp.file("bad_label.tsv");
  write_text_file(bad1, "a\tb\t2\n");
  CHECK_THROWS_AS(load_pairs(bad1), IoError);

  auto bad2 = tmp.file("bad_fields.tsv");
  write_text_file(bad2, "a\tb\n");
  CHECK_THROWS_AS(load_pairs(bad2), IoError);
}

TEST_CASE("evaluate: planted signal scores high, parallel matches serial") {
  auto m = planted_embeddings(40, 8, 99);
  std::vector<KeyPair> pos, neg;
  for (int i = 0; i < 40; ++i) {
    pos.push_back({"u" + std::to_string(i), "v" + std::to_string(i)});
  }
  for (int i = 0; i < 40; ++i) {
    neg.push_back({"u" + std::to_string(i),
                   "v" + std::to_string((i + 7) % 40)});
  }
  auto set = make_labeled_set(pos, neg);
  EvalConfig cfg;
  cfg.repeats = 6;
  cfg.rng_seed = 2025;

  auto reports = evaluate(m, set, cfg);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].classifier == "LR");
  CHECK(reports[1].classifier == "NB");
  for (const auto& r : reports) {
    CHECK(r.per_repeat_auc.size() == 6);
    CHECK(r.mean_auc > 0.8);
    CHECK(r.std_auc >= 0.0);
    double mean = 0;
    for (double a : r.per_repeat_auc) mean += a;
    CHECK(r.mean_auc == doctest::Approx(mean / 6).epsilon(1e-12));
  }

  auto again = evaluate(m, set, cfg);
  CHECK(again[0].per_repeat_auc == reports[0].per_repeat_auc);

  for (int workers : {2, 4}) {
    auto par = evaluate_parallel(m, set, cfg, workers);
    CHECK(par[0].per_repeat_auc == reports[0].per_repeat_auc);
    CHECK(par[1].per_repeat_auc == reports[1].per_repeat_auc);
  }
}

TEST_CASE("evaluate rejects tiny inputs") {
  auto m = planted_embeddings(4, 4, 7);
  std::vector<KeyPair> pos, neg;
  for (int i = 0; i < 4; ++i) {
    pos.push_back({"u" + std::to_string(i), "v" + std::to_string(i)});
    neg.push_back({"u" + std::to_string(i), "v" + std::to_string((i + 1) % 4)});
  }
  auto set = make_labeled_set(pos, neg);  // 8 pairs < 10
  EvalConfig cfg;
  CHECK_THROWS_AS(evaluate(m, set, cfg), TooFewPairsError);
}
