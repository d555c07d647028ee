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
#include <map>
#include <string>
#include <vector>

#include "hopwalk/embedding.hpp"
#include "hopwalk/graph.hpp"
#include "hopwalk/sampler.hpp"
#include "test_util.hpp"

using namespace hopwalk;
using namespace hopwalk::graph;
using namespace hopwalk::sampler;

namespace {

HeteroGraph path_pair() {
  GraphBuilder b;
  b.add_edge({"n:a", "n"}, {"n:b", "n"});
  return b.build();
}

HeteroGraph star4() {
  GraphBuilder b;
  for (const char* leaf : {"n:l1", "n:l2", "n:l3", "n:l4"}) {
    b.add_edge({"n:c", "n"}, {leaf, "n"});
  }
  return b.build();
}

}  // namespace

TEST_CASE("stride_sample equals the index-arithmetic oracle") {
  // spec'd example: a 12-node walk with K=3 emits raw-walk positions 0,4,8
  Walk w12;
  for (NodeId i = 0; i < 12; ++i) w12.nodes.push_back(i * 10);
  CHECK(stride_sample(w12, 3) == std::vector<NodeId>{0, 40, 80});

  // K=0 is the identity
  CHECK(stride_sample(w12, 0) == w12.nodes);

  // property vs the independent index loop, many lengths and strides
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    Walk w;
    auto len = 1 + rng.uniform_index(70);
    for (std::uint64_t i = 0; i < len; ++i) {
      w.nodes.push_back(static_cast<NodeId>(rng.uniform_index(1000)));
    }
    auto k = static_cast<std::uint32_t>(rng.uniform_index(9));
    std::vector<NodeId> oracle;
    for (std::size_t i = 0; i < w.nodes.size(); i += k + 1) {
      oracle.push_back(w.nodes[i]);
    }
    CHECK(stride_sample(w, k) == oracle);
  }
}

TEST_CASE("random_walk visits steps+1 nodes and only follows edges") {
  auto g = star4();
  auto c = *g.find("n:c");
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    auto w = random_walk(g, c, 7, rng);
    REQUIRE(w.nodes.size() == 8);
    CHECK(w.nodes.front() == c);
    for (std::size_t j = 0; j + 1 < w.nodes.size(); ++j) {
      auto nb = g.neighbors(w.nodes[j]);
      CHECK(std::find(nb.begin(), nb.end(), w.nodes[j + 1]) != nb.end());
    }
  }
}

TEST_CASE("walk transitions are uniform (chi-square, df=3)") {
  auto g = star4();
  auto c = *g.find("n:c");
  std::map<NodeId, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    Rng rng(Rng::derive(123, static_cast<std::uint64_t>(i)));
    auto w = random_walk(g, c, 1, rng);
    ++counts[w.nodes[1]];
  }
  REQUIRE(counts.size() == 4);
  double chi2 = 0.0;
  const double expected = n / 4.0;
  for (const auto& [node, got] : counts) {
    chi2 += (got - expected) * (got - expected) / expected;
  }
  // critical value at p=0.001 for 3 degrees of freedom
  CHECK(chi2 < 16.266);
}

TEST_CASE("two-node path: K=0 corpus matches the documented counts") {
  // 2 nodes x 30 iterations = 60 sequences, each exactly 100 tokens,
  // alternating endpoints: 3000 occurrences of each key.
  auto g = path_pair();
  WalkConfig cfg;
  cfg.hop_k = 0;
  cfg.iterations_per_node = 30;
  cfg.sample_length = 100;
  cfg.rng_seed = 42;
  auto corpus = generate_corpus(g, cfg);
  REQUIRE(corpus.sequences.size() == 60);
  std::map<NodeId, std::uint64_t> counts;
  for (const auto& seq : corpus.sequences) {
    REQUIRE(seq.size() == 100);
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      CHECK(seq[i] != seq[i + 1]);  // strict alternation on a 2-path
    }
    for (auto v : seq) ++counts[v];
  }
  CHECK(counts[*g.find("n:a")] == 3000);
  CHECK(counts[*g.find("n:b")] == 3000);
}

TEST_CASE("two-node path: K=1 emits a constant sequence") {
  auto g = path_pair();
  WalkConfig cfg;
  cfg.hop_k = 1;
  cfg.iterations_per_node = 4;
  cfg.sample_length = 10;
  cfg.rng_seed = 3;
  auto corpus = generate_corpus(g, cfg);
  REQUIRE(corpus.sequences.size() == 8);
  for (const auto& seq : corpus.sequences) {
    REQUIRE(seq.size() == 10);
    for (auto v : seq) CHECK(v == seq.front());
  }
}

TEST_CASE("emitted sequences always have sample_length tokens") {
  // undirected walks cannot dead-end, so no truncation ever happens
  GraphBuilder b;
  b.add_edge({"n:a", "n"}, {"n:b", "n"});
  b.add_edge({"n:b", "n"}, {"n:c", "n"});
  b.add_edge({"n:c", "n"}, {"n:d", "n"});
  auto g = b.build();
  for (std::uint32_t k : {0u, 1u, 2u, 5u}) {
    WalkConfig cfg;
    cfg.hop_k = k;
    cfg.iterations_per_node = 3;
    cfg.sample_length = 17;
    cfg.rng_seed = 7 + k;
    auto corpus = generate_corpus(g, cfg);
    CHECK(corpus.sequences.size() == 12);
    for (const auto& seq : corpus.sequences) CHECK(seq.size() == 17);
  }
}

TEST_CASE("bipartite parity: K=1 sequences are type-homogeneous") {
  GraphBuilder b;
  Rng rng(17);
  // random bipartite author-paper graph
  for (int p = 0; p < 40; ++p) {
    auto n_authors = 1 + rng.uniform_index(3);
    for (std::uint64_t j = 0; j < n_authors; ++j) {
      auto a = rng.uniform_index(15);
      b.add_edge({"author:a" + std::to_string(a), "author"},
                 {"paper:p" + std::to_string(p), "paper"});
    }
  }
  auto g = b.build();
  WalkConfig cfg;
  cfg.hop_k = 1;
  cfg.iterations_per_node = 5;
  cfg.sample_length = 9;
  cfg.rng_seed = 23;
  auto corpus = generate_corpus(g, cfg);
  REQUIRE(!corpus.sequences.empty());
  for (const auto& seq : corpus.sequences) {
    auto t = g.node_type(seq.front());
    for (auto v : seq) CHECK(g.node_type(v) == t);
  }
}

TEST_CASE("corpus is seed-deterministic") {
  auto g = star4();
  WalkConfig cfg;
  cfg.hop_k = 1;
  cfg.iterations_per_node = 6;
  cfg.sample_length = 12;
  cfg.rng_seed = 11;
  auto c1 = generate_corpus(g, cfg);
  auto c2 = generate_corpus(g, cfg);
  CHECK(c1.sequences == c2.sequences);

  cfg.rng_seed = 12;
  auto c3 = generate_corpus(g, cfg);
  CHECK(c1.sequences != c3.sequences);
}

TEST_CASE("parallel corpus generation is worker-count invariant") {
  GraphBuilder b;
  Rng rng(31);
  for (int i = 0; i < 60; ++i) {
    auto u = rng.uniform_index(40);
    auto v = rng.uniform_index(40);
    if (u == v) continue;
    b.add_edge({"n:x" + std::to_string(u), "n"}, {"n:x" + std::to_string(v), "n"});
  }
  auto g = b.build();
  WalkConfig cfg;
  cfg.hop_k = 2;
  cfg.iterations_per_node = 7;
  cfg.sample_length = 15;
  cfg.rng_seed = 77;
  auto serial = generate_corpus(g, cfg);
  for (int workers : {1, 2, 3, 8}) {
    auto par = generate_corpus_parallel(g, cfg, workers);
    CHECK(par.sequences == serial.sequences);
    CHECK(par.skipped_isolated == serial.skipped_isolated);
  }
}

TEST_CASE("isolated nodes are skipped and counted; lone starts throw") {
  GraphBuilder b;
  b.add_edge({"n:a", "n"}, {"n:b", "n"});
  auto iso = b.add_node({"n:iso", "n"});
  auto g = b.build();

  Rng rng(1);
  CHECK_THROWS_AS(random_walk(g, iso, 5, rng), IsolatedStartError);

  WalkConfig cfg;
  cfg.hop_k = 0;
  cfg.iterations_per_node = 4;
  cfg.sample_length = 5;
  cfg.rng_seed = 2;
  auto corpus = generate_corpus(g, cfg);
  CHECK(corpus.sequences.size() == 8);  // only a and b walk
  CHECK(corpus.skipped_isolated == 1);
}

TEST_CASE("empty graph cannot be sampled") {
  GraphBuilder b;
  auto g = b.build();
  WalkConfig cfg;
  CHECK_THROWS_AS(generate_corpus(g, cfg), EmptyGraphError);
}

TEST_CASE("walk config validation") {
  WalkConfig cfg;
  cfg.sample_length = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.sample_length = 2;
  cfg.iterations_per_node = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("corpus file round trip preserves tokens and parameters") {
  testutil::TempDir tmp("corpus");
  auto g = star4();
  WalkConfig cfg;
  cfg.hop_k = 1;
  cfg.iterations_per_node = 3;
  cfg.sample_length = 8;
  cfg.rng_seed = 15;
  auto corpus = generate_corpus(g, cfg);
  auto path = tmp.file("walks.txt");
  save_corpus(corpus, g, path, {"digest=deadbeef"});

  auto text = testutil::slurp(path);
  CHECK(text.find("# digest=deadbeef") != std::string::npos);
  CHECK(text.find("k=1") != std::string::npos);
  CHECK(text.find("seed=15") != std::string::npos);

  auto loaded = embedding::load_corpus(path);
  REQUIRE(loaded.sequences.size() == corpus.sequences.size());
  for (std::size_t s = 0; s < corpus.sequences.size(); ++s) {
    REQUIRE(loaded.sequences[s].size() == corpus.sequences[s].size());
    for (std::size_t i = 0; i < corpus.sequences[s].size(); ++i) {
      CHECK(loaded.vocab.keys[loaded.sequences[s][i]] ==
            g.key_of(corpus.sequences[s][i]));
    }
  }
}
