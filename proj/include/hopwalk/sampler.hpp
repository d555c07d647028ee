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
#include <vector>

#include "hopwalk/graph.hpp"
#include "hopwalk/rand.hpp"

namespace hopwalk::sampler {

using graph::HeteroGraph;
using graph::NodeId;

struct IsolatedStartError : Error {
  using Error::Error;
};
struct EmptyGraphError : Error {
  using Error::Error;
};

// K-hop sampling parameters. hop_k is the number of intermediate nodes
// between consecutive emitted nodes; sample_length counts emitted nodes, so
// the underlying walk visits sample_length*(hop_k+1) nodes.
struct WalkConfig {
  std::uint32_t hop_k = 1;
  std::uint32_t iterations_per_node = 30;
  std::uint32_t sample_length = 100;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

// Raw first-order walk; consecutive nodes are graph-adjacent.
struct Walk {
  std::vector<NodeId> nodes;
};

struct Corpus {
  std::vector<std::vector<NodeId>> sequences;
  WalkConfig config;
  std::uint32_t skipped_isolated = 0;
};

// Uniform first-order random walk of `steps` transitions starting at
// `start`. Truncates early at a dead end (cannot happen on an undirected
// graph when start has an edge). Throws IsolatedStartError if degree 0.
Walk random_walk(const HeteroGraph& g, NodeId start, std::uint32_t steps,
                 Rng& rng);

// Emits every (hop_k+1)-th node of the walk: [w0, w[k+1], w[2(k+1)], ...].
// Consecutive emitted nodes are separated by exactly hop_k intermediate
// nodes along the walk; hop_k=0 returns the walk unchanged.
std::vector<NodeId> stride_sample(const Walk& walk, std::uint32_t hop_k);

// Runs iterations_per_node walks from every node with degree >= 1 and
// stride-samples each. Sequences are ordered by (start node id, iteration);
// each (start, iteration) pair draws from its own seed-derived stream, so
// the output depends only on the seed. Sequences shorter than 2 emitted
// nodes are dropped. If raw_out is given, the raw walks are stored in
// emission order for replay checks.
Corpus generate_corpus(const HeteroGraph& g, const WalkConfig& config,
                       std::vector<Walk>* raw_out = nullptr);

// OpenMP variant; identical output to generate_corpus for any worker count.
Corpus generate_corpus_parallel(const HeteroGraph& g, const WalkConfig& config,
                                int workers);

// Corpus file: one sequence per line, space-separated external node keys;
// leading '#' comments record k, iterations, length and seed.
void save_corpus(const Corpus& corpus, const HeteroGraph& g,
                 const std::filesystem::path& path,
                 const std::vector<std::string>& extra_header = {});

}  // namespace hopwalk::sampler
