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

#include "hopwalk/sampler.hpp"

#include <sstream>
#include <string>

namespace hopwalk::sampler {

void WalkConfig::validate() const {
  if (iterations_per_node < 1) throw Error("iterations_per_node must be >= 1");
  if (sample_length < 2) throw Error("sample_length must be >= 2");
}

Walk random_walk(const HeteroGraph& g, NodeId start, std::uint32_t steps,
                 Rng& rng) {
  if (g.degree(start) == 0) {
    throw IsolatedStartError("walk start " + g.key_of(start) +
                             " has degree 0");
  }
  if (steps < 1) throw Error("steps must be >= 1");

  Walk walk;
  walk.nodes.reserve(steps + 1);
  walk.nodes.push_back(start);
  NodeId current = start;
  for (std::uint32_t s = 0; s < steps; ++s) {
    auto ns = g.neighbors(current);
    if (ns.empty()) break;  // dead end; unreachable on undirected graphs
    current = ns[rng.uniform_index(ns.size())];
    walk.nodes.push_back(current);
  }
  return walk;
}

std::vector<NodeId> stride_sample(const Walk& walk, std::uint32_t hop_k) {
  if (walk.nodes.empty()) throw Error("stride_sample on empty walk");
  const std::size_t stride = static_cast<std::size_t>(hop_k) + 1;
  std::vector<NodeId> emitted;
  emitted.reserve(walk.nodes.size() / stride + 1);
  for (std::size_t i = 0; i < walk.nodes.size(); i += stride) {
    emitted.push_back(walk.nodes[i]);
  }
  return emitted;
}

namespace {

// Walk steps so that the emitted sequence has exactly sample_length nodes:
// the raw walk holds sample_length*(k+1) nodes.
std::uint32_t raw_steps(const WalkConfig& c) {
  return c.sample_length * (c.hop_k + 1) - 1;
}

std::vector<NodeId> start_nodes(const HeteroGraph& g,
                                std::uint32_t* skipped) {
  std::vector<NodeId> starts;
  starts.reserve(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (g.degree(u) >= 1) {
      starts.push_back(u);
    } else {
      ++*skipped;
    }
  }
  return starts;
}

}  // namespace

Corpus generate_corpus(const HeteroGraph& g, const WalkConfig& config,
                       std::vector<Walk>* raw_out) {
  config.validate();
  if (g.node_count() == 0) throw EmptyGraphError("graph has no nodes");

  Corpus corpus;
  corpus.config = config;
  const std::uint32_t steps = raw_steps(config);
  auto starts = start_nodes(g, &corpus.skipped_isolated);
  corpus.sequences.reserve(starts.size() * config.iterations_per_node);

  for (NodeId start : starts) {
    for (std::uint32_t it = 0; it < config.iterations_per_node; ++it) {
      Rng rng(Rng::derive(config.rng_seed, start, it));
      Walk walk = random_walk(g, start, steps, rng);
      auto emitted = stride_sample(walk, config.hop_k);
      if (emitted.size() < 2) continue;
      if (raw_out) raw_out->push_back(std::move(walk));
      corpus.sequences.push_back(std::move(emitted));
    }
  }
  return corpus;
}

Corpus generate_corpus_parallel(const HeteroGraph& g, const WalkConfig& config,
                                int workers) {
  config.validate();
  if (g.node_count() == 0) throw EmptyGraphError("graph has no nodes");
  if (workers < 1) workers = 1;

  Corpus corpus;
  corpus.config = config;
  const std::uint32_t steps = raw_steps(config);
  auto starts = start_nodes(g, &corpus.skipped_isolated);

  const std::uint32_t iters = config.iterations_per_node;
  const std::int64_t jobs =
      static_cast<std::int64_t>(starts.size()) * iters;
  std::vector<std::vector<NodeId>> slots(jobs);

#pragma omp parallel for schedule(dynamic, 64) num_threads(workers)
  for (std::int64_t j = 0; j < jobs; ++j) {
    const NodeId start = starts[static_cast<std::size_t>(j / iters)];
    const std::uint32_t it = static_cast<std::uint32_t>(j % iters);
    Rng rng(Rng::derive(config.rng_seed, start, it));
    Walk walk = random_walk(g, start, steps, rng);
    slots[j] = stride_sample(walk, config.hop_k);
  }

  corpus.sequences.reserve(slots.size());
  for (auto& s : slots) {
    if (s.size() >= 2) corpus.sequences.push_back(std::move(s));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const HeteroGraph& g,
                 const std::filesystem::path& path,
                 const std::vector<std::string>& extra_header) {
  std::ostringstream out;
  out << "# hopwalk corpus\n";
  out << "# k=" << corpus.config.hop_k
      << " iterations=" << corpus.config.iterations_per_node
      << " length=" << corpus.config.sample_length
      << " seed=" << corpus.config.rng_seed
      << " sequences=" << corpus.sequences.size()
      << " skipped_isolated=" << corpus.skipped_isolated << "\n";
  for (const auto& line : extra_header) out << "# " << line << "\n";
  for (const auto& seq : corpus.sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i > 0) out << ' ';
      out << g.key_of(seq[i]);
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

}  // namespace hopwalk::sampler
