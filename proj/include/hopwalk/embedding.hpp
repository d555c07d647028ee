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
#include <unordered_map>
#include <vector>

#include "hopwalk/rand.hpp"
#include "hopwalk/sampler.hpp"

namespace hopwalk::embedding {

struct EmptyCorpusError : Error {
  using Error::Error;
};
struct UnknownNodeError : Error {
  using Error::Error;
};
struct VocabMismatchError : Error {
  using Error::Error;
};

struct TrainConfig {
  std::uint32_t dim = 128;
  std::uint32_t window = 5;
  std::uint32_t negatives = 5;
  std::uint32_t epochs = 5;
  double lr_start = 0.025;
  double lr_end = 0.0001;
  double ns_exponent = 0.75;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

// Tokens that appear in the corpus, in order of first appearance. Every node
// is kept; there is no minimum-count filtering.
struct Vocabulary {
  std::vector<std::string> keys;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, std::uint32_t> index;
  std::uint64_t total_tokens = 0;

  std::uint32_t size() const { return static_cast<std::uint32_t>(keys.size()); }
  std::uint32_t row_of(const std::string& key) const;
};

// A corpus re-indexed against its vocabulary: sequences of row indices.
struct TokenCorpus {
  Vocabulary vocab;
  std::vector<std::vector<std::uint32_t>> sequences;
};

TokenCorpus build_vocab(const std::vector<std::vector<std::string>>& sequences);
TokenCorpus from_walk_corpus(const sampler::Corpus& corpus,
                             const graph::HeteroGraph& g);
TokenCorpus load_corpus(const std::filesystem::path& path);

// Walker's alias method: O(n) construction, O(1) exact draws from an
// arbitrary discrete distribution.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights);

  std::uint32_t draw(Rng& rng) const;
  double probability(std::uint32_t i) const;  // exact normalized mass
  std::uint32_t size() const { return static_cast<std::uint32_t>(prob_.size()); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
  std::vector<double> normalized_;
};

// Noise distribution over vocabulary rows: P(n) ∝ count(n)^ns_exponent.
AliasTable negative_table(const Vocabulary& vocab, double ns_exponent);

struct EmbeddingMatrix {
  Vocabulary vocab;
  std::uint32_t dim = 0;
  std::vector<double> input;   // |V| x dim, the published embedding
  std::vector<double> output;  // |V| x dim context weights; training only

  std::span<double> row(std::uint32_t r) {
    return std::span<double>(input.data() + static_cast<std::size_t>(r) * dim,
                             dim);
  }
  std::span<const double> row(std::uint32_t r) const {
    return std::span<const double>(
        input.data() + static_cast<std::size_t>(r) * dim, dim);
  }
  std::span<double> out_row(std::uint32_t r) {
    return std::span<double>(output.data() + static_cast<std::size_t>(r) * dim,
                             dim);
  }
  std::span<const double> out_row(std::uint32_t r) const {
    return std::span<const double>(
        output.data() + static_cast<std::size_t>(r) * dim, dim);
  }
};

// Objective for one (center, context, negatives) example:
//   -log sigmoid(center . context) - sum_n log sigmoid(-(center . n))
double sgns_pair_loss(std::span<const double> center,
                      std::span<const double> context,
                      const std::vector<std::vector<double>>& negatives);

// One SGD step with the negatives given explicitly. All gradients are
// evaluated at the incoming parameter values, then applied: the input row of
// center and the output rows of context and negatives move by -lr * grad.
// Returns the example's loss before the update when compute_loss is set.
double sgns_step_with_negatives(EmbeddingMatrix& m, std::uint32_t center,
                                std::uint32_t context,
                                std::span<const std::uint32_t> negatives,
                                double lr, bool compute_loss = false);

// Draws config-many negatives from the table (a draw equal to the context is
// redrawn up to 100 times, then skipped) and applies one step.
double sgns_step(EmbeddingMatrix& m, const AliasTable& table,
                 std::uint32_t center, std::uint32_t context,
                 std::uint32_t negatives, double lr, Rng& rng,
                 bool compute_loss = false);

// Deterministic single-worker training: epochs passes over the corpus in
// order, each token paired with every context inside a freshly drawn radius
// in [1, window], learning rate decaying linearly per processed token.
// Bit-reproducible for a fixed seed. If epoch_mean_loss is given, the mean
// pre-update example loss of each epoch is recorded there.
EmbeddingMatrix train(const TokenCorpus& corpus, const TrainConfig& config,
                      std::vector<double>* epoch_mean_loss = nullptr);

// Lock-free OpenMP training: workers apply unsynchronized updates to shared
// parameters. Not deterministic for workers > 1 (workers == 1 falls back to
// train()).
EmbeddingMatrix train_parallel(const TokenCorpus& corpus,
                               const TrainConfig& config, int workers);

// Row-wise concatenation, aligned by key. All inputs must cover the same key
// set; the result keeps the first matrix's row order.
EmbeddingMatrix concat(std::span<const EmbeddingMatrix> matrices);

// Text format: leading '#' comments, then "<vocab_size> <dim>", then one
// node per line: "<key> <v1> ... <vdim>". Round-trips to 1e-6.
void save_embeddings(const EmbeddingMatrix& m, const std::filesystem::path& path,
                     const std::vector<std::string>& extra_header = {});
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

}  // namespace hopwalk::embedding
