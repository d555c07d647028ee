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

#include "hopwalk/embedding.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace hopwalk::embedding {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -log sigmoid(x) without overflow for large |x|.
double neg_log_sigmoid(double x) {
  if (x >= 0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

void TrainConfig::validate() const {
  if (dim < 1) throw Error("dim must be >= 1");
  if (window < 1) throw Error("window must be >= 1");
  if (negatives < 1) throw Error("negatives must be >= 1");
  if (epochs < 1) throw Error("epochs must be >= 1");
  if (!(lr_end > 0.0) || lr_end > lr_start) {
    throw Error("learning rate schedule requires 0 < lr_end <= lr_start");
  }
  if (ns_exponent < 0.0) throw Error("ns_exponent must be >= 0");
}

std::uint32_t Vocabulary::row_of(const std::string& key) const {
  auto it = index.find(key);
  if (it == index.end()) {
    throw UnknownNodeError("key '" + key + "' not in vocabulary");
  }
  return it->second;
}

namespace {

template <typename Seq, typename KeyOf>
TokenCorpus index_sequences(const std::vector<Seq>& sequences, KeyOf key_of) {
  TokenCorpus tc;
  tc.sequences.reserve(sequences.size());
  for (const auto& seq : sequences) {
    std::vector<std::uint32_t> rows;
    rows.reserve(seq.size());
    for (const auto& token : seq) {
      const std::string& key = key_of(token);
      auto [it, inserted] =
          tc.vocab.index.try_emplace(key, tc.vocab.size());
      if (inserted) {
        tc.vocab.keys.push_back(key);
        tc.vocab.counts.push_back(0);
      }
      ++tc.vocab.counts[it->second];
      rows.push_back(it->second);
    }
    tc.vocab.total_tokens += rows.size();
    tc.sequences.push_back(std::move(rows));
  }
  if (tc.vocab.total_tokens == 0) {
    throw EmptyCorpusError("corpus has no tokens");
  }
  return tc;
}

}  // namespace

TokenCorpus build_vocab(
    const std::vector<std::vector<std::string>>& sequences) {
  return index_sequences(sequences,
                         [](const std::string& k) -> const std::string& {
                           return k;
                         });
}

TokenCorpus from_walk_corpus(const sampler::Corpus& corpus,
                             const graph::HeteroGraph& g) {
  return index_sequences(corpus.sequences,
                         [&g](graph::NodeId id) -> const std::string& {
                           return g.key_of(id);
                         });
}

TokenCorpus load_corpus(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> sequences;
  for (const auto& [line_no, line] : read_data_lines(path)) {
    std::vector<std::string> seq;
    for (auto tok : split(line, ' ')) {
      if (!tok.empty()) seq.emplace_back(tok);
    }
    if (!seq.empty()) sequences.push_back(std::move(seq));
  }
  if (sequences.empty()) {
    throw EmptyCorpusError("corpus file has no sequences: " + path.string());
  }
  return build_vocab(sequences);
}

AliasTable::AliasTable(std::span<const double> weights) {
  const std::uint32_t n = static_cast<std::uint32_t>(weights.size());
  if (n == 0) throw Error("alias table needs at least one weight");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) throw Error("alias weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0.0) throw Error("alias weights sum to zero");

  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  normalized_.resize(n);
  std::vector<double> scaled(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    normalized_[i] = weights[i] / total;
    scaled[i] = normalized_[i] * n;
  }

  std::vector<std::uint32_t> small, large;
  small.reserve(n);
  large.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    std::uint32_t s = small.back();
    small.pop_back();
    std::uint32_t l = large.back();
    large.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (std::uint32_t i : large) prob_[i] = 1.0;
  for (std::uint32_t i : small) prob_[i] = 1.0;
}

std::uint32_t AliasTable::draw(Rng& rng) const {
  std::uint32_t col = static_cast<std::uint32_t>(rng.uniform_index(size()));
  return rng.uniform_real() < prob_[col] ? col : alias_[col];
}

double AliasTable::probability(std::uint32_t i) const {
  return normalized_.at(i);
}

AliasTable negative_table(const Vocabulary& vocab, double ns_exponent) {
  if (vocab.size() == 0) throw Error("empty vocabulary");
  std::vector<double> weights(vocab.size());
  for (std::uint32_t i = 0; i < vocab.size(); ++i) {
    weights[i] = std::pow(static_cast<double>(vocab.counts[i]), ns_exponent);
  }
  return AliasTable(weights);
}

double sgns_pair_loss(std::span<const double> center,
                      std::span<const double> context,
                      const std::vector<std::vector<double>>& negatives) {
  double loss = neg_log_sigmoid(dot(center, context));
  for (const auto& n : negatives) {
    loss += neg_log_sigmoid(-dot(center, std::span<const double>(n)));
  }
  return loss;
}

double sgns_step_with_negatives(EmbeddingMatrix& m, std::uint32_t center,
                                std::uint32_t context,
                                std::span<const std::uint32_t> negatives,
                                double lr, bool compute_loss) {
  if (center >= m.vocab.size() || context >= m.vocab.size()) {
    throw UnknownNodeError("center/context row out of range");
  }
  const std::uint32_t dim = m.dim;
  double* in_center = m.input.data() + static_cast<std::size_t>(center) * dim;

  // Targets: context with label 1, then negatives with label 0. All dot
  // products are taken before any row moves, so duplicates among the
  // negatives still yield the exact gradient of the summed loss.
  const std::size_t n_targets = 1 + negatives.size();
  double loss = 0.0;
  std::vector<double> residual(n_targets);
  std::vector<const double*> out_rows(n_targets);
  for (std::size_t t = 0; t < n_targets; ++t) {
    const std::uint32_t row = t == 0 ? context : negatives[t - 1];
    if (row >= m.vocab.size()) throw UnknownNodeError("negative row out of range");
    const double* out = m.output.data() + static_cast<std::size_t>(row) * dim;
    out_rows[t] = out;
    double d = 0.0;
    for (std::uint32_t j = 0; j < dim; ++j) d += in_center[j] * out[j];
    const double label = t == 0 ? 1.0 : 0.0;
    residual[t] = sigmoid(d) - label;
    if (compute_loss) loss += neg_log_sigmoid(t == 0 ? d : -d);
  }

  std::vector<double> center_grad(dim, 0.0);
  for (std::size_t t = 0; t < n_targets; ++t) {
    const double g = residual[t];
    const double* out = out_rows[t];
    for (std::uint32_t j = 0; j < dim; ++j) center_grad[j] += g * out[j];
  }
  for (std::size_t t = 0; t < n_targets; ++t) {
    const std::uint32_t row = t == 0 ? context : negatives[t - 1];
    double* out = m.output.data() + static_cast<std::size_t>(row) * dim;
    const double g = residual[t];
    for (std::uint32_t j = 0; j < dim; ++j) out[j] -= lr * g * in_center[j];
  }
  for (std::uint32_t j = 0; j < dim; ++j) in_center[j] -= lr * center_grad[j];
  return loss;
}

double sgns_step(EmbeddingMatrix& m, const AliasTable& table,
                 std::uint32_t center, std::uint32_t context,
                 std::uint32_t negatives, double lr, Rng& rng,
                 bool compute_loss) {
  std::vector<std::uint32_t> drawn;
  drawn.reserve(negatives);
  for (std::uint32_t k = 0; k < negatives; ++k) {
    std::uint32_t candidate = table.draw(rng);
    for (int attempt = 0; candidate == context && attempt < 100; ++attempt) {
      candidate = table.draw(rng);
    }
    if (candidate == context) continue;  // 100 redraws failed; skip the slot
    drawn.push_back(candidate);
  }
  return sgns_step_with_negatives(m, center, context, drawn, lr, compute_loss);
}

namespace {

EmbeddingMatrix init_matrix(const Vocabulary& vocab, const TrainConfig& cfg) {
  EmbeddingMatrix m;
  m.vocab = vocab;
  m.dim = cfg.dim;
  const std::size_t cells =
      static_cast<std::size_t>(vocab.size()) * cfg.dim;
  m.input.resize(cells);
  m.output.assign(cells, 0.0);
  Rng rng(Rng::derive(cfg.rng_seed, 0x494e4954));  // init stream
  const double scale = 1.0 / cfg.dim;
  for (std::size_t i = 0; i < cells; ++i) {
    m.input[i] = (rng.uniform_real() - 0.5) * scale;
  }
  return m;
}

struct TokenSpanTrainer {
  EmbeddingMatrix& m;
  const AliasTable& table;
  const TrainConfig& cfg;
  double lr_span;  // lr_start - lr_end

  // Trains all pairs for one token position; returns (loss, pairs).
  std::pair<double, std::uint64_t> token(
      const std::vector<std::uint32_t>& seq, std::size_t pos,
      std::uint64_t processed, std::uint64_t total, Rng& rng,
      bool compute_loss) {
    double lr =
        cfg.lr_start - lr_span * (static_cast<double>(processed) /
                                  static_cast<double>(total));
    if (lr < cfg.lr_end) lr = cfg.lr_end;
    const std::uint32_t radius =
        1 + static_cast<std::uint32_t>(rng.uniform_index(cfg.window));
    const std::size_t lo = pos >= radius ? pos - radius : 0;
    const std::size_t hi = std::min(pos + radius, seq.size() - 1);
    double loss = 0.0;
    std::uint64_t pairs = 0;
    for (std::size_t c = lo; c <= hi; ++c) {
      if (c == pos) continue;
      loss += sgns_step(m, table, seq[pos], seq[c], cfg.negatives, lr, rng,
                        compute_loss);
      ++pairs;
    }
    return {loss, pairs};
  }
};

}  // namespace

EmbeddingMatrix train(const TokenCorpus& corpus, const TrainConfig& config,
                      std::vector<double>* epoch_mean_loss) {
  config.validate();
  if (corpus.vocab.total_tokens == 0) throw EmptyCorpusError("empty corpus");

  EmbeddingMatrix m = init_matrix(corpus.vocab, config);
  AliasTable table = negative_table(corpus.vocab, config.ns_exponent);
  TokenSpanTrainer trainer{m, table, config, config.lr_start - config.lr_end};

  const std::uint64_t total =
      static_cast<std::uint64_t>(config.epochs) * corpus.vocab.total_tokens;
  const bool record = epoch_mean_loss != nullptr;
  if (record) epoch_mean_loss->clear();

  std::uint64_t processed = 0;
  Rng rng(Rng::derive(config.rng_seed, 0x54524149));  // train stream
  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss = 0.0;
    std::uint64_t epoch_pairs = 0;
    for (const auto& seq : corpus.sequences) {
      for (std::size_t pos = 0; pos < seq.size(); ++pos) {
        auto [loss, pairs] =
            trainer.token(seq, pos, processed, total, rng, record);
        epoch_loss += loss;
        epoch_pairs += pairs;
        ++processed;
      }
    }
    if (record) {
      epoch_mean_loss->push_back(epoch_pairs ? epoch_loss / epoch_pairs : 0.0);
    }
  }
  m.vocab.total_tokens = corpus.vocab.total_tokens;
  return m;
}

EmbeddingMatrix train_parallel(const TokenCorpus& corpus,
                               const TrainConfig& config, int workers) {
  if (workers <= 1) return train(corpus, config);
  config.validate();
  if (corpus.vocab.total_tokens == 0) throw EmptyCorpusError("empty corpus");

  EmbeddingMatrix m = init_matrix(corpus.vocab, config);
  AliasTable table = negative_table(corpus.vocab, config.ns_exponent);

  const std::uint64_t total =
      static_cast<std::uint64_t>(config.epochs) * corpus.vocab.total_tokens;
  std::atomic<std::uint64_t> processed{0};
  const std::int64_t n_seq = static_cast<std::int64_t>(corpus.sequences.size());

  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
#pragma omp parallel num_threads(workers)
    {
      TokenSpanTrainer trainer{m, table, config,
                               config.lr_start - config.lr_end};
#pragma omp for schedule(dynamic, 16)
      for (std::int64_t s = 0; s < n_seq; ++s) {
        const auto& seq = corpus.sequences[static_cast<std::size_t>(s)];
        Rng rng(Rng::derive(config.rng_seed, 0x50415231 + epoch, s));
        std::uint64_t done =
            processed.fetch_add(seq.size(), std::memory_order_relaxed);
        for (std::size_t pos = 0; pos < seq.size(); ++pos) {
          trainer.token(seq, pos, done + pos, total, rng, false);
        }
      }
    }
  }
  m.vocab.total_tokens = corpus.vocab.total_tokens;
  return m;
}

EmbeddingMatrix concat(std::span<const EmbeddingMatrix> matrices) {
  if (matrices.empty()) throw Error("concat needs at least one matrix");
  const EmbeddingMatrix& first = matrices.front();

  std::uint32_t out_dim = 0;
  for (const auto& m : matrices) {
    out_dim += m.dim;
    if (m.vocab.size() != first.vocab.size()) {
      throw VocabMismatchError("vocabulary sizes differ: " +
                               std::to_string(m.vocab.size()) + " vs " +
                               std::to_string(first.vocab.size()));
    }
    for (const auto& key : first.vocab.keys) {
      if (!m.vocab.index.contains(key)) {
        throw VocabMismatchError("node '" + key +
                                 "' missing from one input matrix");
      }
    }
  }

  EmbeddingMatrix out;
  out.vocab = first.vocab;
  out.dim = out_dim;
  out.input.resize(static_cast<std::size_t>(first.vocab.size()) * out_dim);
  for (std::uint32_t r = 0; r < first.vocab.size(); ++r) {
    double* dst = out.input.data() + static_cast<std::size_t>(r) * out_dim;
    for (const auto& m : matrices) {
      auto src = m.row(m.vocab.row_of(first.vocab.keys[r]));
      dst = std::copy(src.begin(), src.end(), dst);
    }
  }
  return out;
}

void save_embeddings(const EmbeddingMatrix& m,
                     const std::filesystem::path& path,
                     const std::vector<std::string>& extra_header) {
  std::ostringstream out;
  out << "# hopwalk embeddings\n";
  for (const auto& line : extra_header) out << "# " << line << "\n";
  out << m.vocab.size() << ' ' << m.dim << '\n';
  for (std::uint32_t r = 0; r < m.vocab.size(); ++r) {
    out << m.vocab.keys[r];
    for (double v : m.row(r)) out << ' ' << fmt_double(v);
    out << '\n';
  }
  write_text_file(path, out.str());
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  auto lines = read_data_lines(path);
  if (lines.empty()) throw IoError("empty embedding file: " + path.string());

  std::istringstream header(lines[0].second);
  std::uint32_t vocab_size = 0, dim = 0;
  if (!(header >> vocab_size >> dim) || dim == 0) {
    throw IoError(path.string() + ": bad header, expected '<vocab> <dim>'");
  }
  if (lines.size() != static_cast<std::size_t>(vocab_size) + 1) {
    throw IoError(path.string() + ": expected " + std::to_string(vocab_size) +
                  " rows, found " + std::to_string(lines.size() - 1));
  }

  EmbeddingMatrix m;
  m.dim = dim;
  m.input.resize(static_cast<std::size_t>(vocab_size) * dim);
  m.vocab.counts.assign(vocab_size, 0);
  for (std::uint32_t r = 0; r < vocab_size; ++r) {
    const auto& [line_no, line] = lines[r + 1];
    std::istringstream in(line);
    std::string key;
    if (!(in >> key)) {
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": missing key");
    }
    m.vocab.keys.push_back(key);
    m.vocab.index.emplace(key, r);
    double* row = m.input.data() + static_cast<std::size_t>(r) * dim;
    for (std::uint32_t j = 0; j < dim; ++j) {
      if (!(in >> row[j])) {
        throw IoError(path.string() + ":" + std::to_string(line_no) +
                      ": expected " + std::to_string(dim) + " values");
      }
    }
  }
  if (m.vocab.index.size() != vocab_size) {
    throw IoError(path.string() + ": duplicate keys");
  }
  return m;
}

}  // namespace hopwalk::embedding
