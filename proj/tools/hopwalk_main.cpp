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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hopwalk/datagen.hpp"
#include "hopwalk/embedding.hpp"
#include "hopwalk/graph.hpp"
#include "hopwalk/linkpred.hpp"
#include "hopwalk/pipeline.hpp"
#include "hopwalk/sampler.hpp"
#include "hopwalk/util.hpp"

namespace fs = std::filesystem;
using namespace hopwalk;

namespace {

// Seed precedence: --seed flag, HOPWALK_SEED, then a fresh random seed that
// is printed so the run can be reproduced.
std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t flag_value) {
  if (seed_opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("HOPWALK_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(std::string("HOPWALK_SEED is not an integer: '") + env + "'");
    }
  }
  std::random_device rd;
  std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  std::cout << "seed=" << seed
            << " (auto-generated; pass --seed or set HOPWALK_SEED to reproduce)\n";
  return seed;
}

struct SynthFlags {
  datagen::SyntheticConfig cfg;

  void attach(CLI::App* cmd) {
    cmd->add_option("--communities", cfg.communities, "Planted communities")
        ->capture_default_str();
    cmd->add_option("--authors", cfg.authors_per_community, "Authors per community")
        ->capture_default_str();
    cmd->add_option("--papers", cfg.papers_per_author, "Papers per author")
        ->capture_default_str();
    cmd->add_option("--venues", cfg.venues_per_community,
                    "Venues per community (0 = no venue nodes)")
        ->capture_default_str();
    cmd->add_option("--cross-fraction", cfg.cross_community_paper_fraction,
                    "Probability a paper picks its co-author from another community")
        ->capture_default_str();
    cmd->add_option("--eval-fraction", cfg.eval_pair_fraction,
                    "Fraction of eligible pairs used as eval positives")
        ->capture_default_str();
    cmd->add_flag("--random-eval-pairs", cfg.random_eval_pairs,
                  "Draw eval pairs from all author pairs, ignoring communities");
  }
};

int run_command(CLI::App& app, int argc, char** argv);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hopwalk: K-hop random-walk node embeddings and link prediction"};
  app.set_version_flag("--version", "hopwalk 0.1.0");
  app.require_subcommand(1);
  try {
    return run_command(app, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

namespace {

int run_command(CLI::App& app, int argc, char** argv) {
  // ---- synth ----------------------------------------------------------
  auto* synth = app.add_subcommand(
      "synth", "Write a synthetic bibliography records file");
  SynthFlags synth_flags;
  std::string synth_out;
  std::uint64_t synth_seed = 0;
  synth->add_option("--out", synth_out, "Records file to write")->required();
  synth_flags.attach(synth);
  auto* synth_seed_opt = synth->add_option("--seed", synth_seed, "RNG seed");

  // ---- ingest ---------------------------------------------------------
  auto* ingest = app.add_subcommand(
      "ingest", "Build the train graph and labeled pair file from records");
  std::string in_records;
  bool in_synthetic = false;
  datagen::TimeSplit in_split;
  SynthFlags in_synth_flags;
  std::string in_graph = "graph.tsv", in_pairs = "pairs.tsv";
  std::uint64_t in_seed = 0;
  ingest->add_option("--records", in_records, "Bibliography records file")
      ->check(CLI::ExistingFile);
  ingest->add_flag("--synthetic", in_synthetic, "Use the synthetic fixture instead");
  ingest->add_option("--train-end", in_split.train_end_year,
                     "Last year of the train window")
      ->capture_default_str();
  ingest->add_option("--eval-end", in_split.eval_end_year,
                     "Last year of the eval window")
      ->capture_default_str();
  in_synth_flags.attach(ingest);
  ingest->add_option("--out-graph", in_graph, "Edge list to write")
      ->capture_default_str();
  ingest->add_option("--out-pairs", in_pairs, "Labeled pair file to write")
      ->capture_default_str();
  auto* in_seed_opt = ingest->add_option("--seed", in_seed, "RNG seed");

  // ---- sample ---------------------------------------------------------
  auto* sample = app.add_subcommand(
      "sample", "Generate a K-hop random-walk corpus from an edge list");
  std::string sm_graph, sm_out;
  sampler::WalkConfig sm_cfg;
  std::uint64_t sm_seed = 0;
  int sm_workers = 1;
  sample->add_option("--graph", sm_graph, "Edge list file")
      ->required()
      ->check(CLI::ExistingFile);
  sample->add_option("--k", sm_cfg.hop_k, "Hop distance between emitted nodes")
      ->capture_default_str();
  sample->add_option("--iterations", sm_cfg.iterations_per_node,
                     "Walks per start node")
      ->capture_default_str();
  sample->add_option("--length", sm_cfg.sample_length, "Emitted nodes per walk")
      ->capture_default_str();
  sample->add_option("--workers", sm_workers, "Worker threads (output-invariant)")
      ->capture_default_str();
  sample->add_option("--out", sm_out, "Corpus file to write")->required();
  auto* sm_seed_opt = sample->add_option("--seed", sm_seed, "RNG seed");

  // ---- train ----------------------------------------------------------
  auto* train = app.add_subcommand(
      "train", "Train skip-gram embeddings with negative sampling on a corpus");
  std::string tr_corpus, tr_out;
  embedding::TrainConfig tr_cfg;
  std::uint64_t tr_seed = 0;
  int tr_workers = 1;
  train->add_option("--corpus", tr_corpus, "Corpus file")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--dim", tr_cfg.dim, "Embedding dimension")->capture_default_str();
  train->add_option("--window", tr_cfg.window, "Max context radius")
      ->capture_default_str();
  train->add_option("--negatives", tr_cfg.negatives, "Negative samples per pair")
      ->capture_default_str();
  train->add_option("--epochs", tr_cfg.epochs, "Training epochs")->capture_default_str();
  train->add_option("--lr-start", tr_cfg.lr_start, "Initial learning rate")
      ->capture_default_str();
  train->add_option("--lr-end", tr_cfg.lr_end, "Final learning rate")
      ->capture_default_str();
  train->add_option("--ns-exponent", tr_cfg.ns_exponent,
                    "Negative-table count exponent")
      ->capture_default_str();
  train->add_option("--workers", tr_workers,
                    "Hogwild threads (>1 is not reproducible)")
      ->capture_default_str();
  train->add_option("--out", tr_out, "Embedding file to write")->required();
  auto* tr_seed_opt = train->add_option("--seed", tr_seed, "RNG seed");

  // ---- concat ---------------------------------------------------------
  auto* concat = app.add_subcommand(
      "concat", "Concatenate embeddings over a shared vocabulary");
  std::vector<std::string> cc_inputs;
  std::string cc_out;
  concat->add_option("inputs", cc_inputs, "Embedding files")
      ->required()
      ->expected(1, -1)
      ->check(CLI::ExistingFile);
  concat->add_option("--out", cc_out, "Embedding file to write")->required();

  // ---- evaluate -------------------------------------------------------
  auto* evaluate = app.add_subcommand(
      "evaluate", "Score embeddings on labeled pairs with repeated splits");
  std::string ev_pairs;
  std::vector<std::string> ev_embs;
  linkpred::EvalConfig ev_cfg;
  std::uint64_t ev_seed = 0;
  int ev_workers = 1;
  std::string ev_table, ev_records;
  evaluate->add_option("--pairs", ev_pairs, "Labeled pair file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--emb", ev_embs, "NAME=PATH embedding file (repeatable)")
      ->required();
  evaluate->add_option("--repeats", ev_cfg.repeats, "Shuffled split repeats")
      ->capture_default_str();
  evaluate->add_option("--ratio", ev_cfg.train_ratio, "Train fraction per split")
      ->capture_default_str();
  evaluate->add_option("--workers", ev_workers, "Worker threads (output-invariant)")
      ->capture_default_str();
  evaluate->add_option("--out-table", ev_table, "Write the report table here");
  evaluate->add_option("--out-records", ev_records, "Write key=value records here");
  auto* ev_seed_opt = evaluate->add_option("--seed", ev_seed, "RNG seed");

  // ---- pipeline -------------------------------------------------------
  auto* pipe = app.add_subcommand(
      "pipeline", "Run ingest -> sample -> train -> concat -> evaluate");
  std::string pp_config;
  std::vector<std::string> pp_sets;
  std::string pp_out_dir, pp_records;
  std::uint64_t pp_seed = 0;
  int pp_workers = 0;
  pipe->add_option("--config", pp_config, "INI-style run configuration")
      ->check(CLI::ExistingFile);
  pipe->add_option("--set", pp_sets,
                   "Override one option as section.key=value (repeatable)");
  pipe->add_option("--out-dir", pp_out_dir, "Artifact directory");
  pipe->add_option("--records", pp_records, "Bibliography records file")
      ->check(CLI::ExistingFile);
  pipe->add_option("--workers", pp_workers, "Worker threads (output-invariant)");
  auto* pp_seed_opt = pipe->add_option("--seed", pp_seed, "Run seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (*synth) {
    synth_flags.cfg.rng_seed = resolve_seed(synth_seed_opt, synth_seed);
    auto records = datagen::synthetic_records(synth_flags.cfg);
    datagen::save_records(records, synth_out,
                          {"seed=" + std::to_string(synth_flags.cfg.rng_seed)});
    std::cout << "wrote " << records.size() << " records to " << synth_out << "\n";
    return 0;
  }

  if (*ingest) {
    if (in_records.empty() == !in_synthetic) {
      std::cerr << "error: pass exactly one of --records or --synthetic\n";
      return 2;
    }
    std::uint64_t seed = resolve_seed(in_seed_opt, in_seed);
    pipeline::IngestOptions opts;
    opts.records = in_records;
    opts.split = in_split;
    opts.synth = in_synth_flags.cfg;
    opts.synth.rng_seed = seed;
    opts.neg_seed = Rng::derive(seed, 1);
    opts.graph_path = in_graph;
    opts.pairs_path = in_pairs;
    opts.header_extra = {"seed=" + std::to_string(seed)};
    pipeline::run_ingest(opts, &std::cout);
    return 0;
  }

  if (*sample) {
    sm_cfg.rng_seed = resolve_seed(sm_seed_opt, sm_seed);
    auto g = graph::load_edge_list(sm_graph);
    auto corpus = sampler::generate_corpus_parallel(g, sm_cfg, sm_workers);
    sampler::save_corpus(corpus, g, sm_out);
    std::cout << "wrote " << corpus.sequences.size() << " sequences to " << sm_out
              << " (k=" << sm_cfg.hop_k << ", skipped "
              << corpus.skipped_isolated << " isolated starts)\n";
    return 0;
  }

  if (*train) {
    tr_cfg.rng_seed = resolve_seed(tr_seed_opt, tr_seed);
    if (tr_workers > 1) {
      std::cout << "note: " << tr_workers
                << " hogwild workers; output is not reproducible\n";
    }
    auto corpus = embedding::load_corpus(tr_corpus);
    auto emb = tr_workers > 1 ? embedding::train_parallel(corpus, tr_cfg, tr_workers)
                              : embedding::train(corpus, tr_cfg);
    embedding::save_embeddings(emb, tr_out,
                               {"seed=" + std::to_string(tr_cfg.rng_seed)});
    std::cout << "wrote " << emb.vocab.size() << " x " << emb.dim
              << " embeddings to " << tr_out << "\n";
    return 0;
  }

  if (*concat) {
    std::vector<embedding::EmbeddingMatrix> parts;
    parts.reserve(cc_inputs.size());
    for (const auto& p : cc_inputs) parts.push_back(embedding::load_embeddings(p));
    auto joined = embedding::concat(parts);
    embedding::save_embeddings(joined, cc_out);
    std::cout << "wrote " << joined.vocab.size() << " x " << joined.dim
              << " embeddings to " << cc_out << "\n";
    return 0;
  }

  if (*evaluate) {
    ev_cfg.rng_seed = resolve_seed(ev_seed_opt, ev_seed);
    pipeline::EvaluateOptions opts;
    opts.pairs_path = ev_pairs;
    for (const auto& spec : ev_embs) {
      auto pos = spec.find('=');
      std::string name = pos == std::string::npos
                             ? fs::path(spec).stem().string()
                             : spec.substr(0, pos);
      std::string path = pos == std::string::npos ? spec : spec.substr(pos + 1);
      if (!fs::exists(path)) {
        std::cerr << "error: input path does not exist: " << path << "\n";
        return 2;
      }
      opts.embeddings.emplace_back(name, path);
    }
    opts.eval = ev_cfg;
    opts.workers = ev_workers;
    opts.table_path = ev_table;
    opts.records_path = ev_records;
    opts.header_extra = {"seed=" + std::to_string(ev_cfg.rng_seed) +
                         " repeats=" + std::to_string(ev_cfg.repeats)};
    auto methods = pipeline::run_evaluate(opts, nullptr);
    std::cout << pipeline::format_table(methods);
    return 0;
  }

  if (*pipe) {
    pipeline::RunConfig cfg;
    if (!pp_config.empty()) cfg = pipeline::load_config(pp_config);
    if (pp_seed_opt->count() > 0) {
      cfg.seed = pp_seed;
    } else if (pp_config.empty()) {
      cfg.seed = resolve_seed(pp_seed_opt, pp_seed);
    }
    if (!pp_out_dir.empty()) cfg.out_dir = pp_out_dir;
    if (!pp_records.empty()) cfg.records = pp_records;
    if (pp_workers > 0) cfg.workers = pp_workers;
    for (const auto& kv : pp_sets) {
      auto dot = kv.find('.');
      auto eq = kv.find('=', dot == std::string::npos ? 0 : dot);
      if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
        std::cerr << "error: --set expects section.key=value, got '" << kv << "'\n";
        return 2;
      }
      try {
        pipeline::set_option(cfg, kv.substr(0, dot), kv.substr(dot + 1, eq - dot - 1),
                             kv.substr(eq + 1));
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
    }
    auto result = pipeline::run(cfg, &std::cout);
    std::cout << "\n" << pipeline::format_table(result.methods);
    return 0;
  }

  return 0;
}

}  // namespace
