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

#include "hopwalk/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "hopwalk/embedding.hpp"
#include "hopwalk/sampler.hpp"
#include "hopwalk/util.hpp"

namespace hopwalk::pipeline {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kSaltSynth = 0x53594e54;   // "SYNT"
constexpr std::uint64_t kSaltNeg = 0x4e454741;     // "NEGA"
constexpr std::uint64_t kSaltSample = 0x53414d50;  // "SAMP"
constexpr std::uint64_t kSaltTrain = 0x5452414e;   // "TRAN"
constexpr std::uint64_t kSaltEval = 0x4556414c;    // "EVAL"

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_int(std::string_view value, const std::string& key) {
  T out{};
  auto sv = trim(value);
  auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out);
  if (ec != std::errc() || ptr != sv.data() + sv.size()) {
    throw Error("bad integer for " + key + ": '" + std::string(sv) + "'");
  }
  return out;
}

double parse_real(std::string_view value, const std::string& key) {
  double out = 0.0;
  auto sv = trim(value);
  auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), out);
  if (ec != std::errc() || ptr != sv.data() + sv.size()) {
    throw Error("bad number for " + key + ": '" + std::string(sv) + "'");
  }
  return out;
}

bool parse_bool(std::string_view value, const std::string& key) {
  auto sv = trim(value);
  if (sv == "true" || sv == "1" || sv == "yes" || sv == "on") return true;
  if (sv == "false" || sv == "0" || sv == "no" || sv == "off") return false;
  throw Error("bad boolean for " + key + ": '" + std::string(sv) + "'");
}

std::vector<std::uint32_t> parse_hops(std::string_view value) {
  std::vector<std::uint32_t> hops;
  for (auto part : split(value, ',')) {
    hops.push_back(parse_int<std::uint32_t>(part, "hops"));
  }
  return hops;
}

// Digest of a stage's parameters and input files; outputs embed it in their
// header so unchanged stages can be skipped.
std::string stage_digest(const std::string& stage, const std::string& params,
                         const std::vector<fs::path>& inputs) {
  std::string material = stage + "|" + params;
  for (const auto& p : inputs) {
    material += "|";
    material += hex16(fnv1a64_file(p));
  }
  return hex16(fnv1a64(material));
}

bool output_matches(const fs::path& path, const std::string& digest) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  std::string needle = "digest=" + digest;
  int scanned = 0;
  while (scanned++ < 32 && std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] != '#') break;
    if (line.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::string describe_synth(const datagen::SyntheticConfig& s) {
  std::ostringstream o;
  o << "communities=" << s.communities << ";authors=" << s.authors_per_community
    << ";papers=" << s.papers_per_author << ";venues=" << s.venues_per_community
    << ";cross=" << fmt_double(s.cross_community_paper_fraction, 17)
    << ";evalfrac=" << fmt_double(s.eval_pair_fraction, 17)
    << ";random_eval=" << (s.random_eval_pairs ? 1 : 0) << ";seed=" << s.rng_seed;
  return o.str();
}

std::string format_mean_std(double mean, double std_dev) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f +/- %.3f", mean, std_dev);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  if (hops.empty()) throw Error("at least one hop distance is required");
  std::set<std::uint32_t> uniq(hops.begin(), hops.end());
  if (uniq.size() != hops.size()) throw Error("duplicate hop distances");
  if (workers < 1) throw Error("workers must be positive");
  if (train_workers < 1) throw Error("train_workers must be positive");
  if (out_dir.empty()) throw Error("out_dir must not be empty");
  split.validate();
  if (records.empty()) synth.validate();
  sampler::WalkConfig{hops[0], iterations, length, 1}.validate();
  embedding::TrainConfig tc;
  tc.dim = dim;
  tc.window = window;
  tc.negatives = negatives;
  tc.epochs = epochs;
  tc.lr_start = lr_start;
  tc.lr_end = lr_end;
  tc.ns_exponent = ns_exponent;
  tc.validate();
  if (repeats == 0) throw Error("repeats must be positive");
  if (!(train_ratio > 0.0) || !(train_ratio < 1.0)) {
    throw Error("train_ratio must lie in (0, 1)");
  }
}

void set_option(RunConfig& cfg, const std::string& section, const std::string& key,
                const std::string& value) {
  auto is = [&](const char* s, const char* k) { return section == s && key == k; };
  if (is("data", "records")) {
    cfg.records = std::string(trim(value));
  } else if (is("data", "train_end_year")) {
    cfg.split.train_end_year = parse_int<int>(value, key);
  } else if (is("data", "eval_end_year")) {
    cfg.split.eval_end_year = parse_int<int>(value, key);
  } else if (is("data", "communities")) {
    cfg.synth.communities = parse_int<std::uint32_t>(value, key);
  } else if (is("data", "authors_per_community")) {
    cfg.synth.authors_per_community = parse_int<std::uint32_t>(value, key);
  } else if (is("data", "papers_per_author")) {
    cfg.synth.papers_per_author = parse_int<std::uint32_t>(value, key);
  } else if (is("data", "venues_per_community")) {
    cfg.synth.venues_per_community = parse_int<std::uint32_t>(value, key);
  } else if (is("data", "cross_fraction")) {
    cfg.synth.cross_community_paper_fraction = parse_real(value, key);
  } else if (is("data", "eval_fraction")) {
    cfg.synth.eval_pair_fraction = parse_real(value, key);
  } else if (is("data", "random_eval_pairs")) {
    cfg.synth.random_eval_pairs = parse_bool(value, key);
  } else if (is("sample", "hops")) {
    cfg.hops = parse_hops(value);
  } else if (is("sample", "iterations")) {
    cfg.iterations = parse_int<std::uint32_t>(value, key);
  } else if (is("sample", "length")) {
    cfg.length = parse_int<std::uint32_t>(value, key);
  } else if (is("train", "dim")) {
    cfg.dim = parse_int<std::uint32_t>(value, key);
  } else if (is("train", "window")) {
    cfg.window = parse_int<std::uint32_t>(value, key);
  } else if (is("train", "negatives")) {
    cfg.negatives = parse_int<std::uint32_t>(value, key);
  } else if (is("train", "epochs")) {
    cfg.epochs = parse_int<std::uint32_t>(value, key);
  } else if (is("train", "lr_start")) {
    cfg.lr_start = parse_real(value, key);
  } else if (is("train", "lr_end")) {
    cfg.lr_end = parse_real(value, key);
  } else if (is("train", "ns_exponent")) {
    cfg.ns_exponent = parse_real(value, key);
  } else if (is("train", "concat")) {
    cfg.concat = parse_bool(value, key);
  } else if (is("train", "train_workers")) {
    cfg.train_workers = parse_int<int>(value, key);
  } else if (is("evaluate", "repeats")) {
    cfg.repeats = parse_int<std::uint32_t>(value, key);
  } else if (is("evaluate", "train_ratio")) {
    cfg.train_ratio = parse_real(value, key);
  } else if (is("run", "seed")) {
    cfg.seed = parse_int<std::uint64_t>(value, key);
  } else if (is("run", "workers")) {
    cfg.workers = parse_int<int>(value, key);
  } else if (is("run", "out_dir")) {
    cfg.out_dir = std::string(trim(value));
  } else {
    throw Error("unknown config option " + section + "." + key);
  }
}

RunConfig parse_config(std::istream& in, const std::string& source_name) {
  RunConfig cfg;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    auto sv = trim(line);
    if (sv.empty()) continue;
    try {
      if (sv.front() == '[') {
        if (sv.back() != ']') throw Error("unterminated section header");
        section = std::string(trim(sv.substr(1, sv.size() - 2)));
        continue;
      }
      auto eq = sv.find('=');
      if (eq == std::string_view::npos) throw Error("expected key = value");
      if (section.empty()) throw Error("option before any [section] header");
      std::string key(trim(sv.substr(0, eq)));
      std::string value(trim(sv.substr(eq + 1)));
      set_option(cfg, section, key, value);
    } catch (const Error& e) {
      throw Error(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_config(in, path.string());
}

IngestStats run_ingest(const IngestOptions& opts, std::ostream* log) {
  datagen::SplitResult sr;
  if (opts.records.empty()) {
    sr = datagen::generate_synthetic(opts.synth);
    if (log) {
      *log << "[ingest] synthetic fixture: " << sr.train_records
           << " train records, " << sr.eval_pairs.size() << " eval pairs\n";
    }
  } else {
    auto parsed = datagen::load_records(opts.records);
    if (log) {
      for (std::size_t i = 0; i < parsed.issues.size() && i < 10; ++i) {
        *log << "[ingest] warning: line " << parsed.issues[i].line_no << ": "
             << parsed.issues[i].message << "\n";
      }
      if (parsed.issues.size() > 10) {
        *log << "[ingest] warning: " << (parsed.issues.size() - 10)
             << " further malformed lines\n";
      }
    }
    sr = datagen::build_split(parsed.records, opts.split);
  }

  linkpred::ExtractStats es;
  auto positives = linkpred::extract_positive_pairs(sr.train, sr.eval_pairs, &es);
  Rng rng(opts.neg_seed);
  auto negatives = linkpred::sample_negative_pairs(positives, sr.train,
                                                   positives.size(), rng);
  auto set = linkpred::make_labeled_set(positives, negatives);

  graph::save_edge_list(sr.train, opts.graph_path, opts.header_extra);
  linkpred::save_pairs(set, opts.pairs_path, opts.header_extra);

  IngestStats stats;
  stats.nodes = sr.train.node_count();
  stats.edges = sr.train.edge_count();
  stats.train_records = sr.train_records;
  stats.eval_records = sr.eval_records;
  stats.extract = es;
  stats.pairs_written = set.pairs.size();
  if (log) {
    *log << "[ingest] graph: " << stats.nodes << " nodes, " << stats.edges
         << " edges -> " << opts.graph_path.string() << "\n"
         << "[ingest] pairs: " << positives.size() << " new-collaboration positives"
         << " (of " << es.input_pairs << " eval pairs; " << es.skipped_not_new
         << " had a common paper, " << es.skipped_unknown_author
         << " unknown, " << es.duplicates << " duplicate), " << negatives.size()
         << " negatives -> " << opts.pairs_path.string() << "\n";
  }
  return stats;
}

// Table 1 shape: classifiers as rows, methods as columns.
std::string format_table(const std::vector<MethodResult>& methods) {
  std::vector<std::string> classifiers;
  if (!methods.empty()) {
    for (const auto& r : methods.front().reports) classifiers.push_back(r.classifier);
  }
  std::size_t name_w = 10;
  for (const auto& c : classifiers) name_w = std::max(name_w, c.size());
  constexpr std::size_t cell_w = 17;
  std::string out;
  out += "classifier";
  out.append(name_w + 2 - 10, ' ');
  for (const auto& m : methods) {
    out += m.method;
    out.append(cell_w - std::min(cell_w - 1, m.method.size()), ' ');
  }
  out += '\n';
  for (std::size_t c = 0; c < classifiers.size(); ++c) {
    out += classifiers[c];
    out.append(name_w + 2 - classifiers[c].size(), ' ');
    for (const auto& m : methods) {
      const auto& r = m.reports.at(c);
      auto cell = format_mean_std(r.mean_auc, r.std_auc);
      out += cell;
      out.append(cell_w - cell.size(), ' ');
    }
    out += '\n';
  }
  return out;
}

std::string format_records(const std::vector<MethodResult>& methods,
                           std::uint64_t seed) {
  std::string out;
  for (const auto& m : methods) {
    for (const auto& r : m.reports) {
      out += "method=" + m.method;
      out += "\tclassifier=" + r.classifier;
      out += "\tmean_auc=" + fmt_double(r.mean_auc);
      out += "\tstd_auc=" + fmt_double(r.std_auc);
      out += "\trepeats=" + std::to_string(r.per_repeat_auc.size());
      out += "\ttrain_ratio=" + fmt_double(r.config.train_ratio);
      out += "\tseed=" + std::to_string(seed);
      out += "\taucs=";
      for (std::size_t i = 0; i < r.per_repeat_auc.size(); ++i) {
        if (i) out += ',';
        out += fmt_double(r.per_repeat_auc[i]);
      }
      out += '\n';
    }
  }
  return out;
}

std::vector<MethodResult> run_evaluate(const EvaluateOptions& opts,
                                       std::ostream* log) {
  auto pairs = linkpred::load_pairs(opts.pairs_path);
  std::vector<MethodResult> methods;
  for (const auto& [name, path] : opts.embeddings) {
    auto emb = embedding::load_embeddings(path);
    MethodResult mr;
    mr.method = name;
    mr.reports = linkpred::evaluate_parallel(emb, pairs, opts.eval, opts.workers);
    if (log) {
      *log << "[eval] " << name << ":";
      for (const auto& r : mr.reports) {
        *log << " " << r.classifier << " " << format_mean_std(r.mean_auc, r.std_auc);
      }
      *log << "\n";
    }
    methods.push_back(std::move(mr));
  }
  if (!opts.table_path.empty()) {
    std::string text = "# hopwalk evaluation report\n";
    for (const auto& h : opts.header_extra) text += "# " + h + "\n";
    text += format_table(methods);
    write_text_file(opts.table_path, text);
  }
  if (!opts.records_path.empty()) {
    std::string text = "# hopwalk evaluation records\n";
    for (const auto& h : opts.header_extra) text += "# " + h + "\n";
    text += format_records(methods, opts.eval.rng_seed);
    write_text_file(opts.records_path, text);
  }
  return methods;
}

PipelineResult run(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  PipelineResult result;

  auto mark = [&](bool skipped, const std::string& stage) {
    (skipped ? result.stages_skipped : result.stages_run).push_back(stage);
    if (log && skipped) *log << "[skip] " << stage << " is up to date\n";
  };

  // ingest
  fs::path graph_path = dir / "graph.tsv";
  fs::path pairs_path = dir / "pairs.tsv";
  const std::uint64_t neg_seed = Rng::derive(cfg.seed, kSaltNeg);
  datagen::SyntheticConfig synth = cfg.synth;
  synth.rng_seed = Rng::derive(cfg.seed, kSaltSynth);
  std::string ingest_params = "split=" + std::to_string(cfg.split.train_end_year) +
                              "," + std::to_string(cfg.split.eval_end_year) +
                              ";neg_seed=" + std::to_string(neg_seed);
  std::vector<fs::path> ingest_inputs;
  if (cfg.records.empty()) {
    ingest_params += ";" + describe_synth(synth);
  } else {
    ingest_inputs.push_back(cfg.records);
  }
  std::string d_ingest = stage_digest("ingest", ingest_params, ingest_inputs);
  if (output_matches(graph_path, d_ingest) && output_matches(pairs_path, d_ingest)) {
    mark(true, "ingest");
  } else {
    IngestOptions io;
    io.records = cfg.records;
    io.split = cfg.split;
    io.synth = synth;
    io.neg_seed = neg_seed;
    io.graph_path = graph_path;
    io.pairs_path = pairs_path;
    io.header_extra = {"digest=" + d_ingest, "config: " + ingest_params};
    run_ingest(io, log);
    mark(false, "ingest");
  }

  // sample + train per hop distance
  std::optional<graph::HeteroGraph> cached_graph;
  auto train_graph = [&]() -> const graph::HeteroGraph& {
    if (!cached_graph) cached_graph = graph::load_edge_list(graph_path);
    return *cached_graph;
  };

  std::vector<std::pair<std::string, fs::path>> method_files;
  std::vector<fs::path> emb_paths;
  for (std::uint32_t k : cfg.hops) {
    fs::path corpus_path = dir / ("corpus_k" + std::to_string(k) + ".txt");
    sampler::WalkConfig wcfg;
    wcfg.hop_k = k;
    wcfg.iterations_per_node = cfg.iterations;
    wcfg.sample_length = cfg.length;
    wcfg.rng_seed = Rng::derive(cfg.seed, kSaltSample, k);
    std::string sparams = "k=" + std::to_string(k) +
                          ";iterations=" + std::to_string(wcfg.iterations_per_node) +
                          ";length=" + std::to_string(wcfg.sample_length) +
                          ";seed=" + std::to_string(wcfg.rng_seed);
    std::string d_sample = stage_digest("sample", sparams, {graph_path});
    if (output_matches(corpus_path, d_sample)) {
      mark(true, "sample k=" + std::to_string(k));
    } else {
      auto corpus = sampler::generate_corpus_parallel(train_graph(), wcfg, cfg.workers);
      sampler::save_corpus(corpus, train_graph(), corpus_path, {"digest=" + d_sample});
      if (log) {
        *log << "[sample] k=" << k << ": " << corpus.sequences.size()
             << " sequences -> " << corpus_path.string() << "\n";
      }
      mark(false, "sample k=" + std::to_string(k));
    }

    fs::path emb_path = dir / ("emb_k" + std::to_string(k) + ".txt");
    embedding::TrainConfig tcfg;
    tcfg.dim = cfg.dim;
    tcfg.window = cfg.window;
    tcfg.negatives = cfg.negatives;
    tcfg.epochs = cfg.epochs;
    tcfg.lr_start = cfg.lr_start;
    tcfg.lr_end = cfg.lr_end;
    tcfg.ns_exponent = cfg.ns_exponent;
    tcfg.rng_seed = Rng::derive(cfg.seed, kSaltTrain, k);
    std::string tparams = "dim=" + std::to_string(tcfg.dim) +
                          ";window=" + std::to_string(tcfg.window) +
                          ";negatives=" + std::to_string(tcfg.negatives) +
                          ";epochs=" + std::to_string(tcfg.epochs) +
                          ";lr=" + fmt_double(tcfg.lr_start, 17) + "," +
                          fmt_double(tcfg.lr_end, 17) +
                          ";ns=" + fmt_double(tcfg.ns_exponent, 17) +
                          ";seed=" + std::to_string(tcfg.rng_seed) +
                          ";train_workers=" + std::to_string(cfg.train_workers);
    std::string d_train = stage_digest("train", tparams, {corpus_path});
    if (output_matches(emb_path, d_train)) {
      mark(true, "train k=" + std::to_string(k));
    } else {
      auto corpus = embedding::load_corpus(corpus_path);
      auto emb = cfg.train_workers > 1
                     ? embedding::train_parallel(corpus, tcfg, cfg.train_workers)
                     : embedding::train(corpus, tcfg);
      embedding::save_embeddings(emb, emb_path,
                                 {"digest=" + d_train, "config: " + tparams});
      if (log) {
        *log << "[train] k=" << k << ": " << emb.vocab.size() << " vectors, dim "
             << emb.dim << " -> " << emb_path.string() << "\n";
      }
      mark(false, "train k=" + std::to_string(k));
    }
    method_files.emplace_back("RW-K" + std::to_string(k), emb_path);
    emb_paths.push_back(emb_path);
  }

  // concat
  if (cfg.concat && cfg.hops.size() >= 2) {
    fs::path concat_path = dir / "emb_concat.txt";
    std::string d_concat = stage_digest("concat", "n=" + std::to_string(emb_paths.size()),
                                        emb_paths);
    if (output_matches(concat_path, d_concat)) {
      mark(true, "concat");
    } else {
      std::vector<embedding::EmbeddingMatrix> parts;
      parts.reserve(emb_paths.size());
      for (const auto& p : emb_paths) parts.push_back(embedding::load_embeddings(p));
      auto joined = embedding::concat(parts);
      embedding::save_embeddings(joined, concat_path, {"digest=" + d_concat});
      if (log) {
        *log << "[concat] dim " << joined.dim << " -> " << concat_path.string() << "\n";
      }
      mark(false, "concat");
    }
    method_files.emplace_back("Concat", concat_path);
  }

  // evaluate: always from the files on disk, so fresh and resumed runs agree
  EvaluateOptions eo;
  eo.pairs_path = pairs_path;
  eo.embeddings = method_files;
  eo.eval.repeats = cfg.repeats;
  eo.eval.train_ratio = cfg.train_ratio;
  eo.eval.rng_seed = Rng::derive(cfg.seed, kSaltEval);
  eo.workers = cfg.workers;
  eo.table_path = dir / "report.txt";
  eo.records_path = dir / "report.tsv";
  // The report alone reproduces the run: echo the whole configuration.
  std::string hop_list;
  for (std::size_t i = 0; i < cfg.hops.size(); ++i) {
    if (i) hop_list += ',';
    hop_list += std::to_string(cfg.hops[i]);
  }
  eo.header_extra = {
      "config: seed=" + std::to_string(cfg.seed) + ";hops=" + hop_list +
          ";iterations=" + std::to_string(cfg.iterations) +
          ";length=" + std::to_string(cfg.length) + ";dim=" + std::to_string(cfg.dim) +
          ";window=" + std::to_string(cfg.window) +
          ";negatives=" + std::to_string(cfg.negatives) +
          ";epochs=" + std::to_string(cfg.epochs) +
          ";lr=" + fmt_double(cfg.lr_start, 17) + "," + fmt_double(cfg.lr_end, 17) +
          ";ns=" + fmt_double(cfg.ns_exponent, 17) +
          ";repeats=" + std::to_string(cfg.repeats) +
          ";train_ratio=" + fmt_double(cfg.train_ratio, 17) + ";" + ingest_params,
  };
  result.methods = run_evaluate(eo, log);
  mark(false, "evaluate");
  result.table_path = eo.table_path;
  result.records_path = eo.records_path;
  if (log) *log << "[report] " << eo.table_path.string() << "\n";
  return result;
}

}  // namespace hopwalk::pipeline
