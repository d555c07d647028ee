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
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hopwalk/datagen.hpp"
#include "hopwalk/linkpred.hpp"

namespace hopwalk::pipeline {

// End-to-end run configuration. Defaults are sized for the bundled
// synthetic fixture; stages derive their RNG streams from `seed`.
struct RunConfig {
  // [data] empty records path selects the synthetic fixture
  std::string records;
  datagen::TimeSplit split;
  datagen::SyntheticConfig synth;
  // [sample]
  std::vector<std::uint32_t> hops = {0, 1, 2};
  std::uint32_t iterations = 12;
  std::uint32_t length = 40;
  // [train]
  std::uint32_t dim = 32;
  std::uint32_t window = 5;
  std::uint32_t negatives = 5;
  std::uint32_t epochs = 4;
  double lr_start = 0.025;
  double lr_end = 0.0001;
  double ns_exponent = 0.75;
  bool concat = true;
  // Hogwild training when > 1; that makes runs irreproducible, so it is a
  // separate knob from `workers` and defaults to serial.
  int train_workers = 1;
  // [evaluate]
  std::uint32_t repeats = 10;
  double train_ratio = 0.8;
  // [run]
  std::uint64_t seed = 1;
  int workers = 1;  // sampling/evaluation parallelism; output-invariant
  std::string out_dir = "hopwalk_run";

  void validate() const;
};

// INI-style config: [section] headers, key = value lines, '#' comments.
RunConfig parse_config(std::istream& in, const std::string& source_name = "<stream>");
RunConfig load_config(const std::filesystem::path& path);
// Applies one "section.key=value" override; throws on unknown keys.
void set_option(RunConfig& cfg, const std::string& section, const std::string& key,
                const std::string& value);

struct IngestOptions {
  std::string records;  // empty => synthetic
  datagen::TimeSplit split;
  datagen::SyntheticConfig synth;
  std::uint64_t neg_seed = 1;
  std::filesystem::path graph_path;
  std::filesystem::path pairs_path;
  std::vector<std::string> header_extra;
};

struct IngestStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t train_records = 0;
  std::size_t eval_records = 0;
  linkpred::ExtractStats extract;
  std::size_t pairs_written = 0;
};

// Builds the train graph and the balanced labeled pair file: evaluation
// pairs filtered to *new* collaborations, plus an equal number of sampled
// negatives.
IngestStats run_ingest(const IngestOptions& opts, std::ostream* log = nullptr);

struct MethodResult {
  std::string method;
  std::vector<linkpred::EvalReport> reports;  // per classifier
};

struct EvaluateOptions {
  std::filesystem::path pairs_path;
  std::vector<std::pair<std::string, std::filesystem::path>> embeddings;
  linkpred::EvalConfig eval;
  int workers = 1;
  std::filesystem::path table_path;    // empty => skip writing
  std::filesystem::path records_path;  // empty => skip writing
  std::vector<std::string> header_extra;
};

std::vector<MethodResult> run_evaluate(const EvaluateOptions& opts,
                                       std::ostream* log = nullptr);

// Human-readable table (classifier rows x method columns) and
// machine-readable tab-separated key=value records for the same results.
std::string format_table(const std::vector<MethodResult>& methods);
std::string format_records(const std::vector<MethodResult>& methods,
                           std::uint64_t seed);

struct PipelineResult {
  std::vector<MethodResult> methods;
  std::filesystem::path table_path;
  std::filesystem::path records_path;
  std::vector<std::string> stages_run;
  std::vector<std::string> stages_skipped;
};

// Runs ingest -> sample -> train -> concat -> evaluate inside cfg.out_dir.
// Stages whose outputs already carry the digest of their inputs and
// parameters are skipped; evaluation always runs from the files on disk, so
// fresh and resumed runs report identical results.
PipelineResult run(const RunConfig& cfg, std::ostream* log = nullptr);

}  // namespace hopwalk::pipeline
