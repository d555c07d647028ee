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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hopwalk/graph.hpp"

namespace hopwalk::datagen {

struct ParseError : Error {
  using Error::Error;
};
struct EmptySplitError : Error {
  using Error::Error;
};

// One bibliography line: paper key, publication year, authors, optional venue.
struct BiblioRecord {
  std::string paper;
  int year = 0;
  std::vector<std::string> authors;
  std::string venue;  // empty = none
};

struct ParseIssue {
  std::size_t line_no = 0;
  std::string message;
};

struct ParseResult {
  std::vector<BiblioRecord> records;
  std::vector<ParseIssue> issues;  // malformed lines, skipped
};

// Record format, one per line: "<paper>\t<year>\t<author|author|...>[\t<venue>]".
// Malformed lines are collected as issues; a file with data lines but zero
// parsable records raises ParseError.
ParseResult parse_records(std::istream& in, const std::string& source_name = "<stream>");
ParseResult load_records(const std::filesystem::path& path);
void save_records(std::span<const BiblioRecord> records,
                  const std::filesystem::path& path,
                  const std::vector<std::string>& extra_header = {});

struct TimeSplit {
  int train_end_year = 2008;  // inclusive
  int eval_end_year = 2011;   // inclusive
  void validate() const;
};

struct SplitResult {
  graph::HeteroGraph train;
  // Unordered evaluation-window co-author pairs (prefixed author keys),
  // deduplicated, in first-appearance order.
  std::vector<std::pair<std::string, std::string>> eval_pairs;
  std::size_t train_records = 0;
  std::size_t eval_records = 0;
  std::size_t dropped_records = 0;  // beyond the eval window
};

// Splits records by year: the train side becomes the heterogeneous
// author--paper--venue graph; the eval side becomes co-author pairs.
// Node keys are namespaced as "author:x" / "paper:x" / "venue:x".
// Throws EmptySplitError when either side is empty.
SplitResult build_split(std::span<const BiblioRecord> records, const TimeSplit& split);

// Planted-community bibliography generator. Every author writes
// papers_per_author papers, each co-authored with one other author from the
// same community (or, with probability cross_community_paper_fraction, from
// a different one) and published in a venue of the owner's community.
// Evaluation pairs are same-community author pairs with no co-written paper,
// sampled at eval_pair_fraction; with random_eval_pairs they are drawn from
// all author pairs instead, ignoring community structure.
struct SyntheticConfig {
  std::uint32_t communities = 3;
  std::uint32_t authors_per_community = 100;
  std::uint32_t papers_per_author = 5;
  std::uint32_t venues_per_community = 2;
  double cross_community_paper_fraction = 0.15;
  double eval_pair_fraction = 0.1;
  bool random_eval_pairs = false;
  std::uint64_t rng_seed = 1;
  void validate() const;
};

// The graph and eval pairs directly, without a records round trip.
SplitResult generate_synthetic(const SyntheticConfig& config);

// The same fixture as records: train papers carry years within the default
// train window, eval pairs become two-author records in the eval window, so
// build_split() over these reproduces generate_synthetic() exactly.
std::vector<BiblioRecord> synthetic_records(const SyntheticConfig& config);

}  // namespace hopwalk::datagen
