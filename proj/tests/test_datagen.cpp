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
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hopwalk/datagen.hpp"
#include "test_util.hpp"

using namespace hopwalk;
using namespace hopwalk::datagen;

namespace {

// extracts c from "author:a<c>_<i>"
int community_of(const std::string& key) {
  auto us = key.find('_');
  return std::stoi(key.substr(8, us - 8));
}

std::set<std::string> node_keys(const graph::HeteroGraph& g) {
  std::set<std::string> keys;
  for (graph::NodeId u = 0; u < g.node_count(); ++u) keys.insert(g.key_of(u));
  return keys;
}

}  // namespace

TEST_CASE("parse_records: good lines, issues collected, comments skipped") {
  std::istringstream in(
      "# comment\n"
      "\n"
      "p1\t2001\talice|bob\tkdd\n"
      "p2\t2002\tcarol\n"
      "p3\tnot_a_year\talice\n"
      "p4\t2003\n"
      "\t2004\talice\n"
      "p6\t2005\t||\n"
      "p7\t2006\tbob|bob|dave\tsigir\n");
  auto result = parse_records(in, "test");
  REQUIRE(result.records.size() == 3);

  CHECK(result.records[0].paper == "p1");
  CHECK(result.records[0].year == 2001);
  CHECK(result.records[0].authors == std::vector<std::string>{"alice", "bob"});
  CHECK(result.records[0].venue == "kdd");

  CHECK(result.records[1].paper == "p2");
  CHECK(result.records[1].venue.empty());

  // duplicate author collapsed within the record
  CHECK(result.records[2].authors == std::vector<std::string>{"bob", "dave"});

  REQUIRE(result.issues.size() == 4);
  CHECK(result.issues[0].line_no == 5);  // bad year
  CHECK(result.issues[1].line_no == 6);  // 2 fields
  CHECK(result.issues[2].line_no == 7);  // empty paper
  CHECK(result.issues[3].line_no == 8);  // no authors
}

TEST_CASE("parse_records: all lines malformed raises ParseError") {
  std::istringstream bad("oops\nstill bad\n");
  CHECK_THROWS_AS(parse_records(bad, "bad"), ParseError);

  std::istringstream empty("# only comments\n\n");
  auto result = parse_records(empty, "empty");
  CHECK(result.records.empty());
  CHECK(result.issues.empty());
}

TEST_CASE("records round-trip through save and load") {
  testutil::TempDir tmp("records");
  std::vector<BiblioRecord> recs = {
      {"p1", 2001, {"alice", "bob"}, "kdd"},
      {"p2", 2009, {"carol"}, ""},
  };
  auto path = tmp.file("recs.tsv");
  save_records(recs, path, {"seed=5"});
  auto text = testutil::slurp(path);
  CHECK(text.find("# seed=5") != std::string::npos);
  CHECK(text.find("p1\t2001\talice|bob\tkdd\n") != std::string::npos);
  CHECK(text.find("p2\t2009\tcarol\n") != std::string::npos);

  auto loaded = load_records(path);
  REQUIRE(loaded.records.size() == 2);
  CHECK(loaded.records[0].paper == recs[0].paper);
  CHECK(loaded.records[0].year == recs[0].year);
  CHECK(loaded.records[0].authors == recs[0].authors);
  CHECK(loaded.records[0].venue == recs[0].venue);
  CHECK(loaded.records[1].venue.empty());

  CHECK_THROWS_AS(load_records(tmp.file("missing.tsv")), IoError);
}

TEST_CASE("build_split: hand-checked year split") {
  std::vector<BiblioRecord> recs = {
      {"p1", 2000, {"a", "b"}, "v1"},
      {"p2", 2008, {"b", "c"}, ""},
      {"p3", 2009, {"a", "c"}, ""},
      {"p4", 2010, {"c", "d", "e"}, "v2"},
      {"p5", 2012, {"a", "d"}, ""},  // beyond the window
  };
  auto split = build_split(recs, TimeSplit{});

  CHECK(split.train_records == 2);
  CHECK(split.eval_records == 2);
  CHECK(split.dropped_records == 1);

  // train graph: authors a,b,c + papers p1,p2 + venue v1
  CHECK(split.train.node_count() == 6);
  CHECK(split.train.edge_count() == 5);
  auto keys = node_keys(split.train);
  CHECK(keys == std::set<std::string>{"author:a", "author:b", "author:c",
                                      "paper:p1", "paper:p2", "venue:v1"});

  // eval pairs in first-appearance order, canonical within each pair
  std::vector<std::pair<std::string, std::string>> expect = {
      {"author:a", "author:c"},
      {"author:c", "author:d"},
      {"author:c", "author:e"},
      {"author:d", "author:e"},
  };
  CHECK(split.eval_pairs == expect);
}

TEST_CASE("build_split: deduplicates repeated eval pairs") {
  std::vector<BiblioRecord> recs = {
      {"p1", 2000, {"a", "b"}, ""},
      {"p2", 2009, {"c", "d"}, ""},
      {"p3", 2010, {"d", "c"}, ""},  // same pair, either order
  };
  auto split = build_split(recs, TimeSplit{});
  REQUIRE(split.eval_pairs.size() == 1);
  CHECK(split.eval_pairs[0] == std::pair<std::string, std::string>{"author:c", "author:d"});
}

TEST_CASE("build_split: empty sides raise EmptySplitError") {
  std::vector<BiblioRecord> train_only = {{"p1", 2000, {"a", "b"}, ""}};
  CHECK_THROWS_AS(build_split(train_only, TimeSplit{}), EmptySplitError);

  std::vector<BiblioRecord> eval_only = {{"p1", 2009, {"a", "b"}, ""}};
  CHECK_THROWS_AS(build_split(eval_only, TimeSplit{}), EmptySplitError);

  // eval window with only single-author records has no pairs
  std::vector<BiblioRecord> no_pairs = {{"p1", 2000, {"a", "b"}, ""},
                                        {"p2", 2009, {"c"}, ""}};
  CHECK_THROWS_AS(build_split(no_pairs, TimeSplit{}), EmptySplitError);

  CHECK_THROWS_AS((TimeSplit{2010, 2010}.validate()), Error);
  CHECK_THROWS_AS(build_split(train_only, TimeSplit{2012, 2010}), Error);
}

TEST_CASE("generate_synthetic: node counts follow the config") {
  SyntheticConfig cfg;
  cfg.communities = 2;
  cfg.authors_per_community = 10;
  cfg.papers_per_author = 2;
  cfg.venues_per_community = 1;
  cfg.rng_seed = 5;
  auto result = generate_synthetic(cfg);
  // 20 authors + 40 papers + 2 venues
  CHECK(result.train.node_count() == 62);
  // every paper: 2 author edges + 1 venue edge
  CHECK(result.train.edge_count() == 120);
  CHECK(result.train_records == 40);
  result.train.validate();

  // venueless bipartite variant drops the venue nodes and edges
  cfg.venues_per_community = 0;
  auto flat = generate_synthetic(cfg);
  CHECK(flat.train.node_count() == 60);
  CHECK(flat.train.edge_count() == 80);
  CHECK(flat.train.type_count() == 2);
}

TEST_CASE("generate_synthetic: eval pairs are same-community non-coauthors") {
  SyntheticConfig cfg;
  cfg.communities = 3;
  cfg.authors_per_community = 20;
  cfg.papers_per_author = 3;
  cfg.eval_pair_fraction = 0.1;
  cfg.rng_seed = 42;
  auto result = generate_synthetic(cfg);
  REQUIRE(!result.eval_pairs.empty());

  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [u, v] : result.eval_pairs) {
    CHECK(u < v);  // canonical order
    CHECK(community_of(u) == community_of(v));
    CHECK(seen.insert({u, v}).second);  // unique
    auto ui = result.train.find(u);
    auto vi = result.train.find(v);
    REQUIRE(ui);
    REQUIRE(vi);
    CHECK(!result.train.has_common_neighbor(*ui, *vi));
  }
}

TEST_CASE("generate_synthetic: random_eval_pairs ignores communities") {
  SyntheticConfig cfg;
  cfg.communities = 3;
  cfg.authors_per_community = 8;
  cfg.papers_per_author = 2;
  cfg.eval_pair_fraction = 0.5;
  cfg.random_eval_pairs = true;
  cfg.rng_seed = 7;
  auto result = generate_synthetic(cfg);
  REQUIRE(result.eval_pairs.size() >= 20);
  std::size_t crossing = 0;
  for (const auto& [u, v] : result.eval_pairs) {
    crossing += community_of(u) != community_of(v);
    auto ui = result.train.find(u);
    auto vi = result.train.find(v);
    REQUIRE(ui);
    CHECK(!result.train.has_common_neighbor(*ui, *vi));
  }
  // ~70% of all author pairs cross communities
  CHECK(crossing > 0);
}

TEST_CASE("generate_synthetic is deterministic in the seed") {
  SyntheticConfig cfg;
  cfg.authors_per_community = 15;
  cfg.rng_seed = 99;
  auto a = generate_synthetic(cfg);
  auto b = generate_synthetic(cfg);
  CHECK(a.eval_pairs == b.eval_pairs);
  CHECK(node_keys(a.train) == node_keys(b.train));
  CHECK(a.train.edge_count() == b.train.edge_count());

  cfg.rng_seed = 100;
  auto c = generate_synthetic(cfg);
  CHECK(a.eval_pairs != c.eval_pairs);
}

TEST_CASE("synthetic_records reproduces generate_synthetic through build_split") {
  SyntheticConfig cfg;
  cfg.communities = 2;
  cfg.authors_per_community = 12;
  cfg.papers_per_author = 3;
  cfg.eval_pair_fraction = 0.2;
  cfg.rng_seed = 17;

  auto direct = generate_synthetic(cfg);
  auto records = synthetic_records(cfg);
  auto via_split = build_split(records, TimeSplit{});

  CHECK(via_split.eval_pairs == direct.eval_pairs);
  CHECK(node_keys(via_split.train) == node_keys(direct.train));
  CHECK(via_split.train.edge_count() == direct.train.edge_count());
  CHECK(via_split.train_records == direct.train_records);
}

TEST_CASE("SyntheticConfig validation") {
  SyntheticConfig cfg;
  cfg.communities = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.papers_per_author = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.cross_community_paper_fraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.eval_pair_fraction = -0.1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  CHECK_NOTHROW(cfg.validate());
}
