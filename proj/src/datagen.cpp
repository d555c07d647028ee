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

#include "hopwalk/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "hopwalk/rand.hpp"
#include "hopwalk/util.hpp"

namespace hopwalk::datagen {
namespace {

using graph::Endpoint;
using graph::GraphBuilder;
using graph::HeteroGraph;

std::string author_key(const std::string& bare) { return "author:" + bare; }
std::string paper_key(const std::string& bare) { return "paper:" + bare; }
std::string venue_key(const std::string& bare) { return "venue:" + bare; }

bool parse_year(std::string_view s, int& year) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), year);
  return ec == std::errc() && ptr == s.data() + s.size();
}

HeteroGraph graph_from_records(std::span<const BiblioRecord> records) {
  GraphBuilder builder;
  for (const auto& r : records) {
    Endpoint paper{paper_key(r.paper), "paper"};
    for (const auto& a : r.authors) {
      builder.add_edge(Endpoint{author_key(a), "author"}, paper);
    }
    if (!r.venue.empty()) {
      builder.add_edge(paper, Endpoint{venue_key(r.venue), "venue"});
    }
  }
  return builder.build();
}

std::pair<std::string, std::string> canonical(std::string a, std::string b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

}  // namespace

ParseResult parse_records(std::istream& in, const std::string& source_name) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  std::size_t data_lines = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    ++data_lines;
    auto fields = split(line, '\t');
    if (fields.size() != 3 && fields.size() != 4) {
      result.issues.push_back({line_no, "expected 3 or 4 tab-separated fields, got " +
                                            std::to_string(fields.size())});
      continue;
    }
    BiblioRecord rec;
    rec.paper = std::string(fields[0]);
    if (rec.paper.empty()) {
      result.issues.push_back({line_no, "empty paper key"});
      continue;
    }
    if (!parse_year(fields[1], rec.year) || rec.year < 1) {
      result.issues.push_back({line_no, "bad year '" + std::string(fields[1]) + "'"});
      continue;
    }
    for (auto part : split(fields[2], '|')) {
      if (part.empty()) continue;
      std::string a(part);
      if (std::find(rec.authors.begin(), rec.authors.end(), a) == rec.authors.end()) {
        rec.authors.push_back(std::move(a));
      }
    }
    if (rec.authors.empty()) {
      result.issues.push_back({line_no, "record has no authors"});
      continue;
    }
    if (fields.size() == 4) rec.venue = std::string(fields[3]);
    result.records.push_back(std::move(rec));
  }
  if (data_lines > 0 && result.records.empty()) {
    throw ParseError(source_name + ": no parsable records among " +
                     std::to_string(data_lines) + " data lines");
  }
  return result;
}

ParseResult load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_records(in, path.string());
}

void save_records(std::span<const BiblioRecord> records,
                  const std::filesystem::path& path,
                  const std::vector<std::string>& extra_header) {
  std::string text;
  text += "# hopwalk bibliography records\n";
  for (const auto& h : extra_header) text += "# " + h + "\n";
  text += "# records=" + std::to_string(records.size()) + "\n";
  for (const auto& r : records) {
    text += r.paper;
    text += '\t';
    text += std::to_string(r.year);
    text += '\t';
    for (std::size_t i = 0; i < r.authors.size(); ++i) {
      if (i) text += '|';
      text += r.authors[i];
    }
    if (!r.venue.empty()) {
      text += '\t';
      text += r.venue;
    }
    text += '\n';
  }
  write_text_file(path, text);
}

void TimeSplit::validate() const {
  if (train_end_year >= eval_end_year) {
    throw Error("time split requires train_end_year < eval_end_year, got " +
                std::to_string(train_end_year) + " / " + std::to_string(eval_end_year));
  }
}

SplitResult build_split(std::span<const BiblioRecord> records, const TimeSplit& split) {
  split.validate();
  SplitResult out;
  std::vector<BiblioRecord> train;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : records) {
    if (r.year <= split.train_end_year) {
      train.push_back(r);
      ++out.train_records;
    } else if (r.year <= split.eval_end_year) {
      ++out.eval_records;
      for (std::size_t i = 0; i < r.authors.size(); ++i) {
        for (std::size_t j = i + 1; j < r.authors.size(); ++j) {
          auto pair = canonical(author_key(r.authors[i]), author_key(r.authors[j]));
          if (seen.insert(pair).second) out.eval_pairs.push_back(std::move(pair));
        }
      }
    } else {
      ++out.dropped_records;
    }
  }
  if (out.train_records == 0) {
    throw EmptySplitError("no records at or before year " +
                          std::to_string(split.train_end_year));
  }
  if (out.eval_records == 0 || out.eval_pairs.empty()) {
    throw EmptySplitError("no co-author pairs between years " +
                          std::to_string(split.train_end_year + 1) + " and " +
                          std::to_string(split.eval_end_year));
  }
  out.train = graph_from_records(train);
  return out;
}

void SyntheticConfig::validate() const {
  if (communities == 0) throw Error("communities must be positive");
  if (authors_per_community == 0) throw Error("authors_per_community must be positive");
  if (papers_per_author == 0) throw Error("papers_per_author must be positive");
  if (cross_community_paper_fraction < 0.0 || cross_community_paper_fraction > 1.0) {
    throw Error("cross_community_paper_fraction must lie in [0, 1]");
  }
  if (eval_pair_fraction < 0.0 || eval_pair_fraction > 1.0) {
    throw Error("eval_pair_fraction must lie in [0, 1]");
  }
}

namespace {

struct SyntheticParts {
  std::vector<BiblioRecord> train_records;
  std::vector<std::pair<std::string, std::string>> eval_pairs_bare;
  std::vector<int> eval_years;
};

std::string author_name(std::uint32_t c, std::uint32_t i) {
  return "a" + std::to_string(c) + "_" + std::to_string(i);
}

SyntheticParts build_synthetic_parts(const SyntheticConfig& cfg) {
  cfg.validate();
  const std::uint32_t C = cfg.communities;
  const std::uint32_t A = cfg.authors_per_community;
  const std::uint32_t V = cfg.venues_per_community;
  Rng rng(cfg.rng_seed);

  SyntheticParts parts;
  parts.train_records.reserve(static_cast<std::size_t>(C) * A * cfg.papers_per_author);
  for (std::uint32_t c = 0; c < C; ++c) {
    for (std::uint32_t i = 0; i < A; ++i) {
      for (std::uint32_t n = 0; n < cfg.papers_per_author; ++n) {
        BiblioRecord rec;
        rec.paper = "p" + std::to_string(c) + "_" + std::to_string(i) + "_" +
                    std::to_string(n);
        rec.year = 1990 + static_cast<int>(rng.uniform_index(19));  // 1990..2008
        rec.authors.push_back(author_name(c, i));
        bool cross = C > 1 && rng.uniform_real() < cfg.cross_community_paper_fraction;
        if (cross) {
          std::uint32_t c2 = static_cast<std::uint32_t>(rng.uniform_index(C - 1));
          if (c2 >= c) ++c2;
          std::uint32_t co = static_cast<std::uint32_t>(rng.uniform_index(A));
          rec.authors.push_back(author_name(c2, co));
        } else if (A > 1) {
          std::uint32_t co = static_cast<std::uint32_t>(rng.uniform_index(A - 1));
          if (co >= i) ++co;
          rec.authors.push_back(author_name(c, co));
        }
        if (V > 0) {
          rec.venue = "v" + std::to_string(c) + "_" +
                      std::to_string(rng.uniform_index(V));
        }
        parts.train_records.push_back(std::move(rec));
      }
    }
  }

  HeteroGraph g = graph_from_records(parts.train_records);
  auto no_common_paper = [&](const std::string& bare_u, const std::string& bare_v) {
    auto u = g.find(author_key(bare_u));
    auto v = g.find(author_key(bare_v));
    return u && v && !g.has_common_neighbor(*u, *v);
  };

  const std::uint64_t total_authors = static_cast<std::uint64_t>(C) * A;
  const std::uint64_t universe =
      cfg.random_eval_pairs
          ? total_authors * (total_authors - 1) / 2
          : static_cast<std::uint64_t>(C) * A * (A - 1) / 2;

  auto& chosen = parts.eval_pairs_bare;
  if (universe == 0 || cfg.eval_pair_fraction == 0.0) {
    // nothing to sample
  } else if (universe <= 4'000'000) {
    std::vector<std::pair<std::string, std::string>> eligible;
    if (cfg.random_eval_pairs) {
      for (std::uint64_t x = 0; x < total_authors; ++x) {
        for (std::uint64_t y = x + 1; y < total_authors; ++y) {
          auto u = author_name(static_cast<std::uint32_t>(x / A),
                               static_cast<std::uint32_t>(x % A));
          auto v = author_name(static_cast<std::uint32_t>(y / A),
                               static_cast<std::uint32_t>(y % A));
          if (no_common_paper(u, v)) eligible.push_back(canonical(u, v));
        }
      }
    } else {
      for (std::uint32_t c = 0; c < C; ++c) {
        for (std::uint32_t i = 0; i < A; ++i) {
          for (std::uint32_t j = i + 1; j < A; ++j) {
            auto u = author_name(c, i), v = author_name(c, j);
            if (no_common_paper(u, v)) eligible.push_back(canonical(u, v));
          }
        }
      }
    }
    auto count = static_cast<std::size_t>(
        std::llround(cfg.eval_pair_fraction * static_cast<double>(eligible.size())));
    count = std::min(count, eligible.size());
    std::vector<std::size_t> idx(eligible.size());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
    for (std::size_t k = idx.size(); k > 1; --k) {
      std::swap(idx[k - 1], idx[rng.uniform_index(k)]);
    }
    for (std::size_t k = 0; k < count; ++k) chosen.push_back(eligible[idx[k]]);
  } else {
    // Pair universe too large to enumerate: rejection-sample. The target
    // approximates fraction * |eligible| by fraction * |universe|, which is
    // accurate for sparse graphs.
    auto target = static_cast<std::size_t>(
        std::llround(cfg.eval_pair_fraction * static_cast<double>(universe)));
    std::set<std::pair<std::string, std::string>> seen;
    std::uint64_t budget = 1'000'000 + 200 * static_cast<std::uint64_t>(target);
    while (chosen.size() < target && budget-- > 0) {
      std::string u, v;
      if (cfg.random_eval_pairs) {
        std::uint64_t x = rng.uniform_index(total_authors);
        std::uint64_t y = rng.uniform_index(total_authors - 1);
        if (y >= x) ++y;
        u = author_name(static_cast<std::uint32_t>(x / A),
                        static_cast<std::uint32_t>(x % A));
        v = author_name(static_cast<std::uint32_t>(y / A),
                        static_cast<std::uint32_t>(y % A));
      } else {
        std::uint32_t c = static_cast<std::uint32_t>(rng.uniform_index(C));
        std::uint32_t i = static_cast<std::uint32_t>(rng.uniform_index(A));
        std::uint32_t j = static_cast<std::uint32_t>(rng.uniform_index(A - 1));
        if (j >= i) ++j;
        u = author_name(c, i);
        v = author_name(c, j);
      }
      auto pair = canonical(u, v);
      if (!seen.count(pair) && no_common_paper(pair.first, pair.second)) {
        seen.insert(pair);
        chosen.push_back(std::move(pair));
      }
    }
  }

  parts.eval_years.reserve(chosen.size());
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    parts.eval_years.push_back(2009 + static_cast<int>(rng.uniform_index(3)));
  }
  return parts;
}

}  // namespace

SplitResult generate_synthetic(const SyntheticConfig& config) {
  SyntheticParts parts = build_synthetic_parts(config);
  SplitResult out;
  out.train = graph_from_records(parts.train_records);
  out.train_records = parts.train_records.size();
  out.eval_records = parts.eval_pairs_bare.size();
  out.eval_pairs.reserve(parts.eval_pairs_bare.size());
  for (const auto& [u, v] : parts.eval_pairs_bare) {
    out.eval_pairs.emplace_back(author_key(u), author_key(v));
  }
  return out;
}

std::vector<BiblioRecord> synthetic_records(const SyntheticConfig& config) {
  SyntheticParts parts = build_synthetic_parts(config);
  std::vector<BiblioRecord> records = std::move(parts.train_records);
  for (std::size_t k = 0; k < parts.eval_pairs_bare.size(); ++k) {
    BiblioRecord rec;
    rec.paper = "e" + std::to_string(k);
    rec.year = parts.eval_years[k];
    rec.authors = {parts.eval_pairs_bare[k].first, parts.eval_pairs_bare[k].second};
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace hopwalk::datagen
