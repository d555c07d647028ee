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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hopwalk/util.hpp"

namespace hopwalk::graph {

using NodeId = std::uint32_t;
using TypeId = std::uint16_t;

struct SelfLoopError : Error {
  using Error::Error;
};
struct TypeConflictError : Error {
  using Error::Error;
};
struct UnknownNodeError : Error {
  using Error::Error;
};
struct EdgeFormatError : Error {
  using Error::Error;
};

// One endpoint of an edge: the full external key plus its node-type label.
// Keys are conventionally written "<type>:<name>", e.g. "author:1234".
struct Endpoint {
  std::string key;
  std::string type;
};

// Parses a "<type>:<name>" token. The whole token is the external key; the
// part before the first ':' is the type label.
Endpoint parse_endpoint(std::string_view token);

// Immutable undirected typed graph in CSR form. Node ids are dense
// 0..node_count()-1 in key-registration order; neighbor lists are sorted by
// id, duplicate-free and self-loop-free. Safe to share across threads.
class HeteroGraph {
 public:
  NodeId node_count() const { return static_cast<NodeId>(keys_.size()); }
  std::uint64_t edge_count() const { return edge_count_; }

  std::span<const NodeId> neighbors(NodeId u) const;
  std::uint32_t degree(NodeId u) const;

  TypeId node_type(NodeId u) const;
  const std::string& type_label(TypeId t) const { return type_labels_.at(t); }
  std::size_t type_count() const { return type_labels_.size(); }

  const std::string& key_of(NodeId u) const;
  std::optional<NodeId> find(std::string_view key) const;

  // Sorted-list intersection; used by link prediction to test whether two
  // nodes share any neighbor (e.g. a common paper).
  bool has_common_neighbor(NodeId u, NodeId v) const;

  // Cheap structural checks: handshake sum, symmetry, sorted adjacency.
  // Throws Error on violation; run after every ingestion.
  void validate() const;

 private:
  friend class GraphBuilder;

  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> adj_;
  std::vector<TypeId> types_;
  std::vector<std::string> keys_;
  std::vector<std::string> type_labels_;
  std::unordered_map<std::string, NodeId> key_index_;
  std::uint64_t edge_count_ = 0;

  void check_node(NodeId u) const;
};

// Single-writer accumulation of nodes and edges; build() finalizes into an
// immutable HeteroGraph. Duplicate add_edge calls are idempotent.
class GraphBuilder {
 public:
  // Registers a node (possibly isolated). Returns its id.
  NodeId add_node(const Endpoint& e);

  // Registers both endpoints and the undirected edge between them.
  // Throws SelfLoopError if both resolve to the same key, TypeConflictError
  // if a key was previously registered with a different type.
  GraphBuilder& add_edge(const Endpoint& u, const Endpoint& v);

  std::size_t node_count() const { return keys_.size(); }

  HeteroGraph build();

 private:
  std::vector<std::string> keys_;
  std::vector<TypeId> types_;
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<std::string> type_labels_;
  std::unordered_map<std::string, NodeId> key_index_;
  std::unordered_map<std::string, TypeId> type_index_;
};

// Edge-list file format: one edge per line, "<type>:<key>\t<type>:<key>".
// '#' lines are comments, blank lines are ignored. extra_header lines are
// written as leading comments (config snapshot, digest).
void save_edge_list(const HeteroGraph& g, const std::filesystem::path& path,
                    const std::vector<std::string>& extra_header = {});
HeteroGraph load_edge_list(const std::filesystem::path& path);

}  // namespace hopwalk::graph
