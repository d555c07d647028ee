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

#include "hopwalk/graph.hpp"

#include <algorithm>
#include <sstream>

namespace hopwalk::graph {

Endpoint parse_endpoint(std::string_view token) {
  std::size_t colon = token.find(':');
  if (colon == std::string_view::npos || colon == 0 ||
      colon + 1 == token.size()) {
    throw EdgeFormatError("endpoint token must be '<type>:<key>', got '" +
                          std::string(token) + "'");
  }
  return Endpoint{std::string(token), std::string(token.substr(0, colon))};
}

std::span<const NodeId> HeteroGraph::neighbors(NodeId u) const {
  check_node(u);
  return std::span<const NodeId>(adj_.data() + offsets_[u],
                                 adj_.data() + offsets_[u + 1]);
}

std::uint32_t HeteroGraph::degree(NodeId u) const {
  check_node(u);
  return static_cast<std::uint32_t>(offsets_[u + 1] - offsets_[u]);
}

TypeId HeteroGraph::node_type(NodeId u) const {
  check_node(u);
  return types_[u];
}

const std::string& HeteroGraph::key_of(NodeId u) const {
  check_node(u);
  return keys_[u];
}

std::optional<NodeId> HeteroGraph::find(std::string_view key) const {
  auto it = key_index_.find(std::string(key));
  if (it == key_index_.end()) return std::nullopt;
  return it->second;
}

bool HeteroGraph::has_common_neighbor(NodeId u, NodeId v) const {
  auto a = neighbors(u);
  auto b = neighbors(v);
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return false;
}

void HeteroGraph::check_node(NodeId u) const {
  if (u >= node_count()) {
    throw UnknownNodeError("node id " + std::to_string(u) +
                           " out of range (node count " +
                           std::to_string(node_count()) + ")");
  }
}

void HeteroGraph::validate() const {
  std::uint64_t degree_sum = 0;
  for (NodeId u = 0; u < node_count(); ++u) {
    auto ns = neighbors(u);
    degree_sum += ns.size();
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (ns[i] >= node_count()) throw Error("adjacency references unknown node");
      if (ns[i] == u) throw Error("self-loop in finalized graph");
      if (i > 0 && ns[i - 1] >= ns[i]) throw Error("adjacency not sorted/unique");
      auto back = neighbors(ns[i]);
      if (!std::binary_search(back.begin(), back.end(), u)) {
        throw Error("asymmetric edge " + std::to_string(u) + "-" +
                    std::to_string(ns[i]));
      }
    }
  }
  if (degree_sum != 2 * edge_count_) {
    throw Error("handshake violation: degree sum " +
                std::to_string(degree_sum) + " != 2*" +
                std::to_string(edge_count_));
  }
}

NodeId GraphBuilder::add_node(const Endpoint& e) {
  TypeId type_id;
  auto t = type_index_.find(e.type);
  if (t == type_index_.end()) {
    type_id = static_cast<TypeId>(type_labels_.size());
    type_index_.emplace(e.type, type_id);
    type_labels_.push_back(e.type);
  } else {
    type_id = t->second;
  }

  auto it = key_index_.find(e.key);
  if (it != key_index_.end()) {
    NodeId id = it->second;
    if (types_[id] != type_id) {
      throw TypeConflictError("key '" + e.key + "' registered as '" +
                              type_labels_[types_[id]] + "' and '" + e.type +
                              "'");
    }
    return id;
  }
  NodeId id = static_cast<NodeId>(keys_.size());
  key_index_.emplace(e.key, id);
  keys_.push_back(e.key);
  types_.push_back(type_id);
  adjacency_.emplace_back();
  return id;
}

GraphBuilder& GraphBuilder::add_edge(const Endpoint& u, const Endpoint& v) {
  if (u.key == v.key) {
    throw SelfLoopError("self-loop on key '" + u.key + "'");
  }
  NodeId a = add_node(u);
  NodeId b = add_node(v);
  adjacency_[a].push_back(b);
  adjacency_[b].push_back(a);
  return *this;
}

HeteroGraph GraphBuilder::build() {
  HeteroGraph g;
  const std::size_t n = keys_.size();
  g.offsets_.resize(n + 1, 0);

  std::uint64_t total = 0;
  for (std::size_t u = 0; u < n; ++u) {
    auto& ns = adjacency_[u];
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    total += ns.size();
    g.offsets_[u + 1] = total;
  }
  g.adj_.reserve(total);
  for (auto& ns : adjacency_) {
    g.adj_.insert(g.adj_.end(), ns.begin(), ns.end());
  }
  g.edge_count_ = total / 2;
  g.keys_ = std::move(keys_);
  g.types_ = std::move(types_);
  g.type_labels_ = std::move(type_labels_);
  g.key_index_ = std::move(key_index_);

  *this = GraphBuilder();
  return g;
}

void save_edge_list(const HeteroGraph& g, const std::filesystem::path& path,
                    const std::vector<std::string>& extra_header) {
  std::ostringstream out;
  out << "# hopwalk edge list\n";
  for (const auto& line : extra_header) out << "# " << line << "\n";
  out << "# nodes=" << g.node_count() << " edges=" << g.edge_count() << "\n";
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (u < v) out << g.key_of(u) << "\t" << g.key_of(v) << "\n";
    }
  }
  write_text_file(path, out.str());
}

HeteroGraph load_edge_list(const std::filesystem::path& path) {
  GraphBuilder builder;
  for (const auto& [line_no, line] : read_data_lines(path)) {
    auto fields = split(line, '\t');
    if (fields.size() != 2) {
      throw EdgeFormatError(path.string() + ":" + std::to_string(line_no) +
                            ": expected two tab-separated endpoints");
    }
    builder.add_edge(parse_endpoint(fields[0]), parse_endpoint(fields[1]));
  }
  return builder.build();
}

}  // namespace hopwalk::graph
