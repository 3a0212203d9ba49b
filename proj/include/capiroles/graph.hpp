/*
 * Copyright 2026 The capiroles Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace capiroles {

using NodeId = std::uint32_t;

enum class Direction { In, Out };

struct Arc {
  NodeId source;
  NodeId target;
};

/// Counters gathered while normalizing raw arcs into a simple digraph.
struct IngestStats {
  std::uint64_t lines = 0;
  std::uint64_t skipped_lines = 0;  // comments and blanks
  std::uint64_t raw_arcs = 0;
  std::uint64_t self_loops_removed = 0;
  std::uint64_t duplicates_removed = 0;
};

/// Immutable simple directed graph in dual CSR form (successor and
/// predecessor lists, both strictly increasing), with the bijection between
/// original labels and dense indices 0..n-1.
///
/// Safe for concurrent reads once built.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  /// Builds from dense arcs; `labels[i]` names node i. Self-loops are
  /// dropped and duplicate arcs collapsed. Throws DataError on an arc that
  /// references a node outside [0, labels.size()) or on duplicate labels.
  static DirectedGraph build(std::vector<std::string> labels, std::vector<Arc> arcs,
                             IngestStats* stats = nullptr);

  std::size_t node_count() const noexcept { return labels_.size(); }
  std::size_t arc_count() const noexcept { return out_targets_.size(); }

  std::span<const NodeId> out_neighbors(NodeId u) const {
    return {out_targets_.data() + out_offsets_[u], out_targets_.data() + out_offsets_[u + 1]};
  }
  std::span<const NodeId> in_neighbors(NodeId u) const {
    return {in_sources_.data() + in_offsets_[u], in_sources_.data() + in_offsets_[u + 1]};
  }
  std::span<const NodeId> neighbors(NodeId u, Direction d) const {
    return d == Direction::In ? in_neighbors(u) : out_neighbors(u);
  }

  /// Throws std::out_of_range when u >= node_count().
  std::size_t degree(NodeId u, Direction d) const;

  bool has_arc(NodeId u, NodeId v) const;

  const std::string& label(NodeId u) const { return labels_.at(u); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<NodeId> find(std::string_view label) const;

  /// All arcs in (source, target) lexicographic order.
  std::vector<Arc> arcs() const;

  bool operator==(const DirectedGraph& other) const {
    return labels_ == other.labels_ && out_offsets_ == other.out_offsets_ &&
           out_targets_ == other.out_targets_ && in_offsets_ == other.in_offsets_ &&
           in_sources_ == other.in_sources_;
  }

 private:
  friend DirectedGraph load_graph_cache(const std::filesystem::path& path);
  friend void save_graph_cache(const DirectedGraph& g, const std::filesystem::path& path);

  void index_labels();

  std::vector<std::uint64_t> out_offsets_{0};
  std::vector<NodeId> out_targets_;
  std::vector<std::uint64_t> in_offsets_{0};
  std::vector<NodeId> in_sources_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
};

struct EdgeListFormat {
  /// Lines whose first non-blank character is one of these are skipped.
  std::string comment_chars = "#%";
};

struct IngestResult {
  DirectedGraph graph;
  IngestStats stats;
};

/// Reads "SRC<ws>DST" lines. Dense indices follow a canonical label order
/// (numeric labels by value, then everything else bytewise), so the result
/// does not depend on line order. Throws ParseError for a line that does
/// not hold exactly two tokens, DataError for input with no node at all.
IngestResult ingest_edge_list(std::istream& in, const EdgeListFormat& format = {});
IngestResult ingest_edge_list_file(const std::filesystem::path& path,
                                   const EdgeListFormat& format = {});

/// Canonical label ordering used by ingestion.
bool label_less(std::string_view a, std::string_view b);

/// Writes every arc as "src dst". Nodes without any arc are written as a
/// self-loop line so that re-ingestion restores them (and drops the loop).
void export_edge_list(const DirectedGraph& g, std::ostream& out);

/// Versioned little-endian binary snapshot of the whole graph.
void save_graph_cache(const DirectedGraph& g, const std::filesystem::path& path);
DirectedGraph load_graph_cache(const std::filesystem::path& path);

}  // namespace capiroles
