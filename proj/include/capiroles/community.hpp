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
#include <iosfwd>
#include <span>
#include <vector>

#include "capiroles/graph.hpp"

namespace capiroles {

using CommunityId = std::uint32_t;

/// Disjoint partition of the node set. Community ids are contiguous
/// 0..community_count()-1 and no community is empty.
class Partition {
 public:
  Partition() = default;

  /// Renumbers arbitrary labels to contiguous ids in order of first
  /// appearance along the node index.
  static Partition from_labels(std::span<const std::uint32_t> labels);
  static Partition singletons(std::size_t n);

  std::size_t node_count() const noexcept { return assignment_.size(); }
  std::size_t community_count() const noexcept { return sizes_.size(); }
  CommunityId community(NodeId u) const { return assignment_[u]; }
  std::span<const CommunityId> assignment() const noexcept { return assignment_; }
  std::span<const std::size_t> sizes() const noexcept { return sizes_; }

  /// Member lists, each in increasing node order.
  std::vector<std::vector<NodeId>> members() const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<CommunityId> assignment_;
  std::vector<std::size_t> sizes_;
};

/// Leicht-Newman directed modularity
///   Q = sum_c [ e_c / m - Dout_c * Din_c / m^2 ],
/// evaluated from exact integer aggregates (one final rounding).
/// Throws DataError on an arcless graph or a partition of the wrong size.
double directed_modularity(const DirectedGraph& g, const Partition& p);

enum class NodeOrder { Shuffled, Natural };

struct LouvainConfig {
  std::uint64_t seed = 0;
  NodeOrder node_order = NodeOrder::Shuffled;
  /// A level whose modularity increase does not exceed this ends the run.
  double min_level_gain = 1e-9;
  std::size_t max_levels = 64;
};

/// One local-moving phase, kept for diagnostics and tests.
struct LouvainLevel {
  std::size_t nodes = 0;
  std::size_t communities = 0;
  std::size_t sweeps = 0;
  std::size_t moves = 0;
  double start_modularity = 0.0;
  /// Start value plus the sum of accepted move gains.
  double tracked_modularity = 0.0;
  /// Same quantity recomputed from scratch on the level graph.
  double recomputed_modularity = 0.0;
  /// Smallest modularity gain among accepted moves (+inf if none).
  double min_accepted_gain = 0.0;
};

struct LouvainResult {
  Partition partition;
  /// directed_modularity(g, partition), bit for bit.
  double modularity = 0.0;
  std::vector<LouvainLevel> levels;
};

/// Louvain local moving + aggregation on directed modularity. Returns the
/// top level of the hierarchy. Deterministic for a given config.
LouvainResult louvain(const DirectedGraph& g, const LouvainConfig& cfg = {});

/// "label<TAB>community" lines in node order.
void write_partition(const DirectedGraph& g, const Partition& p, std::ostream& out);
/// Inverse of write_partition; every node of g must appear exactly once.
Partition read_partition(const DirectedGraph& g, std::istream& in);

}  // namespace capiroles
