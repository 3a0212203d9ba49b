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

// Topological detection of social capitalists: users whose follower and
// followee sets largely coincide.

#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "capiroles/graph.hpp"

namespace capiroles {

/// IFYFM follows first (ratio > 1), FMIFY follows back (ratio <= 1),
/// Passive stopped following back (ratio <= passive bound).
enum class Behavior { FMIFY, IFYFM, Passive };
enum class DegreeClass { LowInDegree, HighInDegree };

std::string_view to_string(Behavior b);
std::string_view to_string(DegreeClass c);
Behavior parse_behavior(std::string_view s);
DegreeClass parse_degree_class(std::string_view s);

/// Every bound is strict: a node qualifies with in_degree > min_followers,
/// out_degree > min_followees and overlap > overlap_threshold.
struct DetectionConfig {
  double overlap_threshold = 0.74;
  std::size_t min_followers = 500;
  std::size_t min_followees = 500;
  /// HighInDegree iff in_degree > high_degree.
  std::size_t high_degree = 10000;
  double passive_bound = 0.7;
  /// When set, Passive is only assigned to HighInDegree nodes; low in-degree
  /// nodes split at ratio 1 only.
  bool passive_high_degree_only = true;
  unsigned threads = 1;
};

struct CapitalistRecord {
  NodeId node = 0;
  double overlap = 0.0;
  double ratio = 0.0;
  std::size_t in_degree = 0;
  std::size_t out_degree = 0;
  Behavior behavior = Behavior::FMIFY;
  DegreeClass degree_class = DegreeClass::LowInDegree;

  bool operator==(const CapitalistRecord&) const = default;
};

/// |N_in(u) & N_out(u)| / min(|N_in(u)|, |N_out(u)|); nullopt when either
/// neighborhood is empty.
std::optional<double> overlap_index(const DirectedGraph& g, NodeId u);

/// d_in(u) / d_out(u); nullopt when d_out(u) = 0.
std::optional<double> follow_ratio(const DirectedGraph& g, NodeId u);

Behavior classify_behavior(double ratio, DegreeClass degree_class, const DetectionConfig& cfg);

/// All qualifying nodes, sorted by node index.
std::vector<CapitalistRecord> detect(const DirectedGraph& g, const DetectionConfig& cfg = {});

/// CSV "node_label,overlap,ratio,in_degree,out_degree,behavior,degree_class".
void write_capitalists_csv(const DirectedGraph& g, const std::vector<CapitalistRecord>& records,
                           std::ostream& out);
std::vector<CapitalistRecord> read_capitalists_csv(const DirectedGraph& g, std::istream& in);

}  // namespace capiroles
