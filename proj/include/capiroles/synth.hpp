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

// Synthetic follower graphs with known answers: a directed stochastic block
// model background plus deterministic overlays for role archetypes and
// reciprocating "capitalist" nodes.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "capiroles/graph.hpp"

namespace capiroles {

enum class Archetype { Hub, Connector, Kinless, Peripheral };

std::string_view to_string(Archetype a);

struct RolePlant {
  Archetype archetype = Archetype::Kinless;
  std::size_t count = 0;
  /// Other communities to link to. 0 picks the default: 80% of them
  /// (rounded up) for kinless, half for connectors. Ignored by hubs and
  /// peripherals.
  std::size_t external_communities = 0;
  /// Added links per direction, as a multiple of the background expectation
  /// (external degree for kinless/connector, internal degree for hubs).
  double degree_multiplier = 10.0;
};

struct CapitalistPlant {
  std::size_t count = 0;
  /// Distinct partners per planted node, drawn uniformly from non-planted
  /// nodes.
  std::size_t partners = 100;
  /// Probability that a partnership is mutual; otherwise one-way.
  double reciprocity = 0.95;
  /// Share of one-way partnerships that go out of the planted node.
  double ifyfm_share = 0.5;
};

struct PlantedSpec {
  std::vector<std::size_t> community_sizes;
  double p_intra = 0.05;  // per ordered pair inside a community
  double p_inter = 0.002; // per ordered pair across communities
  std::vector<RolePlant> roles;
  CapitalistPlant capitalists;
  std::uint64_t seed = 0;
};

struct PlantedGraph {
  DirectedGraph graph;
  /// Planted community of every node.
  std::vector<std::uint32_t> community;
  struct RoleNode {
    NodeId node;
    Archetype archetype;
  };
  std::vector<RoleNode> roles;
  std::vector<NodeId> capitalists;
};

/// Deterministic for a given spec. Node labels are "0".."n-1" with the
/// communities laid out as consecutive blocks. Throws DataError for an
/// infeasible spec.
PlantedGraph generate(const PlantedSpec& spec);

/// CSV "node,community,plant" with plant one of background, hub, connector,
/// kinless, peripheral, capitalist.
void write_ground_truth_csv(const PlantedGraph& pg, std::ostream& out);

}  // namespace capiroles
