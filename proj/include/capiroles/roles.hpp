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

// Community-role measures: within-module degree and participation
// coefficient (undirected and per direction), and the generalized set
// (internal/external intensity, diversity, heterogeneity) per direction.
//
// Every z-score here is taken w.r.t. the node's own community with the
// population standard deviation. A community whose values are all equal
// (singletons included) scores 0 for every member. A node with no link in
// the considered direction has participation 0.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capiroles/community.hpp"
#include "capiroles/graph.hpp"

namespace capiroles {

/// Which links of a node a measure looks at. Undirected uses the union of
/// predecessors and successors, so a reciprocated pair counts once.
enum class LinkScope { In, Out, Undirected };

enum class MeasureSet { Original2, Directed4, Generalized8 };

std::string_view to_string(MeasureSet set);
MeasureSet parse_measure_set(std::string_view name);
std::vector<std::string> measure_columns(MeasureSet set);

/// Row-major per-node feature table.
struct FeatureMatrix {
  MeasureSet set = MeasureSet::Generalized8;
  std::vector<std::string> columns;
  std::size_t rows = 0;
  std::vector<double> values;

  std::size_t cols() const noexcept { return columns.size(); }
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols(), cols()};
  }
  std::vector<double> column(std::size_t c) const;
  std::size_t column_index(std::string_view name) const;
};

/// Raw, un-normalized link profile of one node in one scope.
struct LinkProfile {
  std::uint64_t degree = 0;
  std::uint64_t internal = 0;         // links inside the own community
  std::uint64_t external = 0;         // degree - internal
  std::uint64_t diversity = 0;        // distinct other communities reached
  double heterogeneity = 0.0;         // population sd of per-external-community counts
  std::uint64_t sum_sq_community = 0; // sum_i d_i(u)^2 over all communities
};

/// Number of u's links (in the given direction) with members of community i.
/// Throws std::out_of_range on an invalid node or community.
std::size_t community_degree(const DirectedGraph& g, const Partition& p, NodeId u,
                             CommunityId i, Direction direction);

std::vector<LinkProfile> link_profiles(const DirectedGraph& g, const Partition& p,
                                       LinkScope scope, unsigned threads = 1);

/// (f(u) - mean_i(f)) / sd_i(f) over u's community i.
std::vector<double> zscore_within_community(std::span<const double> f, const Partition& p);

/// z (Undirected), z^in or z^out.
std::vector<double> within_module_degree(const DirectedGraph& g, const Partition& p,
                                         LinkScope scope, unsigned threads = 1);

/// P = 1 - sum_i (d_i / d)^2 in [0, 1).
std::vector<double> participation(const DirectedGraph& g, const Partition& p, LinkScope scope,
                                  unsigned threads = 1);

/// Columns I_int_in, I_int_out, I_ext_in, I_ext_out, D_in, D_out, H_in, H_out.
FeatureMatrix generalized_measures(const DirectedGraph& g, const Partition& p,
                                   unsigned threads = 1);
/// Columns z, P.
FeatureMatrix original_measures(const DirectedGraph& g, const Partition& p,
                                unsigned threads = 1);
/// Columns z_in, z_out, P_in, P_out.
FeatureMatrix directed_measures(const DirectedGraph& g, const Partition& p,
                                unsigned threads = 1);
FeatureMatrix compute_measures(const DirectedGraph& g, const Partition& p, MeasureSet set,
                               unsigned threads = 1);

enum class ThresholdRole {
  UltraPeripheralNonHub,
  PeripheralNonHub,
  ConnectorNonHub,
  KinlessNonHub,
  ProvincialHub,
  ConnectorHub,
  KinlessHub,
};

std::string_view to_string(ThresholdRole role);

/// The fixed-threshold role grid on (z, P): hub iff z >= 2.5, then
///   hubs:     P <= 0.30 provincial, <= 0.75 connector, else kinless;
///   non-hubs: P <= 0.05 ultra-peripheral, <= 0.62 peripheral,
///             <= 0.80 connector, else kinless.
/// Throws DataError when P is outside [0, 1] or either input is NaN.
ThresholdRole classify_by_thresholds(double z, double participation);

/// CSV "node,<columns...>" with shortest round-trip doubles.
void write_feature_csv(const DirectedGraph& g, const FeatureMatrix& fm, std::ostream& out);

struct LabeledFeatures {
  std::vector<std::string> labels;
  FeatureMatrix matrix;
};
/// Reads a file produced by write_feature_csv. The measure set is inferred
/// from the header.
LabeledFeatures read_feature_csv(std::istream& in);

}  // namespace capiroles
