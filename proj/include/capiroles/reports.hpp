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

// Analysis artifacts built on top of a role clustering: how capitalist
// buckets spread over clusters, and how clusters link to each other.
//
// All percentages are stored at full precision in [0, 100]. Rendering to
// two decimals happens only in the text tables.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capiroles/capitalists.hpp"
#include "capiroles/graph.hpp"

namespace capiroles {

/// How capitalists are grouped into rows.
///   Split:    low in-degree by r <= 1 | r > 1; high in-degree by
///             r <= bound | bound < r <= 1 | r > 1.
///   ThreeWay: the three-band split for both degree classes.
enum class Bucketing { Split, ThreeWay };

std::string_view to_string(Bucketing b);
Bucketing parse_bucketing(std::string_view name);

struct DistributionCell {
  std::uint64_t count = 0;
  double share_of_bucket = 0.0;   // % of the row's capitalists in this cluster
  double share_of_cluster = 0.0;  // % of the cluster's nodes in this row
};

struct DistributionRow {
  std::string bucket;
  std::uint64_t total = 0;
  std::vector<DistributionCell> cells;
};

struct DistributionTable {
  std::vector<std::uint64_t> cluster_sizes;
  std::vector<DistributionRow> rows;
  std::vector<std::string> warnings;
};

/// Cross-tabulates capitalist buckets against clusters. `cluster_of` maps
/// every node of g to a cluster in [0, k). Throws DataError naming the node
/// when a record has no cluster. Empty rows stay all-zero with a warning.
DistributionTable capitalist_distribution(const DirectedGraph& g,
                                          std::span<const CapitalistRecord> records,
                                          std::span<const std::uint32_t> cluster_of,
                                          std::size_t k, Bucketing bucketing = Bucketing::Split,
                                          double passive_bound = 0.7);

/// Display thresholds (percent). An arc is hidden when it is below both.
struct ArcFilter {
  double min_pct_all_links = 1.0;
  double min_pct_source_out = 10.0;
};

struct InterconnectionArc {
  std::uint32_t source = 0;
  std::uint32_t target = 0;
  std::uint64_t count = 0;
  double pct_source_out = 0.0;  // % of all links leaving the source cluster
  double pct_all_links = 0.0;   // % of all links in the graph
  double pct_target_in = 0.0;   // % of all links entering the target cluster
};

/// k x k link counts between clusters. Filters only affect `displayed`.
struct InterconnectionGraph {
  std::size_t k = 0;
  std::vector<std::uint64_t> cluster_sizes;
  std::vector<std::string> cluster_labels;
  std::uint64_t total_links = 0;
  std::vector<std::uint64_t> counts;  // row-major, source x target
  ArcFilter filter;

  std::uint64_t count(std::size_t i, std::size_t j) const { return counts[i * k + j]; }
  InterconnectionArc arc(std::size_t i, std::size_t j) const;
  bool displayed(const InterconnectionArc& a) const;
  /// Arcs with at least one link, in (source, target) order.
  std::vector<InterconnectionArc> arcs() const;
};

/// Single pass over all arcs of g accumulating cluster-to-cluster counts.
InterconnectionGraph cluster_interconnection(const DirectedGraph& g,
                                             std::span<const std::uint32_t> cluster_of,
                                             std::size_t k, const ArcFilter& filter = {},
                                             unsigned threads = 1);

enum class ReportFormat { Csv, Json, Dot, Text };

std::string distribution_csv(const DistributionTable& t);
std::string distribution_json(const DistributionTable& t);
std::string distribution_text(const DistributionTable& t);
DistributionTable distribution_from_json(std::string_view json);

std::string interconnection_csv(const InterconnectionGraph& ig);
std::string interconnection_json(const InterconnectionGraph& ig);
/// Graphviz digraph of the displayed arcs: vertex size follows cluster
/// size, pen width follows the share of all links.
std::string interconnection_dot(const InterconnectionGraph& ig);
InterconnectionGraph interconnection_from_json(std::string_view json);

/// Serializes to `path`; throws IoError when the sink cannot be written and
/// DataError for a format the report does not support.
void export_report(const DistributionTable& t, ReportFormat format,
                   const std::filesystem::path& path);
void export_report(const InterconnectionGraph& ig, ReportFormat format,
                   const std::filesystem::path& path);

}  // namespace capiroles
