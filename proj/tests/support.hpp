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

// Shared fixtures for unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "capiroles/community.hpp"
#include "capiroles/graph.hpp"
#include "capiroles/random.hpp"
#include "capiroles/roles.hpp"

namespace capiroles::test {

/// |a - b| <= rel * max(1, |a|, |b|).
inline bool close(double a, double b, double rel = 1e-12) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Graph from label pairs through the real ingestion path.
inline DirectedGraph from_lines(const std::string& text) {
  std::istringstream in(text);
  return ingest_edge_list(in).graph;
}

/// Nodes "0".."n-1"; the raw arc list may hold loops and duplicates.
struct RandomGraph {
  std::size_t n = 0;
  std::vector<Arc> raw;
  DirectedGraph graph;
};

inline std::vector<std::string> numeric_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return labels;
}

inline RandomGraph random_graph(Rng& rng, std::size_t n, double p, bool allow_noise = true) {
  RandomGraph rg;
  rg.n = n;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u != v && rng.bernoulli(p)) rg.raw.push_back({u, v});
    }
  }
  if (allow_noise && n > 0) {
    for (int i = 0; i < 3; ++i) {
      const auto u = static_cast<NodeId>(rng.below(n));
      rg.raw.push_back({u, u});
      if (!rg.raw.empty()) rg.raw.push_back(rg.raw[rng.below(rg.raw.size())]);
    }
  }
  rg.graph = DirectedGraph::build(numeric_labels(n), rg.raw);
  return rg;
}

inline Partition random_partition(Rng& rng, std::size_t n, std::size_t max_communities) {
  const std::size_t k = 1 + rng.below(max_communities);
  std::vector<std::uint32_t> labels(n);
  for (auto& l : labels) l = static_cast<std::uint32_t>(rng.below(k));
  return Partition::from_labels(labels);
}

/// Row-major matrix with generic column names.
inline FeatureMatrix matrix(const std::vector<std::vector<double>>& rows) {
  FeatureMatrix fm;
  for (std::size_t c = 0; c < rows.front().size(); ++c) fm.columns.push_back("c" + std::to_string(c));
  fm.rows = rows.size();
  for (const auto& r : rows) fm.values.insert(fm.values.end(), r.begin(), r.end());
  return fm;
}

inline std::vector<std::vector<double>> rows_of(const FeatureMatrix& fm) {
  std::vector<std::vector<double>> out(fm.rows);
  for (std::size_t r = 0; r < fm.rows; ++r) out[r].assign(fm.row(r).begin(), fm.row(r).end());
  return out;
}

struct Blobs {
  FeatureMatrix x;
  std::vector<std::uint32_t> truth;
};

/// k isotropic Gaussians with unit sd in `dim` dimensions, centred at
/// `spread` times the first k unit vectors (needs dim >= k), points
/// interleaved.
inline Blobs gaussian_blobs(Rng& rng, std::size_t points, std::size_t k, std::size_t dim,
                           double spread) {
  std::vector<std::vector<double>> rows(points, std::vector<double>(dim));
  Blobs b;
  b.truth.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const auto c = static_cast<std::uint32_t>(i % k);
    b.truth[i] = c;
    for (std::size_t d = 0; d < dim; ++d) rows[i][d] = rng.normal() + (d == c ? spread : 0.0);
  }
  b.x = matrix(rows);
  return b;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("capiroles_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace capiroles::test
