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

// Unsupervised role identification: column normalization, k-means with
// k-means++ seeding and restarts, Davies-Bouldin scoring and a sweep over k.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "capiroles/roles.hpp"

namespace capiroles {

enum class Normalization { ZScore, MinMax };

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view name);

/// Per-column affine map x' = (x - offset) / scale. A constant column has
/// scale 0 and maps to 0; the inverse maps it back to the constant.
struct ColumnTransform {
  Normalization method = Normalization::ZScore;
  std::vector<double> offset;
  std::vector<double> scale;

  double forward(std::size_t col, double x) const;
  double inverse(std::size_t col, double y) const;
};

struct NormalizedFeatures {
  FeatureMatrix matrix;
  ColumnTransform transform;
};

/// Standardizes every column (z-score with population sd, or min-max to
/// [0, 1]). Throws DataError with fewer than two rows.
NormalizedFeatures normalize(const FeatureMatrix& x, Normalization method = Normalization::ZScore);

/// Maps rows from normalized units back to original units.
FeatureMatrix denormalize(const FeatureMatrix& y, const ColumnTransform& t);

struct KMeansConfig {
  std::uint64_t seed = 0;
  std::size_t restarts = 10;
  std::size_t max_iterations = 300;
  /// Stop once (I_prev - I) / I_prev falls below this.
  double tolerance = 1e-6;
  unsigned threads = 1;
};

struct Clustering {
  std::size_t k = 0;
  std::vector<std::uint32_t> assignment;
  /// k rows in the feature space of the clustered data.
  FeatureMatrix centroids;
  std::vector<std::size_t> sizes;
  double inertia = 0.0;
  /// NaN until scored (or when the clustering is degenerate).
  double db_index = 0.0;
  std::vector<std::string> labels;
  /// Inertia after each assignment step of the retained restart.
  std::vector<double> inertia_trace;
  std::size_t iterations = 0;
};

/// Lloyd iterations from k-means++ seeding, best of cfg.restarts by inertia.
/// Empty clusters are re-seeded with the point farthest from its centroid.
/// On return every cluster is non-empty, centroids are the means of their
/// members and each point sits in (one of) its nearest centroids.
/// Throws DataError when k < 1 or k > rows.
Clustering kmeans(const FeatureMatrix& x, std::size_t k, const KMeansConfig& cfg = {});

/// DB = (1/k) sum_i max_{j != i} (s_i + s_j) / d(c_i, c_j), with s_i the mean
/// Euclidean distance of cluster i's points to c_i. Throws DataError when
/// k < 2, a cluster is empty or two centroids coincide.
double davies_bouldin(const FeatureMatrix& x, const Clustering& c, unsigned threads = 1);

struct SweepEntry {
  std::size_t k = 0;
  double db_index = 0.0;  // +inf for a degenerate clustering
  double inertia = 0.0;
};

struct SweepResult {
  Clustering best;
  std::vector<SweepEntry> table;
};

/// kmeans for each k in [k_min, k_max] (seed derived from cfg.seed and k),
/// keeping the lowest Davies-Bouldin index; ties go to the smaller k.
SweepResult sweep_k(const FeatureMatrix& x, std::size_t k_min, std::size_t k_max,
                    const KMeansConfig& cfg = {});

/// Heuristic role names for generalized-measure centroids given in original
/// units. Other measure sets get empty names.
std::vector<std::string> label_clusters(const FeatureMatrix& centroids);

void write_assignment_csv(std::span<const std::string> labels, const Clustering& c,
                          std::ostream& out);
/// "cluster,size,<columns...>".
void write_centroids_csv(const FeatureMatrix& centroids, std::span<const std::size_t> sizes,
                         std::ostream& out);
void write_sweep_csv(const SweepResult& sweep, std::ostream& out);

struct LabeledAssignment {
  std::vector<std::string> labels;
  std::vector<std::uint32_t> cluster;
};
LabeledAssignment read_assignment_csv(std::istream& in);

}  // namespace capiroles
