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

#include "capiroles/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "capiroles/errors.hpp"
#include "capiroles/parallel.hpp"
#include "capiroles/random.hpp"
#include "capiroles/text_io.hpp"

namespace capiroles {

namespace {

constexpr std::size_t kPointChunk = 2048;

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::span<const double> centroid_row(const std::vector<double>& c, std::size_t dims,
                                     std::size_t j) {
  return {c.data() + j * dims, dims};
}

// Result of one assignment step, reduced over chunks in chunk order.
struct AssignStep {
  double inertia = 0.0;
  std::size_t changes = 0;
  std::vector<double> sums;   // k x dims
  std::vector<std::size_t> counts;
};

AssignStep assign_step(const FeatureMatrix& x, const std::vector<double>& centroids,
                       std::size_t k, std::vector<std::uint32_t>& assignment,
                       std::vector<double>& cost, unsigned threads) {
  const std::size_t dims = x.cols();
  const std::size_t chunks = chunk_count(x.rows, kPointChunk);
  std::vector<AssignStep> partial(chunks);
  parallel_chunks(x.rows, kPointChunk, threads, [&](std::size_t chunk, std::size_t begin,
                                                    std::size_t end) {
    AssignStep& part = partial[chunk];
    part.sums.assign(k * dims, 0.0);
    part.counts.assign(k, 0);
    for (std::size_t r = begin; r < end; ++r) {
      const auto row = x.row(r);
      std::uint32_t best = 0;
      double best_d = sq_dist(row, centroid_row(centroids, dims, 0));
      for (std::size_t j = 1; j < k; ++j) {
        const double d = sq_dist(row, centroid_row(centroids, dims, j));
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::uint32_t>(j);
        }
      }
      if (assignment[r] != best) ++part.changes;
      assignment[r] = best;
      cost[r] = best_d;
      part.inertia += best_d;
      ++part.counts[best];
      for (std::size_t c = 0; c < dims; ++c) part.sums[best * dims + c] += row[c];
    }
  });
  AssignStep total;
  total.sums.assign(k * dims, 0.0);
  total.counts.assign(k, 0);
  for (const auto& part : partial) {
    total.inertia += part.inertia;
    total.changes += part.changes;
    for (std::size_t i = 0; i < part.sums.size(); ++i) total.sums[i] += part.sums[i];
    for (std::size_t j = 0; j < k; ++j) total.counts[j] += part.counts[j];
  }
  return total;
}

// Means of the current assignment. Empty clusters take the point farthest
// from its centroid (among clusters that can spare one); that point is
// moved into the empty cluster. Returns true when something was re-seeded.
bool update_centroids(const FeatureMatrix& x, AssignStep& step, std::size_t k,
                      std::vector<std::uint32_t>& assignment, std::vector<double>& cost,
                      std::vector<double>& centroids) {
  const std::size_t dims = x.cols();
  bool reseeded = false;
  for (std::size_t j = 0; j < k; ++j) {
    if (step.counts[j] != 0) continue;
    std::size_t far = x.rows;
    double far_cost = -1.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
      if (step.counts[assignment[r]] > 1 && cost[r] > far_cost) {
        far_cost = cost[r];
        far = r;
      }
    }
    if (far == x.rows) break;  // k > distinct donors; cannot happen when k <= rows
    const auto donor = assignment[far];
    const auto row = x.row(far);
    for (std::size_t c = 0; c < dims; ++c) {
      step.sums[donor * dims + c] -= row[c];
      step.sums[j * dims + c] = row[c];
    }
    --step.counts[donor];
    step.counts[j] = 1;
    assignment[far] = static_cast<std::uint32_t>(j);
    cost[far] = 0.0;
    reseeded = true;
  }
  for (std::size_t j = 0; j < k; ++j) {
    const double inv = 1.0 / static_cast<double>(step.counts[j]);
    for (std::size_t c = 0; c < dims; ++c) centroids[j * dims + c] = step.sums[j * dims + c] * inv;
  }
  return reseeded;
}

std::vector<double> plus_plus_seeds(const FeatureMatrix& x, std::size_t k, Rng& rng) {
  const std::size_t dims = x.cols();
  std::vector<double> centroids(k * dims);
  std::vector<double> d2(x.rows, std::numeric_limits<double>::infinity());
  std::size_t pick = rng.below(x.rows);
  for (std::size_t j = 0; j < k; ++j) {
    std::copy_n(x.row(pick).begin(), dims, centroids.begin() + static_cast<std::ptrdiff_t>(j * dims));
    if (j + 1 == k) break;
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
      d2[r] = std::min(d2[r], sq_dist(x.row(r), centroid_row(centroids, dims, j)));
      total += d2[r];
    }
    if (total <= 0.0) {
      pick = rng.below(x.rows);
      continue;
    }
    const double target = rng.uniform01() * total;
    double acc = 0.0;
    pick = x.rows - 1;
    for (std::size_t r = 0; r < x.rows; ++r) {
      acc += d2[r];
      if (acc > target && d2[r] > 0.0) {
        pick = r;
        break;
      }
    }
  }
  return centroids;
}

Clustering lloyd(const FeatureMatrix& x, std::size_t k, std::uint64_t seed,
                 const KMeansConfig& cfg) {
  Rng rng(seed);
  std::vector<double> centroids = plus_plus_seeds(x, k, rng);
  std::vector<std::uint32_t> assignment(x.rows, std::numeric_limits<std::uint32_t>::max());
  std::vector<double> cost(x.rows, 0.0);

  Clustering out;
  double prev = std::numeric_limits<double>::infinity();
  bool stop_early = false;
  AssignStep step;
  // Main Lloyd loop. The tolerance rule only ends the improvement phase;
  // the loop keeps going until the assignment is stable so that centroids
  // and assignment agree on return.
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    step = assign_step(x, centroids, k, assignment, cost, cfg.threads);
    out.inertia_trace.push_back(step.inertia);
    ++out.iterations;
    const bool has_empty = std::find(step.counts.begin(), step.counts.end(), 0u) != step.counts.end();
    if (it > 0 && step.changes == 0 && !has_empty) break;
    if (!stop_early && std::isfinite(prev)) {
      stop_early = step.inertia == 0.0 || (prev > 0.0 && (prev - step.inertia) / prev < cfg.tolerance);
    }
    prev = step.inertia;
    update_centroids(x, step, k, assignment, cost, centroids);
    if (stop_early && !has_empty) {
      // One last consistency pass instead of further optimization.
      auto check = assign_step(x, centroids, k, assignment, cost, cfg.threads);
      out.inertia_trace.push_back(check.inertia);
      ++out.iterations;
      const bool empty_again =
          std::find(check.counts.begin(), check.counts.end(), 0u) != check.counts.end();
      step = std::move(check);
      if (step.changes == 0 && !empty_again) break;
      update_centroids(x, step, k, assignment, cost, centroids);
    }
  }
  // Centroids as means of the final assignment.
  update_centroids(x, step, k, assignment, cost, centroids);

  out.k = k;
  out.assignment = std::move(assignment);
  out.sizes = step.counts;
  out.centroids.set = x.set;
  out.centroids.columns = x.columns;
  out.centroids.rows = k;
  out.centroids.values = std::move(centroids);
  double inertia = 0.0;
  for (std::size_t r = 0; r < x.rows; ++r) {
    inertia += sq_dist(x.row(r), out.centroids.row(out.assignment[r]));
  }
  out.inertia = inertia;
  out.db_index = std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace

std::string_view to_string(Normalization n) {
  return n == Normalization::ZScore ? "zscore" : "minmax";
}

Normalization parse_normalization(std::string_view name) {
  if (name == "zscore") return Normalization::ZScore;
  if (name == "minmax") return Normalization::MinMax;
  throw DataError("unknown normalization '" + std::string(name) + "' (expected zscore or minmax)");
}

double ColumnTransform::forward(std::size_t col, double x) const {
  return scale[col] == 0.0 ? 0.0 : (x - offset[col]) / scale[col];
}

double ColumnTransform::inverse(std::size_t col, double y) const {
  return scale[col] == 0.0 ? offset[col] : y * scale[col] + offset[col];
}

NormalizedFeatures normalize(const FeatureMatrix& x, Normalization method) {
  if (x.rows < 2) throw DataError("normalization needs at least two rows");
  NormalizedFeatures out;
  out.transform.method = method;
  out.transform.offset.resize(x.cols());
  out.transform.scale.resize(x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double lo = x.at(0, c), hi = x.at(0, c), sum = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
      lo = std::min(lo, x.at(r, c));
      hi = std::max(hi, x.at(r, c));
      sum += x.at(r, c);
    }
    if (lo == hi) {
      out.transform.offset[c] = lo;
      out.transform.scale[c] = 0.0;
      continue;
    }
    if (method == Normalization::MinMax) {
      out.transform.offset[c] = lo;
      out.transform.scale[c] = hi - lo;
      continue;
    }
    const double mean = sum / static_cast<double>(x.rows);
    double sq = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
      const double d = x.at(r, c) - mean;
      sq += d * d;
    }
    out.transform.offset[c] = mean;
    out.transform.scale[c] = std::sqrt(sq / static_cast<double>(x.rows));
  }
  out.matrix = x;
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      out.matrix.at(r, c) = out.transform.forward(c, x.at(r, c));
    }
  }
  return out;
}

FeatureMatrix denormalize(const FeatureMatrix& y, const ColumnTransform& t) {
  FeatureMatrix out = y;
  for (std::size_t r = 0; r < y.rows; ++r) {
    for (std::size_t c = 0; c < y.cols(); ++c) out.at(r, c) = t.inverse(c, y.at(r, c));
  }
  return out;
}

Clustering kmeans(const FeatureMatrix& x, std::size_t k, const KMeansConfig& cfg) {
  if (k < 1) throw DataError("k must be at least 1");
  if (k > x.rows) {
    throw DataError("k = " + std::to_string(k) + " exceeds the " + std::to_string(x.rows) +
                    " available rows");
  }
  Clustering best;
  const std::size_t restarts = std::max<std::size_t>(cfg.restarts, 1);
  for (std::size_t r = 0; r < restarts; ++r) {
    Clustering run = lloyd(x, k, derive_seed(cfg.seed, r), cfg);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

double davies_bouldin(const FeatureMatrix& x, const Clustering& c, unsigned threads) {
  const std::size_t k = c.k;
  if (k < 2) throw DataError("Davies-Bouldin needs at least two clusters");
  if (c.assignment.size() != x.rows) throw DataError("clustering does not match data");
  const std::size_t chunks = chunk_count(x.rows, kPointChunk);
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(k, 0.0));
  parallel_chunks(x.rows, kPointChunk, threads,
                  [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                    for (std::size_t r = begin; r < end; ++r) {
                      const auto j = c.assignment[r];
                      partial[chunk][j] += std::sqrt(sq_dist(x.row(r), c.centroids.row(j)));
                    }
                  });
  std::vector<double> scatter(k, 0.0);
  std::vector<std::size_t> counts(k, 0);
  for (const auto& part : partial) {
    for (std::size_t j = 0; j < k; ++j) scatter[j] += part[j];
  }
  for (auto a : c.assignment) ++counts[a];
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] == 0) throw DataError("degenerate clustering: cluster " + std::to_string(j) + " is empty");
    scatter[j] /= static_cast<double>(counts[j]);
  }
  double db = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double d = std::sqrt(sq_dist(c.centroids.row(i), c.centroids.row(j)));
      if (d == 0.0) {
        throw DataError("degenerate clustering: centroids " + std::to_string(i) + " and " +
                        std::to_string(j) + " coincide");
      }
      worst = std::max(worst, (scatter[i] + scatter[j]) / d);
    }
    db += worst;
  }
  return db / static_cast<double>(k);
}

SweepResult sweep_k(const FeatureMatrix& x, std::size_t k_min, std::size_t k_max,
                    const KMeansConfig& cfg) {
  if (k_min < 2 || k_min > k_max) throw DataError("k range must satisfy 2 <= k_min <= k_max");
  if (k_max > x.rows) {
    throw DataError("k_max = " + std::to_string(k_max) + " exceeds the " +
                    std::to_string(x.rows) + " available rows");
  }
  const std::size_t span = k_max - k_min + 1;
  std::vector<Clustering> runs(span);
  // Parallel over k when several workers are available; each run then uses
  // a single worker. Chunking inside kmeans is worker-independent, so both
  // paths give identical results.
  const unsigned workers = resolve_threads(cfg.threads);
  KMeansConfig inner = cfg;
  inner.threads = workers > 1 && span > 1 ? 1 : cfg.threads;
  parallel_chunks(span, 1, workers > 1 ? workers : 1,
                  [&](std::size_t, std::size_t begin, std::size_t end) {
                    for (std::size_t i = begin; i < end; ++i) {
                      KMeansConfig local = inner;
                      local.seed = derive_seed(cfg.seed, 1000 + k_min + i);
                      runs[i] = kmeans(x, k_min + i, local);
                      try {
                        runs[i].db_index = davies_bouldin(x, runs[i], local.threads);
                      } catch (const DataError&) {
                        runs[i].db_index = std::numeric_limits<double>::infinity();
                      }
                    }
                  });
  SweepResult out;
  std::size_t best = span;
  for (std::size_t i = 0; i < span; ++i) {
    out.table.push_back({k_min + i, runs[i].db_index, runs[i].inertia});
    if (std::isfinite(runs[i].db_index) && (best == span || runs[i].db_index < runs[best].db_index)) {
      best = i;
    }
  }
  if (best == span) throw DataError("every clustering in the k sweep was degenerate");
  out.best = std::move(runs[best]);
  return out;
}

std::vector<std::string> label_clusters(const FeatureMatrix& centroids) {
  std::vector<std::string> names(centroids.rows);
  if (centroids.set != MeasureSet::Generalized8) return names;
  const auto col = [&](std::string_view n) { return centroids.column_index(n); };
  const std::size_t iin = col("I_int_in"), iout = col("I_int_out");
  const std::size_t ein = col("I_ext_in"), eout = col("I_ext_out");
  const std::size_t din = col("D_in"), dout = col("D_out");
  const std::size_t hin = col("H_in"), hout = col("H_out");
  for (std::size_t r = 0; r < centroids.rows; ++r) {
    const auto v = [&](std::size_t c) { return centroids.at(r, c); };
    const bool hub = (v(iin) + v(iout)) / 2.0 >= 1.0;
    const double ext[6] = {v(ein), v(eout), v(din), v(dout), v(hin), v(hout)};
    const double ext_mean = std::accumulate(std::begin(ext), std::end(ext), 0.0) / 6.0;
    const bool all_negative = std::all_of(std::begin(ext), std::end(ext), [](double e) { return e < 0.0; });
    const double intensity = (v(ein) + v(eout)) / 2.0;
    const double diversity = (v(din) + v(dout)) / 2.0;

    std::string tier;
    if (ext_mean >= 10.0) {
      tier = "kinless";
    } else if (intensity > 0.1 && diversity > 0.5) {
      tier = "connector";
    } else if (all_negative) {
      tier = hub ? "provincial" : "ultra-peripheral";
    } else if (hub) {
      tier = "provincial";
    } else {
      tier = "peripheral";
      if (v(din) > v(dout)) tier = "incoming peripheral";
      if (v(dout) > v(din)) tier = "outgoing peripheral";
    }
    names[r] = tier + (hub ? " hub" : " non-hub");
  }
  return names;
}

void write_assignment_csv(std::span<const std::string> labels, const Clustering& c,
                          std::ostream& out) {
  if (labels.size() != c.assignment.size()) throw DataError("labels do not match clustering");
  out << "node_label,cluster\n";
  for (std::size_t r = 0; r < labels.size(); ++r) {
    out << csv_field(labels[r]) << ',' << c.assignment[r] << '\n';
  }
}

void write_centroids_csv(const FeatureMatrix& centroids, std::span<const std::size_t> sizes,
                         std::ostream& out) {
  out << "cluster,size";
  for (const auto& col : centroids.columns) out << ',' << col;
  out << '\n';
  for (std::size_t r = 0; r < centroids.rows; ++r) {
    out << r << ',' << sizes[r];
    for (double v : centroids.row(r)) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
  out << "k,davies_bouldin,inertia,selected\n";
  for (const auto& e : sweep.table) {
    out << e.k << ',' << format_double(e.db_index) << ',' << format_double(e.inertia) << ','
        << (e.k == sweep.best.k ? 1 : 0) << '\n';
  }
}

LabeledAssignment read_assignment_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("node_label,cluster", 0) != 0) {
    throw ParseError("missing assignment CSV header", 1);
  }
  LabeledAssignment out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line, line_no);
    if (f.size() != 2) throw ParseError("expected 2 fields", line_no);
    out.labels.push_back(f[0]);
    out.cluster.push_back(static_cast<std::uint32_t>(parse_uint(f[1], line_no)));
  }
  return out;
}

}  // namespace capiroles
