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

#include "capiroles/roles.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "capiroles/errors.hpp"
#include "capiroles/parallel.hpp"
#include "capiroles/text_io.hpp"

namespace capiroles {

namespace {

__extension__ typedef unsigned __int128 u128;

constexpr std::size_t kNodeChunk = 4096;

// Neighbor ids of u in the scope, written into `buf` (sorted, unique).
std::span<const NodeId> scoped_neighbors(const DirectedGraph& g, NodeId u, LinkScope scope,
                                         std::vector<NodeId>& buf) {
  switch (scope) {
    case LinkScope::In:
      return g.in_neighbors(u);
    case LinkScope::Out:
      return g.out_neighbors(u);
    case LinkScope::Undirected:
      break;
  }
  const auto a = g.in_neighbors(u);
  const auto b = g.out_neighbors(u);
  buf.clear();
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(buf));
  return buf;
}

LinkProfile profile_of(const DirectedGraph& g, const Partition& p, NodeId u, LinkScope scope,
                       std::vector<NodeId>& nbuf, std::vector<CommunityId>& cbuf) {
  const auto nbrs = scoped_neighbors(g, u, scope, nbuf);
  cbuf.resize(nbrs.size());
  for (std::size_t i = 0; i < nbrs.size(); ++i) cbuf[i] = p.community(nbrs[i]);
  std::sort(cbuf.begin(), cbuf.end());

  LinkProfile prof;
  prof.degree = nbrs.size();
  const CommunityId own = p.community(u);
  u128 ext_sq = 0;
  for (std::size_t i = 0; i < cbuf.size();) {
    std::size_t j = i;
    while (j < cbuf.size() && cbuf[j] == cbuf[i]) ++j;
    const std::uint64_t run = j - i;
    prof.sum_sq_community += run * run;
    if (cbuf[i] == own) {
      prof.internal = run;
    } else {
      ++prof.diversity;
      prof.external += run;
      ext_sq += static_cast<u128>(run) * run;
    }
    i = j;
  }
  if (prof.diversity >= 2) {
    // Population variance from exact integer moments:
    //   var = (k * sum c^2 - (sum c)^2) / k^2
    const u128 k = prof.diversity;
    const u128 s = prof.external;
    const auto num = k * ext_sq - s * s;
    prof.heterogeneity = std::sqrt(static_cast<double>(num)) / static_cast<double>(prof.diversity);
  }
  return prof;
}

std::vector<double> as_double(const std::vector<LinkProfile>& profiles,
                              std::uint64_t LinkProfile::*field) {
  std::vector<double> out(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    out[i] = static_cast<double>(profiles[i].*field);
  }
  return out;
}

std::vector<double> heterogeneity_of(const std::vector<LinkProfile>& profiles) {
  std::vector<double> out(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) out[i] = profiles[i].heterogeneity;
  return out;
}

std::vector<double> participation_of(const std::vector<LinkProfile>& profiles) {
  std::vector<double> out(profiles.size(), 0.0);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& pr = profiles[i];
    if (pr.degree == 0) continue;
    // 1 - sum (d_i/d)^2 = (d^2 - sum d_i^2) / d^2 with exact integers, so
    // the value is a function of the multiset {d_i} alone.
    const u128 d2 = static_cast<u128>(pr.degree) * pr.degree;
    out[i] = static_cast<double>(d2 - pr.sum_sq_community) / static_cast<double>(d2);
  }
  return out;
}

void set_column(FeatureMatrix& fm, std::size_t c, const std::vector<double>& values) {
  for (std::size_t r = 0; r < fm.rows; ++r) fm.at(r, c) = values[r];
}

FeatureMatrix empty_matrix(MeasureSet set, std::size_t rows) {
  FeatureMatrix fm;
  fm.set = set;
  fm.columns = measure_columns(set);
  fm.rows = rows;
  fm.values.assign(rows * fm.columns.size(), 0.0);
  return fm;
}

}  // namespace

std::string_view to_string(MeasureSet set) {
  switch (set) {
    case MeasureSet::Original2:
      return "original";
    case MeasureSet::Directed4:
      return "directed";
    case MeasureSet::Generalized8:
      return "generalized";
  }
  return "?";
}

MeasureSet parse_measure_set(std::string_view name) {
  if (name == "original") return MeasureSet::Original2;
  if (name == "directed") return MeasureSet::Directed4;
  if (name == "generalized") return MeasureSet::Generalized8;
  throw DataError("unknown measure set '" + std::string(name) +
                  "' (expected original, directed or generalized)");
}

std::vector<std::string> measure_columns(MeasureSet set) {
  switch (set) {
    case MeasureSet::Original2:
      return {"z", "P"};
    case MeasureSet::Directed4:
      return {"z_in", "z_out", "P_in", "P_out"};
    case MeasureSet::Generalized8:
      return {"I_int_in", "I_int_out", "I_ext_in", "I_ext_out",
              "D_in",     "D_out",     "H_in",     "H_out"};
  }
  return {};
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
  return out;
}

std::size_t FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == name) return c;
  }
  throw DataError("no column '" + std::string(name) + "'");
}

std::size_t community_degree(const DirectedGraph& g, const Partition& p, NodeId u,
                             CommunityId i, Direction direction) {
  if (u >= g.node_count() || p.node_count() != g.node_count()) {
    throw std::out_of_range("node index out of range");
  }
  if (i >= p.community_count()) throw std::out_of_range("community index out of range");
  std::size_t count = 0;
  for (NodeId v : g.neighbors(u, direction)) count += (p.community(v) == i);
  return count;
}

std::vector<LinkProfile> link_profiles(const DirectedGraph& g, const Partition& p,
                                       LinkScope scope, unsigned threads) {
  if (p.node_count() != g.node_count()) throw DataError("partition does not match graph");
  std::vector<LinkProfile> out(g.node_count());
  parallel_chunks(g.node_count(), kNodeChunk, threads,
                  [&](std::size_t, std::size_t begin, std::size_t end) {
                    std::vector<NodeId> nbuf;
                    std::vector<CommunityId> cbuf;
                    for (std::size_t u = begin; u < end; ++u) {
                      out[u] = profile_of(g, p, static_cast<NodeId>(u), scope, nbuf, cbuf);
                    }
                  });
  return out;
}

std::vector<double> zscore_within_community(std::span<const double> f, const Partition& p) {
  if (f.size() != p.node_count()) throw DataError("value count does not match partition");
  const std::size_t k = p.community_count();
  std::vector<double> sum(k, 0.0), first(k, 0.0), sq(k, 0.0);
  std::vector<char> uniform(k, 1), seen(k, 0);
  for (NodeId u = 0; u < f.size(); ++u) {
    const auto c = p.community(u);
    if (!seen[c]) {
      seen[c] = 1;
      first[c] = f[u];
    } else if (f[u] != first[c]) {
      uniform[c] = 0;
    }
    sum[c] += f[u];
  }
  std::vector<double> mean(k);
  for (std::size_t c = 0; c < k; ++c) mean[c] = sum[c] / static_cast<double>(p.sizes()[c]);
  for (NodeId u = 0; u < f.size(); ++u) {
    const auto c = p.community(u);
    const double d = f[u] - mean[c];
    sq[c] += d * d;
  }
  std::vector<double> sd(k);
  for (std::size_t c = 0; c < k; ++c) sd[c] = std::sqrt(sq[c] / static_cast<double>(p.sizes()[c]));

  std::vector<double> z(f.size(), 0.0);
  for (NodeId u = 0; u < f.size(); ++u) {
    const auto c = p.community(u);
    if (uniform[c] || sd[c] == 0.0) continue;
    z[u] = (f[u] - mean[c]) / sd[c];
  }
  return z;
}

std::vector<double> within_module_degree(const DirectedGraph& g, const Partition& p,
                                         LinkScope scope, unsigned threads) {
  const auto prof = link_profiles(g, p, scope, threads);
  return zscore_within_community(as_double(prof, &LinkProfile::internal), p);
}

std::vector<double> participation(const DirectedGraph& g, const Partition& p, LinkScope scope,
                                  unsigned threads) {
  return participation_of(link_profiles(g, p, scope, threads));
}

FeatureMatrix generalized_measures(const DirectedGraph& g, const Partition& p, unsigned threads) {
  FeatureMatrix fm = empty_matrix(MeasureSet::Generalized8, g.node_count());
  const LinkScope scopes[2] = {LinkScope::In, LinkScope::Out};
  for (std::size_t d = 0; d < 2; ++d) {
    const auto prof = link_profiles(g, p, scopes[d], threads);
    set_column(fm, 0 + d, zscore_within_community(as_double(prof, &LinkProfile::internal), p));
    set_column(fm, 2 + d, zscore_within_community(as_double(prof, &LinkProfile::external), p));
    set_column(fm, 4 + d, zscore_within_community(as_double(prof, &LinkProfile::diversity), p));
    set_column(fm, 6 + d, zscore_within_community(heterogeneity_of(prof), p));
  }
  return fm;
}

FeatureMatrix original_measures(const DirectedGraph& g, const Partition& p, unsigned threads) {
  FeatureMatrix fm = empty_matrix(MeasureSet::Original2, g.node_count());
  const auto prof = link_profiles(g, p, LinkScope::Undirected, threads);
  set_column(fm, 0, zscore_within_community(as_double(prof, &LinkProfile::internal), p));
  set_column(fm, 1, participation_of(prof));
  return fm;
}

FeatureMatrix directed_measures(const DirectedGraph& g, const Partition& p, unsigned threads) {
  FeatureMatrix fm = empty_matrix(MeasureSet::Directed4, g.node_count());
  const LinkScope scopes[2] = {LinkScope::In, LinkScope::Out};
  for (std::size_t d = 0; d < 2; ++d) {
    const auto prof = link_profiles(g, p, scopes[d], threads);
    set_column(fm, 0 + d, zscore_within_community(as_double(prof, &LinkProfile::internal), p));
    set_column(fm, 2 + d, participation_of(prof));
  }
  return fm;
}

FeatureMatrix compute_measures(const DirectedGraph& g, const Partition& p, MeasureSet set,
                               unsigned threads) {
  switch (set) {
    case MeasureSet::Original2:
      return original_measures(g, p, threads);
    case MeasureSet::Directed4:
      return directed_measures(g, p, threads);
    case MeasureSet::Generalized8:
      return generalized_measures(g, p, threads);
  }
  throw DataError("unknown measure set");
}

std::string_view to_string(ThresholdRole role) {
  switch (role) {
    case ThresholdRole::UltraPeripheralNonHub:
      return "ultra-peripheral non-hub";
    case ThresholdRole::PeripheralNonHub:
      return "peripheral non-hub";
    case ThresholdRole::ConnectorNonHub:
      return "connector non-hub";
    case ThresholdRole::KinlessNonHub:
      return "kinless non-hub";
    case ThresholdRole::ProvincialHub:
      return "provincial hub";
    case ThresholdRole::ConnectorHub:
      return "connector hub";
    case ThresholdRole::KinlessHub:
      return "kinless hub";
  }
  return "?";
}

ThresholdRole classify_by_thresholds(double z, double participation) {
  if (std::isnan(z) || std::isnan(participation) || participation < 0.0 || participation > 1.0) {
    throw DataError("participation must lie in [0, 1], got " + format_double(participation));
  }
  const double pc = participation;
  if (z >= 2.5) {
    if (pc <= 0.30) return ThresholdRole::ProvincialHub;
    if (pc <= 0.75) return ThresholdRole::ConnectorHub;
    return ThresholdRole::KinlessHub;
  }
  if (pc <= 0.05) return ThresholdRole::UltraPeripheralNonHub;
  if (pc <= 0.62) return ThresholdRole::PeripheralNonHub;
  if (pc <= 0.80) return ThresholdRole::ConnectorNonHub;
  return ThresholdRole::KinlessNonHub;
}

void write_feature_csv(const DirectedGraph& g, const FeatureMatrix& fm, std::ostream& out) {
  if (fm.rows != g.node_count()) throw DataError("feature rows do not match graph");
  out << "node";
  for (const auto& c : fm.columns) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < fm.rows; ++r) {
    out << csv_field(g.label(static_cast<NodeId>(r)));
    for (double v : fm.row(r)) out << ',' << format_double(v);
    out << '\n';
  }
}

LabeledFeatures read_feature_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty feature file", 1);
  auto header = split_csv(line, 1);
  if (header.empty() || header[0] != "node") throw ParseError("header must start with 'node'", 1);
  header.erase(header.begin());

  LabeledFeatures out;
  bool known = false;
  for (auto set : {MeasureSet::Original2, MeasureSet::Directed4, MeasureSet::Generalized8}) {
    if (measure_columns(set) == header) {
      out.matrix.set = set;
      known = true;
    }
  }
  if (!known) throw ParseError("unrecognized measure columns", 1);
  out.matrix.columns = header;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv(line, line_no);
    if (fields.size() != header.size() + 1) {
      throw ParseError("expected " + std::to_string(header.size() + 1) + " fields", line_no);
    }
    out.labels.push_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      out.matrix.values.push_back(parse_double(fields[c], line_no));
    }
  }
  out.matrix.rows = out.labels.size();
  return out;
}

}  // namespace capiroles
