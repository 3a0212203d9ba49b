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

#include "capiroles/community.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "capiroles/errors.hpp"
#include "capiroles/random.hpp"
#include "capiroles/text_io.hpp"

namespace capiroles {

Partition Partition::from_labels(std::span<const std::uint32_t> labels) {
  Partition p;
  p.assignment_.resize(labels.size());
  std::vector<CommunityId> remap;
  constexpr CommunityId kUnset = std::numeric_limits<CommunityId>::max();
  for (std::size_t u = 0; u < labels.size(); ++u) {
    const auto l = labels[u];
    if (l >= remap.size()) remap.resize(static_cast<std::size_t>(l) + 1, kUnset);
    if (remap[l] == kUnset) {
      remap[l] = static_cast<CommunityId>(p.sizes_.size());
      p.sizes_.push_back(0);
    }
    p.assignment_[u] = remap[l];
    ++p.sizes_[remap[l]];
  }
  return p;
}

Partition Partition::singletons(std::size_t n) {
  std::vector<std::uint32_t> labels(n);
  std::iota(labels.begin(), labels.end(), 0u);
  return from_labels(labels);
}

std::vector<std::vector<NodeId>> Partition::members() const {
  std::vector<std::vector<NodeId>> out(community_count());
  for (std::size_t c = 0; c < out.size(); ++c) out[c].reserve(sizes_[c]);
  for (NodeId u = 0; u < assignment_.size(); ++u) out[assignment_[u]].push_back(u);
  return out;
}

double directed_modularity(const DirectedGraph& g, const Partition& p) {
  if (g.arc_count() == 0) throw DataError("modularity is undefined on a graph without arcs");
  if (p.node_count() != g.node_count()) {
    throw DataError("partition covers " + std::to_string(p.node_count()) + " nodes, graph has " +
                    std::to_string(g.node_count()));
  }
  const std::size_t k = p.community_count();
  std::vector<std::uint64_t> inside(k, 0), out_sum(k, 0), in_sum(k, 0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const CommunityId cu = p.community(u);
    const auto row = g.out_neighbors(u);
    out_sum[cu] += row.size();
    in_sum[cu] += g.in_neighbors(u).size();
    for (NodeId v : row) inside[cu] += (p.community(v) == cu);
  }
  __extension__ typedef unsigned __int128 u128;
  const u128 m = g.arc_count();
  u128 e = 0, null_model = 0;
  for (std::size_t c = 0; c < k; ++c) {
    e += inside[c];
    null_model += static_cast<u128>(out_sum[c]) * in_sum[c];
  }
  // (m*E - S) / m^2, both terms exact; S <= m^2 so the difference is signed.
  const u128 lhs = m * e;
  const double numerator = lhs >= null_model ? static_cast<double>(lhs - null_model)
                                             : -static_cast<double>(null_model - lhs);
  return numerator / static_cast<double>(m * m);
}

namespace {

// Weighted digraph used across Louvain levels. Self-loop weight is kept
// apart from the adjacency rows.
struct LevelGraph {
  std::size_t n = 0;
  double total = 0.0;
  std::vector<std::uint64_t> out_off, in_off;
  std::vector<NodeId> out_to, in_from;
  std::vector<double> out_w, in_w;
  std::vector<double> self, dout, din;
};

LevelGraph transpose_fill(LevelGraph lg) {
  const std::size_t n = lg.n;
  lg.in_off.assign(n + 1, 0);
  for (NodeId v : lg.out_to) ++lg.in_off[v + 1];
  std::partial_sum(lg.in_off.begin(), lg.in_off.end(), lg.in_off.begin());
  lg.in_from.resize(lg.out_to.size());
  lg.in_w.resize(lg.out_to.size());
  std::vector<std::uint64_t> cursor(lg.in_off.begin(), lg.in_off.end() - 1);
  for (NodeId u = 0; u < n; ++u) {
    for (auto e = lg.out_off[u]; e < lg.out_off[u + 1]; ++e) {
      const auto slot = cursor[lg.out_to[e]]++;
      lg.in_from[slot] = u;
      lg.in_w[slot] = lg.out_w[e];
    }
  }
  lg.dout.assign(n, 0.0);
  lg.din.assign(n, 0.0);
  for (NodeId u = 0; u < n; ++u) {
    double so = lg.self[u], si = lg.self[u];
    for (auto e = lg.out_off[u]; e < lg.out_off[u + 1]; ++e) so += lg.out_w[e];
    for (auto e = lg.in_off[u]; e < lg.in_off[u + 1]; ++e) si += lg.in_w[e];
    lg.dout[u] = so;
    lg.din[u] = si;
  }
  return lg;
}

LevelGraph from_graph(const DirectedGraph& g) {
  LevelGraph lg;
  lg.n = g.node_count();
  lg.out_off.assign(lg.n + 1, 0);
  for (NodeId u = 0; u < lg.n; ++u) lg.out_off[u + 1] = lg.out_off[u] + g.out_neighbors(u).size();
  lg.out_to.reserve(g.arc_count());
  for (NodeId u = 0; u < lg.n; ++u) {
    const auto row = g.out_neighbors(u);
    lg.out_to.insert(lg.out_to.end(), row.begin(), row.end());
  }
  lg.out_w.assign(g.arc_count(), 1.0);
  lg.self.assign(lg.n, 0.0);
  lg.total = static_cast<double>(g.arc_count());
  return transpose_fill(std::move(lg));
}

// Modularity of `comm` on the level graph, from scratch.
double level_modularity(const LevelGraph& lg, std::span<const CommunityId> comm,
                        std::size_t communities) {
  std::vector<double> inside(communities, 0.0), tot_out(communities, 0.0),
      tot_in(communities, 0.0);
  for (NodeId u = 0; u < lg.n; ++u) {
    const auto c = comm[u];
    inside[c] += lg.self[u];
    tot_out[c] += lg.dout[u];
    tot_in[c] += lg.din[u];
    for (auto e = lg.out_off[u]; e < lg.out_off[u + 1]; ++e) {
      if (comm[lg.out_to[e]] == c) inside[c] += lg.out_w[e];
    }
  }
  const double m = lg.total;
  double q = 0.0;
  for (std::size_t c = 0; c < communities; ++c) {
    q += inside[c] / m - tot_out[c] * tot_in[c] / (m * m);
  }
  return q;
}

// Renumbers in order of first appearance; returns the community count.
std::size_t compact(std::vector<CommunityId>& comm) {
  constexpr CommunityId kUnset = std::numeric_limits<CommunityId>::max();
  std::vector<CommunityId> remap(comm.size(), kUnset);
  CommunityId next = 0;
  for (auto& c : comm) {
    if (remap[c] == kUnset) remap[c] = next++;
    c = remap[c];
  }
  return next;
}

class LocalMover {
 public:
  LocalMover(const LevelGraph& lg, Rng& rng, NodeOrder order)
      : lg_(lg), rng_(rng), order_policy_(order) {}

  // Runs sweeps until one accepts no move. Leaves a compacted assignment.
  LouvainLevel run(std::vector<CommunityId>& comm) {
    const std::size_t n = lg_.n;
    const double m = lg_.total;
    comm.resize(n);
    std::iota(comm.begin(), comm.end(), CommunityId{0});
    tot_out_ = lg_.dout;
    tot_in_ = lg_.din;
    weight_.assign(n, 0.0);
    touched_.clear();

    LouvainLevel level;
    level.nodes = n;
    level.start_modularity = level_modularity(lg_, comm, n);
    level.min_accepted_gain = std::numeric_limits<double>::infinity();
    double tracked = level.start_modularity;

    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    for (;;) {
      if (order_policy_ == NodeOrder::Shuffled) rng_.shuffle(std::span<NodeId>(order));
      std::size_t moves = 0;
      for (NodeId u : order) {
        const CommunityId from = comm[u];
        gather(u, comm);
        if (weight_[from] == 0.0 && std::find(touched_.begin(), touched_.end(), from) ==
                                        touched_.end()) {
          touched_.push_back(from);
        }
        tot_out_[from] -= lg_.dout[u];
        tot_in_[from] -= lg_.din[u];

        const double stay = gain(u, from);
        CommunityId best = from;
        double best_gain = stay;
        for (CommunityId c : touched_) {
          const double g = gain(u, c);
          if (g > best_gain) {
            best_gain = g;
            best = c;
          }
        }
        const double eps = 1e-12 * (1.0 + std::abs(stay) + std::abs(best_gain));
        if (best != from && best_gain - stay > eps) {
          const double dq = (best_gain - stay) / m;
          tracked += dq;
          level.min_accepted_gain = std::min(level.min_accepted_gain, dq);
          comm[u] = best;
          ++moves;
        } else {
          best = from;
        }
        tot_out_[best] += lg_.dout[u];
        tot_in_[best] += lg_.din[u];
        for (CommunityId c : touched_) weight_[c] = 0.0;
        touched_.clear();
      }
      ++level.sweeps;
      level.moves += moves;
      if (moves == 0) break;
    }
    level.communities = compact(comm);
    level.tracked_modularity = tracked;
    level.recomputed_modularity = level_modularity(lg_, comm, level.communities);
    return level;
  }

 private:
  // Accumulates arc weight between u and each neighboring community, both
  // directions, into weight_.
  void gather(NodeId u, std::span<const CommunityId> comm) {
    auto add = [&](NodeId v, double w) {
      const auto c = comm[v];
      if (weight_[c] == 0.0) touched_.push_back(c);
      weight_[c] += w;
    };
    for (auto e = lg_.out_off[u]; e < lg_.out_off[u + 1]; ++e) add(lg_.out_to[e], lg_.out_w[e]);
    for (auto e = lg_.in_off[u]; e < lg_.in_off[u + 1]; ++e) add(lg_.in_from[e], lg_.in_w[e]);
  }

  // m * (modularity change of inserting the isolated node u into c).
  double gain(NodeId u, CommunityId c) const {
    return weight_[c] - (lg_.dout[u] * tot_in_[c] + lg_.din[u] * tot_out_[c]) / lg_.total;
  }

  const LevelGraph& lg_;
  Rng& rng_;
  NodeOrder order_policy_;
  std::vector<double> tot_out_, tot_in_, weight_;
  std::vector<CommunityId> touched_;
};

LevelGraph aggregate(const LevelGraph& lg, std::span<const CommunityId> comm,
                     std::size_t communities) {
  std::vector<std::vector<NodeId>> members(communities);
  for (NodeId u = 0; u < lg.n; ++u) members[comm[u]].push_back(u);

  LevelGraph next;
  next.n = communities;
  next.total = lg.total;
  next.self.assign(communities, 0.0);
  next.out_off.assign(communities + 1, 0);
  std::vector<double> scratch(communities, 0.0);
  std::vector<NodeId> touched;
  for (CommunityId c = 0; c < communities; ++c) {
    for (NodeId u : members[c]) {
      next.self[c] += lg.self[u];
      for (auto e = lg.out_off[u]; e < lg.out_off[u + 1]; ++e) {
        const auto cv = comm[lg.out_to[e]];
        if (cv == c) {
          next.self[c] += lg.out_w[e];
        } else {
          if (scratch[cv] == 0.0) touched.push_back(cv);
          scratch[cv] += lg.out_w[e];
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (NodeId cv : touched) {
      next.out_to.push_back(cv);
      next.out_w.push_back(scratch[cv]);
      scratch[cv] = 0.0;
    }
    touched.clear();
    next.out_off[c + 1] = next.out_to.size();
  }
  return transpose_fill(std::move(next));
}

}  // namespace

LouvainResult louvain(const DirectedGraph& g, const LouvainConfig& cfg) {
  if (g.arc_count() == 0) throw DataError("louvain needs at least one arc");
  Rng rng(cfg.seed);
  LevelGraph lg = from_graph(g);
  std::vector<CommunityId> node_comm(g.node_count());
  std::iota(node_comm.begin(), node_comm.end(), CommunityId{0});

  LouvainResult result;
  std::vector<CommunityId> comm;
  for (std::size_t depth = 0; depth < cfg.max_levels; ++depth) {
    LocalMover mover(lg, rng, cfg.node_order);
    LouvainLevel level = mover.run(comm);
    result.levels.push_back(level);
    if (level.moves == 0) break;
    for (auto& c : node_comm) c = comm[c];
    if (level.recomputed_modularity - level.start_modularity <= cfg.min_level_gain ||
        level.communities == lg.n) {
      break;
    }
    lg = aggregate(lg, comm, level.communities);
  }
  result.partition = Partition::from_labels(node_comm);
  result.modularity = directed_modularity(g, result.partition);
  return result;
}

void write_partition(const DirectedGraph& g, const Partition& p, std::ostream& out) {
  if (p.node_count() != g.node_count()) throw DataError("partition does not match graph");
  for (NodeId u = 0; u < g.node_count(); ++u) out << g.label(u) << '\t' << p.community(u) << '\n';
}

Partition read_partition(const DirectedGraph& g, std::istream& in) {
  constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> labels(g.node_count(), kUnset);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_whitespace(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) throw ParseError("expected 'label<TAB>community'", line_no);
    const auto u = g.find(tokens[0]);
    if (!u) throw ParseError("unknown node '" + std::string(tokens[0]) + "'", line_no);
    if (labels[*u] != kUnset) {
      throw ParseError("node '" + std::string(tokens[0]) + "' listed twice", line_no);
    }
    const auto c = parse_uint(tokens[1], line_no);
    if (c >= kUnset) throw ParseError("community index too large", line_no);
    labels[*u] = static_cast<std::uint32_t>(c);
  }
  for (NodeId u = 0; u < labels.size(); ++u) {
    if (labels[u] == kUnset) throw DataError("partition misses node '" + g.label(u) + "'");
  }
  return Partition::from_labels(labels);
}

}  // namespace capiroles
