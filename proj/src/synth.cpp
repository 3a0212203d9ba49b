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

#include "capiroles/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "capiroles/errors.hpp"
#include "capiroles/random.hpp"

namespace capiroles {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DataError("infeasible synthetic spec: " + what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

// Appends u -> v for each v in [begin, end) \ {u} independently with
// probability p, jumping geometrically between hits.
void sample_block(NodeId u, NodeId begin, NodeId end, double p, Rng& rng, std::vector<Arc>& arcs) {
  if (p <= 0.0 || begin >= end) return;
  if (p >= 1.0) {
    for (NodeId v = begin; v < end; ++v) {
      if (v != u) arcs.push_back({u, v});
    }
    return;
  }
  const double log_q = std::log1p(-p);
  double pos = static_cast<double>(begin) - 1.0;
  for (;;) {
    const double r = 1.0 - rng.uniform01();  // (0, 1]
    pos += 1.0 + std::floor(std::log(r) / log_q);
    if (pos >= static_cast<double>(end)) break;
    const auto v = static_cast<NodeId>(pos);
    if (v != u) arcs.push_back({u, v});
  }
}

// k distinct values from pool (partial Fisher-Yates on a copy).
std::vector<NodeId> pick_distinct(std::vector<NodeId> pool, std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

std::string_view to_string(Archetype a) {
  switch (a) {
    case Archetype::Hub:
      return "hub";
    case Archetype::Connector:
      return "connector";
    case Archetype::Kinless:
      return "kinless";
    case Archetype::Peripheral:
      return "peripheral";
  }
  return "?";
}

PlantedGraph generate(const PlantedSpec& spec) {
  const auto& sizes = spec.community_sizes;
  require(!sizes.empty(), "no community");
  require(std::all_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }),
          "empty community");
  require(is_probability(spec.p_intra) && is_probability(spec.p_inter),
          "arc probabilities must lie in [0, 1]");
  const auto& cap = spec.capitalists;
  require(is_probability(cap.reciprocity) && is_probability(cap.ifyfm_share),
          "capitalist rates must lie in [0, 1]");

  const std::size_t k = sizes.size();
  const std::size_t n = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  std::vector<NodeId> start(k + 1, 0);
  for (std::size_t c = 0; c < k; ++c) start[c + 1] = start[c] + static_cast<NodeId>(sizes[c]);

  PlantedGraph pg;
  pg.community.resize(n);
  for (std::size_t c = 0; c < k; ++c) {
    std::fill(pg.community.begin() + start[c], pg.community.begin() + start[c + 1],
              static_cast<std::uint32_t>(c));
  }

  Rng rng(spec.seed);
  std::vector<Arc> arcs;
  for (NodeId u = 0; u < n; ++u) {
    for (std::size_t c = 0; c < k; ++c) {
      const double p = c == pg.community[u] ? spec.p_intra : spec.p_inter;
      sample_block(u, start[c], start[c + 1], p, rng, arcs);
    }
  }

  // Pick planted nodes: role plants round-robin over communities, each a
  // random not-yet-used member; capitalists uniformly among the rest.
  std::vector<std::vector<NodeId>> free_nodes(k);
  for (std::size_t c = 0; c < k; ++c) {
    free_nodes[c].resize(sizes[c]);
    std::iota(free_nodes[c].begin(), free_nodes[c].end(), start[c]);
    rng.shuffle(std::span<NodeId>(free_nodes[c]));
  }
  std::vector<char> used(n, 0);
  std::size_t rr = 0;
  for (const auto& plant : spec.roles) {
    for (std::size_t i = 0; i < plant.count; ++i) {
      std::size_t tries = 0;
      while (free_nodes[rr % k].empty() && tries < k) {
        ++rr;
        ++tries;
      }
      require(!free_nodes[rr % k].empty(), "more role plants than nodes");
      const NodeId u = free_nodes[rr % k].back();
      free_nodes[rr % k].pop_back();
      used[u] = 1;
      pg.roles.push_back({u, plant.archetype});
      ++rr;
    }
  }

  const double ext_pool = static_cast<double>(n) - static_cast<double>(n) / static_cast<double>(k);
  auto plant_of = [&](std::size_t index) -> const RolePlant& {
    std::size_t seen = 0;
    for (const auto& plant : spec.roles) {
      seen += plant.count;
      if (index < seen) return plant;
    }
    return spec.roles.back();
  };

  std::vector<char> peripheral(n, 0);
  for (std::size_t idx = 0; idx < pg.roles.size(); ++idx) {
    const auto [u, archetype] = pg.roles[idx];
    const RolePlant& plant = plant_of(idx);
    const std::size_t own = pg.community[u];
    if (archetype == Archetype::Peripheral) {
      peripheral[u] = 1;
      continue;
    }
    if (archetype == Archetype::Hub) {
      const double base = spec.p_intra * static_cast<double>(sizes[own] - 1);
      const auto want = static_cast<std::size_t>(std::ceil(plant.degree_multiplier * std::max(base, 1.0)));
      require(want <= sizes[own] - 1, "hub degree exceeds its community size");
      std::vector<NodeId> pool;
      for (NodeId v = start[own]; v < start[own + 1]; ++v) {
        if (v != u) pool.push_back(v);
      }
      for (NodeId v : pick_distinct(std::move(pool), want, rng)) {
        arcs.push_back({u, v});
        arcs.push_back({v, u});
      }
      continue;
    }
    std::size_t targets = plant.external_communities;
    if (targets == 0) {
      targets = archetype == Archetype::Kinless
                    ? static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(k - 1)))
                    : std::max<std::size_t>(1, (k - 1) / 2);
    }
    require(targets <= k - 1, "more external communities requested than exist");
    std::vector<NodeId> others;
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own) others.push_back(static_cast<NodeId>(c));
    }
    const auto chosen = pick_distinct(std::move(others), targets, rng);
    const double base = std::max(spec.p_inter * ext_pool, 1.0);
    const auto total = static_cast<std::size_t>(std::ceil(plant.degree_multiplier * base));
    const std::size_t per = std::max<std::size_t>(1, (total + targets - 1) / std::max<std::size_t>(targets, 1));
    for (NodeId c : chosen) {
      require(per <= sizes[c], "external degree exceeds the size of a target community");
      std::vector<NodeId> pool(sizes[c]);
      std::iota(pool.begin(), pool.end(), start[c]);
      for (NodeId v : pick_distinct(std::move(pool), per, rng)) {
        arcs.push_back({u, v});
        arcs.push_back({v, u});
      }
    }
  }

  if (cap.count > 0) {
    std::vector<NodeId> candidates;
    for (NodeId u = 0; u < n; ++u) {
      if (!used[u]) candidates.push_back(u);
    }
    require(cap.count <= candidates.size(), "more capitalists than free nodes");
    pg.capitalists = pick_distinct(candidates, cap.count, rng);
    std::sort(pg.capitalists.begin(), pg.capitalists.end());
    for (NodeId u : pg.capitalists) used[u] = 1;
    std::vector<NodeId> partners_pool;
    for (NodeId v = 0; v < n; ++v) {
      if (!used[v] && !peripheral[v]) partners_pool.push_back(v);
    }
    require(cap.partners <= partners_pool.size(), "capitalist partners exceed available nodes");
    for (NodeId u : pg.capitalists) {
      for (NodeId v : pick_distinct(partners_pool, cap.partners, rng)) {
        if (rng.bernoulli(cap.reciprocity)) {
          arcs.push_back({u, v});
          arcs.push_back({v, u});
        } else if (rng.bernoulli(cap.ifyfm_share)) {
          arcs.push_back({u, v});
        } else {
          arcs.push_back({v, u});
        }
      }
    }
  }

  if (std::find(peripheral.begin(), peripheral.end(), 1) != peripheral.end()) {
    std::erase_if(arcs, [&](const Arc& a) {
      const bool external = pg.community[a.source] != pg.community[a.target];
      return external && (peripheral[a.source] || peripheral[a.target]);
    });
  }

  std::vector<std::string> labels(n);
  for (NodeId u = 0; u < n; ++u) labels[u] = std::to_string(u);
  pg.graph = DirectedGraph::build(std::move(labels), std::move(arcs));
  return pg;
}

void write_ground_truth_csv(const PlantedGraph& pg, std::ostream& out) {
  std::vector<std::string_view> plant(pg.graph.node_count(), "background");
  for (const auto& r : pg.roles) plant[r.node] = to_string(r.archetype);
  for (NodeId u : pg.capitalists) plant[u] = "capitalist";
  out << "node,community,plant\n";
  for (NodeId u = 0; u < pg.graph.node_count(); ++u) {
    out << pg.graph.label(u) << ',' << pg.community[u] << ',' << plant[u] << '\n';
  }
}

}  // namespace capiroles
