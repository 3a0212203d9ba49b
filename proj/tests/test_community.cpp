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

#include <numeric>
#include <sstream>

#include "capiroles/community.hpp"
#include "capiroles/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "support.hpp"

using namespace capiroles;
using capiroles::test::from_lines;

namespace {

const char* kTwoTriangles = "1 2\n2 3\n3 1\n4 5\n5 6\n6 4\n";

DirectedGraph two_cliques(std::size_t size) {
  std::ostringstream s;
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        if (i != j) s << b * size + i << ' ' << b * size + j << '\n';
      }
    }
  }
  s << 0 << ' ' << size << '\n' << size << ' ' << 0 << '\n';
  return from_lines(s.str());
}

}  // namespace

TEST_CASE("partition compaction and invariants") {
  const std::vector<std::uint32_t> raw{7, 3, 7, 9, 3};
  const auto p = Partition::from_labels(raw);
  CHECK(p.community_count() == 3);
  CHECK(p.community(0) == 0);
  CHECK(p.community(1) == 1);
  CHECK(p.community(3) == 2);
  CHECK(std::accumulate(p.sizes().begin(), p.sizes().end(), std::size_t{0}) == 5);
  const auto members = p.members();
  CHECK(members[0] == std::vector<NodeId>{0, 2});
  CHECK(Partition::singletons(4).community_count() == 4);
}

TEST_CASE("modularity hand values") {
  const auto g = from_lines(kTwoTriangles);
  CHECK(directed_modularity(g, Partition::from_labels(std::vector<std::uint32_t>(6, 0))) == 0.0);
  const std::vector<std::uint32_t> split{0, 0, 0, 1, 1, 1};
  CHECK(directed_modularity(g, Partition::from_labels(split)) == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<std::uint32_t> swapped{0, 0, 1, 0, 1, 1};
  CHECK(directed_modularity(g, Partition::from_labels(swapped)) < 0.5);
}

TEST_CASE("modularity input validation") {
  const auto g = from_lines(kTwoTriangles);
  CHECK_THROWS_AS(directed_modularity(g, Partition::singletons(5)), DataError);
  const auto isolated = DirectedGraph::build({"a", "b"}, {});
  CHECK_THROWS_AS(directed_modularity(isolated, Partition::singletons(2)), DataError);
}

TEST_CASE("modularity matches the pairwise definition") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rg = test::random_graph(rng, 2 + rng.below(20), 0.2);
    if (rg.graph.arc_count() == 0) continue;
    const auto p = test::random_partition(rng, rg.n, 5);
    const std::vector<std::uint32_t> comm(p.assignment().begin(), p.assignment().end());
    CHECK(test::close(directed_modularity(rg.graph, p), oracle::modularity(rg.n, rg.raw, comm)));
  }
}

TEST_CASE("louvain recovers obvious structure") {
  SUBCASE("two disconnected triangles") {
    const auto g = from_lines(kTwoTriangles);
    const auto r = louvain(g);
    CHECK(r.partition.community_count() == 2);
    CHECK(r.partition.community(0) == r.partition.community(2));
    CHECK(r.partition.community(0) != r.partition.community(3));
    CHECK(r.modularity == doctest::Approx(0.5));
  }
  SUBCASE("complete digraph on four nodes") {
    const auto g = from_lines("1 2\n1 3\n1 4\n2 1\n2 3\n2 4\n3 1\n3 2\n3 4\n4 1\n4 2\n4 3\n");
    CHECK(louvain(g).partition.community_count() == 1);
  }
  SUBCASE("two 5-cliques joined both ways") {
    const auto g = two_cliques(5);
    const auto r = louvain(g);
    REQUIRE(r.partition.community_count() == 2);
    for (NodeId u = 0; u < 10; ++u) {
      CHECK(r.partition.community(u) == r.partition.community(u < 5 ? 0 : 5));
    }
  }
}

TEST_CASE("louvain bookkeeping") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto rg = test::random_graph(rng, 10 + rng.below(60), 0.08);
    if (rg.graph.arc_count() == 0) continue;
    LouvainConfig cfg;
    cfg.seed = trial;
    const auto r = louvain(rg.graph, cfg);
    CHECK(r.modularity == directed_modularity(rg.graph, r.partition));
    for (const auto& lv : r.levels) {
      CHECK(test::close(lv.tracked_modularity, lv.recomputed_modularity, 1e-9));
      if (lv.moves > 0) CHECK(lv.min_accepted_gain > 0.0);
      CHECK(lv.recomputed_modularity >= lv.start_modularity - 1e-12);
    }
  }
}

TEST_CASE("louvain is deterministic per seed and stable across seeds") {
  Rng rng(21);
  const auto rg = test::random_graph(rng, 80, 0.05, false);
  LouvainConfig a;
  a.seed = 3;
  CHECK(louvain(rg.graph, a).partition == louvain(rg.graph, a).partition);
  double lo = 1.0, hi = -1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    LouvainConfig cfg;
    cfg.seed = seed;
    const double q = louvain(rg.graph, cfg).modularity;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  CHECK(hi - lo < 0.05);
}

TEST_CASE("partition file round trip and validation") {
  const auto g = from_lines(kTwoTriangles);
  const std::vector<std::uint32_t> split{0, 0, 0, 1, 1, 1};
  const auto p = Partition::from_labels(split);
  std::ostringstream out;
  write_partition(g, p, out);
  std::istringstream in(out.str());
  CHECK(read_partition(g, in) == p);

  std::istringstream unknown("1\t0\n2\t0\n3\t0\n4\t1\n5\t1\n99\t1\n");
  CHECK_THROWS_AS(read_partition(g, unknown), Error);
  std::istringstream missing("1\t0\n2\t0\n");
  CHECK_THROWS_AS(read_partition(g, missing), Error);
  std::istringstream dup("1\t0\n1\t0\n2\t0\n3\t0\n4\t1\n5\t1\n6\t1\n");
  CHECK_THROWS_AS(read_partition(g, dup), Error);
}
