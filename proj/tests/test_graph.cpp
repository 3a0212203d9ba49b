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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "capiroles/errors.hpp"
#include "capiroles/graph.hpp"
#include "capiroles/text_io.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace capiroles;
using capiroles::test::from_lines;

TEST_CASE("ingestion hand example") {
  const auto g = from_lines("a b\nb a\na c\n");
  CHECK(g.node_count() == 3);
  CHECK(g.arc_count() == 3);
  const NodeId a = *g.find("a");
  CHECK(g.degree(a, Direction::Out) == 2);
  CHECK(g.degree(a, Direction::In) == 1);
}

TEST_CASE("self-loops and duplicates are dropped and counted") {
  std::istringstream loop("a a\n");
  const auto r1 = ingest_edge_list(loop);
  CHECK(r1.graph.node_count() == 1);
  CHECK(r1.graph.arc_count() == 0);
  CHECK(r1.stats.self_loops_removed == 1);

  std::istringstream dup("a b\na b\n");
  const auto r2 = ingest_edge_list(dup);
  CHECK(r2.graph.arc_count() == 1);
  CHECK(r2.stats.duplicates_removed == 1);
}

TEST_CASE("comments, blank lines and malformed lines") {
  std::istringstream ok("# header\n\n% note\n1 2\n");
  const auto r = ingest_edge_list(ok);
  CHECK(r.graph.arc_count() == 1);
  CHECK(r.stats.skipped_lines == 3);

  std::istringstream bad("1 2\n3\n");
  try {
    ingest_edge_list(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream three("1 2 3\n");
  CHECK_THROWS_AS(ingest_edge_list(three), ParseError);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(ingest_edge_list(empty), DataError);
}

TEST_CASE("degree edge cases") {
  const auto g = DirectedGraph::build({"c", "x", "y", "z", "lonely"}, {{0, 1}, {0, 2}, {0, 3}});
  CHECK(g.degree(0, Direction::Out) == 3);
  CHECK(g.degree(4, Direction::Out) == 0);
  CHECK(g.degree(4, Direction::In) == 0);
  CHECK_THROWS_AS(g.degree(5, Direction::In), std::out_of_range);
}

TEST_CASE("labels are ordered numerically then bytewise") {
  const auto g = from_lines("10 2\nb 9\na 10\n");
  REQUIRE(g.node_count() == 5);
  CHECK(g.label(0) == "2");
  CHECK(g.label(1) == "9");
  CHECK(g.label(2) == "10");
  CHECK(g.label(3) == "a");
  CHECK(g.label(4) == "b");
  CHECK(label_less("9", "10"));
  CHECK_FALSE(label_less("10", "9"));
  CHECK(label_less("10", "a"));
}

TEST_CASE("line order does not change the structure") {
  const auto g1 = from_lines("1 2\n2 3\n3 1\n4 1\n");
  const auto g2 = from_lines("4 1\n3 1\n2 3\n1 2\n");
  CHECK(g1 == g2);
}

TEST_CASE("structural invariants on random graphs") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rg = test::random_graph(rng, 1 + rng.below(40), 0.1);
    const auto& g = rg.graph;
    std::size_t out_sum = 0, in_sum = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) {
      const auto out = g.out_neighbors(u);
      const auto in = g.in_neighbors(u);
      out_sum += out.size();
      in_sum += in.size();
      for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i - 1] < out[i]);
      for (std::size_t i = 1; i < in.size(); ++i) CHECK(in[i - 1] < in[i]);
      for (NodeId v : out) {
        CHECK(v != u);
        const auto back = g.in_neighbors(v);
        CHECK(std::binary_search(back.begin(), back.end(), u));
      }
      // Brute-force in-degree from the raw list after cleanup.
      std::set<NodeId> sources;
      for (const Arc& a : rg.raw) {
        if (a.target == u && a.source != u) sources.insert(a.source);
      }
      CHECK(g.degree(u, Direction::In) == sources.size());
    }
    CHECK(out_sum == g.arc_count());
    CHECK(in_sum == g.arc_count());
  }
}

TEST_CASE("export and re-ingest round trip, including isolated nodes") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rg = test::random_graph(rng, 2 + rng.below(30), 0.05);
    std::ostringstream out;
    export_edge_list(rg.graph, out);
    std::istringstream in(out.str());
    const auto back = ingest_edge_list(in).graph;
    CHECK(back == rg.graph);
  }
}

TEST_CASE("binary cache round trip and corruption") {
  const auto dir = test::scratch_dir("graph_cache");
  const auto g = from_lines("alice bob\nbob carol\ncarol alice\n7 alice\n");
  save_graph_cache(g, dir / "g.bin");
  CHECK(load_graph_cache(dir / "g.bin") == g);

  std::string bytes = read_file(dir / "g.bin");
  bytes[0] = 'X';
  {
    std::ofstream f(dir / "bad.bin", std::ios::binary);
    f << bytes;
  }
  CHECK_THROWS_AS(load_graph_cache(dir / "bad.bin"), Error);
  CHECK_THROWS_AS(load_graph_cache(dir / "missing.bin"), IoError);
}
