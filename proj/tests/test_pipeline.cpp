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

#include <set>
#include <sstream>

#include "capiroles/graph.hpp"
#include "capiroles/pipeline.hpp"
#include "capiroles/synth.hpp"
#include "capiroles/text_io.hpp"
#include "doctest.h"
#include "json.hpp"
#include "support.hpp"

using namespace capiroles;
namespace fs = std::filesystem;

namespace {

fs::path write_synth_input(const fs::path& dir) {
  PlantedSpec spec;
  spec.community_sizes.assign(6, 80);
  spec.p_intra = 0.08;
  spec.p_inter = 0.004;
  spec.roles.push_back({Archetype::Kinless, 2, 0, 10.0});
  spec.capitalists.count = 8;
  spec.capitalists.partners = 60;
  spec.seed = 17;
  const auto pg = generate(spec);
  std::ostringstream edges;
  export_edge_list(pg.graph, edges);
  write_file(dir / "edges.txt", edges.str());
  return dir / "edges.txt";
}

PipelineConfig small_config(const fs::path& input, const fs::path& out) {
  PipelineConfig cfg;
  cfg.input = input;
  cfg.output_dir = out;
  cfg.detection.min_followers = 20;
  cfg.detection.min_followees = 20;
  cfg.detection.high_degree = 60;
  cfg.k_max = 8;
  return cfg;
}

std::set<std::string> capitalist_labels(const fs::path& csv) {
  std::istringstream in(read_file(csv));
  std::string line;
  std::getline(in, line);
  std::set<std::string> out;
  while (std::getline(in, line)) out.insert(line.substr(0, line.find(',')));
  return out;
}

}  // namespace

TEST_CASE("stage names") {
  CHECK(parse_stage("measures") == Stage::Measures);
  CHECK(to_string(Stage::All) == "all");
  CHECK_THROWS(parse_stage("deploy"));
}

TEST_CASE("full run writes every artifact") {
  const auto dir = test::scratch_dir("pipeline_all");
  const auto cfg = small_config(write_synth_input(dir), dir / "out");
  std::ostringstream out, log;
  REQUIRE(run(Stage::All, cfg, out, log) == kExitOk);
  for (const char* name : {"graph.bin", "partition.tsv", "features.csv", "capitalists.csv",
                           "clusters.csv", "centroids_normalized.csv", "centroids_original.csv",
                           "db_sweep.csv", "cluster_summary.csv", "distribution.csv",
                           "distribution.json", "distribution.txt", "interconnection.csv",
                           "interconnection.json", "interconnection.dot", "manifest.json",
                           "timings.json"}) {
    INFO(name);
    CHECK(fs::exists(cfg.output_dir / name));
    CHECK(out.str().find(name) != std::string::npos);
  }
  CHECK(out.str().rfind("ARTIFACT graph ", 0) == 0);

  const auto manifest = nlohmann::json::parse(read_file(cfg.output_dir / "manifest.json"));
  CHECK(manifest["stages"]["ingest"]["input_sha256"] == sha256_file(cfg.input));
  CHECK(manifest["stages"]["report"]["artifacts"]["distribution.csv"] ==
        sha256_file(cfg.output_dir / "distribution.csv"));
  CHECK(manifest["config"]["overlap-threshold"] == 0.74);
  CHECK(manifest["config"]["k-min"] == 2);
}

TEST_CASE("stages refuse to run without their inputs") {
  const auto dir = test::scratch_dir("pipeline_gate");
  const auto cfg = small_config(write_synth_input(dir), dir / "out");
  std::ostringstream out, log;
  CHECK(run(Stage::Cluster, cfg, out, log) == kExitData);
  CHECK(log.str().find("run measures first") != std::string::npos);
  CHECK(out.str().empty());

  std::ostringstream log2;
  CHECK(run(Stage::Communities, cfg, out, log2) == kExitData);
  CHECK(log2.str().find("run ingest first") != std::string::npos);

  auto missing = cfg;
  missing.input = dir / "absent.txt";
  std::ostringstream log3;
  CHECK(run(Stage::Ingest, missing, out, log3) == kExitData);
}

TEST_CASE("stricter detection yields a subset and is recorded") {
  const auto dir = test::scratch_dir("pipeline_detect");
  auto cfg = small_config(write_synth_input(dir), dir / "out");
  std::ostringstream out, log;
  REQUIRE(run(Stage::Ingest, cfg, out, log) == kExitOk);
  REQUIRE(run(Stage::Detect, cfg, out, log) == kExitOk);
  const auto loose = capitalist_labels(cfg.output_dir / "capitalists.csv");
  CHECK(!loose.empty());

  cfg.detection.overlap_threshold = 0.9;
  REQUIRE(run(Stage::Detect, cfg, out, log) == kExitOk);
  const auto strict = capitalist_labels(cfg.output_dir / "capitalists.csv");
  for (const auto& s : strict) CHECK(loose.count(s) == 1);
  const auto manifest = nlohmann::json::parse(read_file(cfg.output_dir / "manifest.json"));
  CHECK(manifest["stages"]["detect"]["config"]["overlap-threshold"] == 0.9);
}

TEST_CASE("re-running a stage reproduces its artifacts") {
  const auto dir = test::scratch_dir("pipeline_rerun");
  const auto cfg = small_config(write_synth_input(dir), dir / "out");
  std::ostringstream out, log;
  REQUIRE(run(Stage::All, cfg, out, log) == kExitOk);
  const auto before = read_file(cfg.output_dir / "manifest.json");
  REQUIRE(run(Stage::Cluster, cfg, out, log) == kExitOk);
  REQUIRE(run(Stage::Report, cfg, out, log) == kExitOk);
  CHECK(read_file(cfg.output_dir / "manifest.json") == before);

  auto threaded = cfg;
  threaded.output_dir = dir / "threaded";
  threaded.threads = 3;
  REQUIRE(run(Stage::All, threaded, out, log) == kExitOk);
  for (const char* name : {"features.csv", "clusters.csv", "distribution.json", "interconnection.csv"}) {
    CHECK(read_file(cfg.output_dir / name) == read_file(threaded.output_dir / name));
  }
}
