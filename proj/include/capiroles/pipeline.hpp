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

// Stage-file pipeline. Every stage reads the artifacts of earlier stages
// from the output directory and writes its own, then records checksums in
// manifest.json. Wall-clock timings go to timings.json so that the other
// files stay reproducible byte for byte.
//
//   ingest       input edge list -> graph.bin
//   communities  graph.bin -> partition.tsv, louvain.json
//   measures     graph.bin, partition.tsv -> features.csv
//   detect       graph.bin -> capitalists.csv
//   cluster      features.csv -> clusters.csv, centroids_*.csv,
//                db_sweep.csv, cluster_summary.csv
//   report       graph.bin, capitalists.csv, clusters.csv ->
//                distribution.{csv,json,txt}, interconnection.{csv,json,dot}

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "capiroles/capitalists.hpp"
#include "capiroles/clustering.hpp"
#include "capiroles/errors.hpp"
#include "capiroles/reports.hpp"
#include "capiroles/roles.hpp"

namespace capiroles {

enum class Stage { Ingest, Communities, Measures, Detect, Cluster, Report, All };

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view name);

struct PipelineConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir = "out";

  DetectionConfig detection;
  std::uint64_t louvain_seed = 0;
  MeasureSet measure_set = MeasureSet::Generalized8;

  std::size_t k_min = 2;
  std::size_t k_max = 15;
  std::uint64_t cluster_seed = 0;
  std::size_t restarts = 10;
  std::size_t max_iterations = 300;
  Normalization normalization = Normalization::ZScore;

  ArcFilter filter;
  Bucketing bucketing = Bucketing::Split;

  unsigned threads = 1;  // 0 = one per hardware thread
};

/// A prerequisite artifact is absent. The message names the stage to run.
class MissingArtifact : public DataError {
 public:
  using DataError::DataError;
};

struct Artifact {
  std::string kind;
  std::filesystem::path path;
};

/// Runs one stage (or all of them in order). Throws on failure; the CLI
/// maps exceptions to exit codes with `exit_code_for`.
std::vector<Artifact> run_stage(Stage stage, const PipelineConfig& cfg, std::ostream& log);

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitInternal = 3 };

/// Runs the stage, prints "ARTIFACT <kind> <path>" lines to `out` and
/// diagnostics to `log`, and returns the process exit code.
int run(Stage stage, const PipelineConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace capiroles
