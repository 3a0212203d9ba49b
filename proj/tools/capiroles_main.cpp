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

// capiroles <stage> [options]
//
// Options may also come from a flat key=value file given with --config;
// keys are the long option names without the leading dashes. Flags given
// on the command line win over the file.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "capiroles/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace capiroles;
  PipelineConfig cfg;
  std::string stage_name;
  std::string measures = std::string(to_string(cfg.measure_set));
  std::string normalization = std::string(to_string(cfg.normalization));
  std::string bucketing = std::string(to_string(cfg.bucketing));
  std::string input, output = cfg.output_dir.string();

  CLI::App app{"Social capitalist role analysis of directed follower graphs"};
  app.set_config("--config", "", "Flat key=value configuration file");
  app.add_option("stage", stage_name, "Stage to run")
      ->required()
      ->check(CLI::IsMember(
          {"ingest", "communities", "measures", "detect", "cluster", "report", "all"}));
  app.add_option("-i,--input", input, "Edge list (one 'source target' pair per line)");
  app.add_option("-o,--output", output, "Artifact directory")->capture_default_str();

  auto& d = cfg.detection;
  app.add_option("--overlap-threshold", d.overlap_threshold, "Minimum overlap index (exclusive)")
      ->capture_default_str();
  app.add_option("--min-followers", d.min_followers, "Minimum in-degree (exclusive)")
      ->capture_default_str();
  app.add_option("--min-followees", d.min_followees, "Minimum out-degree (exclusive)")
      ->capture_default_str();
  app.add_option("--high-degree", d.high_degree, "In-degree above which a node is high-degree")
      ->capture_default_str();
  app.add_option("--passive-bound", d.passive_bound, "Ratio at or below which a node is passive")
      ->capture_default_str();
  app.add_option("--passive-high-degree-only", d.passive_high_degree_only,
                 "Apply the passive bucket to high in-degree nodes only")
      ->capture_default_str();

  app.add_option("--louvain-seed", cfg.louvain_seed, "Seed for community detection")
      ->capture_default_str();
  app.add_option("--measures", measures, "Measure set")
      ->check(CLI::IsMember({"original", "directed", "generalized"}))
      ->capture_default_str();
  app.add_option("--k-min", cfg.k_min, "Smallest k tried")->capture_default_str();
  app.add_option("--k-max", cfg.k_max, "Largest k tried")->capture_default_str();
  app.add_option("--cluster-seed", cfg.cluster_seed, "Seed for k-means")->capture_default_str();
  app.add_option("--restarts", cfg.restarts, "k-means restarts per k")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--max-iterations", cfg.max_iterations, "Lloyd iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--normalization", normalization, "Feature scaling before k-means")
      ->check(CLI::IsMember({"zscore", "minmax"}))
      ->capture_default_str();
  app.add_option("--min-pct-all-links", cfg.filter.min_pct_all_links,
                 "Hide arcs below this share of all links (and below the next threshold)")
      ->capture_default_str();
  app.add_option("--min-pct-source-out", cfg.filter.min_pct_source_out,
                 "Hide arcs below this share of the source's links (and below the previous)")
      ->capture_default_str();
  app.add_option("--bucketing", bucketing, "Capitalist rows in the distribution table")
      ->check(CLI::IsMember({"split", "threeway"}))
      ->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads, 0 = auto")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  cfg.input = input;
  cfg.output_dir = output;
  cfg.measure_set = parse_measure_set(measures);
  cfg.normalization = parse_normalization(normalization);
  cfg.bucketing = parse_bucketing(bucketing);
  return run(parse_stage(stage_name), cfg, std::cout, std::cerr);
}
