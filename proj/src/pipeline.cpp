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

#include "capiroles/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "capiroles/community.hpp"
#include "capiroles/graph.hpp"
#include "capiroles/parallel.hpp"
#include "capiroles/text_io.hpp"
#include "json.hpp"

namespace capiroles {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kGraph = "graph.bin";
constexpr const char* kPartition = "partition.tsv";
constexpr const char* kFeatures = "features.csv";
constexpr const char* kCapitalists = "capitalists.csv";
constexpr const char* kClusters = "clusters.csv";
constexpr const char* kClusterSummary = "cluster_summary.csv";
constexpr const char* kManifest = "manifest.json";
constexpr const char* kTimings = "timings.json";

Json config_json(const PipelineConfig& cfg) {
  const auto& d = cfg.detection;
  Json j;
  j["input"] = cfg.input.generic_string();
  j["overlap-threshold"] = d.overlap_threshold;
  j["min-followers"] = d.min_followers;
  j["min-followees"] = d.min_followees;
  j["high-degree"] = d.high_degree;
  j["passive-bound"] = d.passive_bound;
  j["passive-high-degree-only"] = d.passive_high_degree_only;
  j["louvain-seed"] = cfg.louvain_seed;
  j["measures"] = to_string(cfg.measure_set);
  j["k-min"] = cfg.k_min;
  j["k-max"] = cfg.k_max;
  j["cluster-seed"] = cfg.cluster_seed;
  j["restarts"] = cfg.restarts;
  j["max-iterations"] = cfg.max_iterations;
  j["normalization"] = to_string(cfg.normalization);
  j["min-pct-all-links"] = cfg.filter.min_pct_all_links;
  j["min-pct-source-out"] = cfg.filter.min_pct_source_out;
  j["bucketing"] = to_string(cfg.bucketing);
  return j;
}

Json read_json_or_empty(const fs::path& path) {
  if (!fs::exists(path)) return Json::object();
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception&) {
    return Json::object();
  }
}

class StageRun {
 public:
  StageRun(Stage stage, const PipelineConfig& cfg, std::ostream& log)
      : stage_(stage), cfg_(cfg), log_(log), started_(std::chrono::steady_clock::now()) {}

  fs::path path(const char* name) const { return cfg_.output_dir / name; }

  fs::path require(const char* name, Stage producer) const {
    const auto p = path(name);
    if (!fs::exists(p)) {
      throw MissingArtifact("missing " + p.string() + ": run " + std::string(to_string(producer)) +
                            " first");
    }
    return p;
  }

  void write(const std::string& kind, const char* name, std::string_view content) {
    write_file(path(name), content);
    add(kind, name);
  }

  void add(const std::string& kind, const char* name) {
    artifacts_.push_back({kind, path(name)});
    checksums_[name] = sha256_file(path(name));
  }

  Json& extra() { return extra_; }
  void note(const std::string& line) { log_ << '[' << to_string(stage_) << "] " << line << '\n'; }

  std::vector<Artifact> finish() {
    Json manifest = read_json_or_empty(path(kManifest));
    if (!manifest.contains("schema")) manifest = Json{{"schema", "capiroles.manifest/1"}};
    manifest["config"] = config_json(cfg_);
    Json entry;
    entry["config"] = config_json(cfg_);
    entry["artifacts"] = checksums_;
    for (auto& [key, value] : extra_.items()) entry[key] = value;
    manifest["stages"][std::string(to_string(stage_))] = entry;
    write_file(path(kManifest), manifest.dump(2) + "\n");

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    Json timings = read_json_or_empty(path(kTimings));
    timings[std::string(to_string(stage_))] = seconds;
    write_file(path(kTimings), timings.dump(2) + "\n");

    artifacts_.push_back({"manifest", path(kManifest)});
    artifacts_.push_back({"timings", path(kTimings)});
    return std::move(artifacts_);
  }

 private:
  Stage stage_;
  const PipelineConfig& cfg_;
  std::ostream& log_;
  std::chrono::steady_clock::time_point started_;
  std::vector<Artifact> artifacts_;
  Json checksums_ = Json::object();
  Json extra_ = Json::object();
};

template <class Fn>
auto with_file(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return fn(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

DirectedGraph load_graph(const StageRun& run) {
  return load_graph_cache(run.require(kGraph, Stage::Ingest));
}

std::vector<Artifact> ingest(const PipelineConfig& cfg, std::ostream& log) {
  StageRun run(Stage::Ingest, cfg, log);
  if (cfg.input.empty()) throw DataError("no input edge list given");
  if (!fs::exists(cfg.input)) throw IoError("input not found: " + cfg.input.string());
  auto [graph, stats] = with_file(cfg.input, [](std::istream& in) { return ingest_edge_list(in); });
  save_graph_cache(graph, run.path(kGraph));
  run.add("graph", kGraph);
  run.extra()["input_sha256"] = sha256_file(cfg.input);
  run.extra()["nodes"] = graph.node_count();
  run.extra()["arcs"] = graph.arc_count();
  run.extra()["lines"] = stats.lines;
  run.extra()["skipped_lines"] = stats.skipped_lines;
  run.extra()["self_loops_removed"] = stats.self_loops_removed;
  run.extra()["duplicates_removed"] = stats.duplicates_removed;
  run.note(std::to_string(graph.node_count()) + " nodes, " + std::to_string(graph.arc_count()) +
           " arcs (" + std::to_string(stats.self_loops_removed) + " self-loops, " +
           std::to_string(stats.duplicates_removed) + " duplicates dropped)");
  return run.finish();
}

std::vector<Artifact> communities(const PipelineConfig& cfg, std::ostream& log) {
  StageRun run(Stage::Communities, cfg, log);
  const auto g = load_graph(run);
  LouvainConfig lc;
  lc.seed = cfg.louvain_seed;
  const auto result = louvain(g, lc);
  std::ostringstream part;
  write_partition(g, result.partition, part);
  run.write("partition", kPartition, part.str());

  Json levels = Json::array();
  for (const auto& lv : result.levels) {
    levels.push_back({{"nodes", lv.nodes},
                      {"communities", lv.communities},
                      {"sweeps", lv.sweeps},
                      {"moves", lv.moves},
                      {"modularity", lv.recomputed_modularity}});
  }
  Json summary = {{"communities", result.partition.community_count()},
                  {"modularity", result.modularity},
                  {"levels", levels}};
  run.write("louvain", "louvain.json", summary.dump(2) + "\n");
  run.extra()["seeds"] = {{"louvain", cfg.louvain_seed}};
  run.extra()["modularity"] = result.modularity;
  run.note(std::to_string(result.partition.community_count()) + " communities, Q = " +
           format_double(result.modularity));
  return run.finish();
}

std::vector<Artifact> measures(const PipelineConfig& cfg, std::ostream& log) {
  StageRun run(Stage::Measures, cfg, log);
  const auto g = load_graph(run);
  const auto p = with_file(run.require(kPartition, Stage::Communities),
                           [&](std::istream& in) { return read_partition(g, in); });
  const auto fm = compute_measures(g, p, cfg.measure_set, cfg.threads);
  std::ostringstream csv;
  write_feature_csv(g, fm, csv);
  run.write("features", kFeatures, csv.str());
  run.note(std::string(to_string(cfg.measure_set)) + " measures for " + std::to_string(fm.rows) +
           " nodes");
  return run.finish();
}

std::vector<Artifact> detect_stage(const PipelineConfig& cfg, std::ostream& log) {
  StageRun run(Stage::Detect, cfg, log);
  const auto g = load_graph(run);
  auto dc = cfg.detection;
  dc.threads = cfg.threads;
  const auto records = detect(g, dc);
  std::ostringstream csv;
  write_capitalists_csv(g, records, csv);
  run.write("capitalists", kCapitalists, csv.str());
  std::size_t high = 0;
  for (const auto& r : records) high += r.degree_class == DegreeClass::HighInDegree;
  run.extra()["capitalists"] = records.size();
  run.extra()["high_in_degree"] = high;
  run.note(std::to_string(records.size()) + " capitalists (" + std::to_string(high) +
           " with high in-degree)");
  return run.finish();
}

std::vector<Artifact> cluster(const PipelineConfig& cfg, std::ostream& log) {
  StageRun run(Stage::Cluster, cfg, log);
  const auto features = with_file(run.require(kFeatures, Stage::Measures),
                                  [](std::istream& in) { return read_feature_csv(in); });
  const auto& x = features.matrix;
  if (cfg.k_min < 2 || cfg.k_min > cfg.k_max) {
    throw DataError("k range must satisfy 2 <= k-min <= k-max");
  }
  const std::size_t k_max = std::min(cfg.k_max, x.rows);
  if (k_max < cfg.k_min) {
    throw DataError("only " + std::to_string(x.rows) + " nodes, fewer than k-min");
  }
  if (k_max < cfg.k_max) run.note("k-max lowered to the node count " + std::to_string(k_max));

  const auto norm = normalize(x, cfg.normalization);
  KMeansConfig kc;
  kc.seed = cfg.cluster_seed;
  kc.restarts = cfg.restarts;
  kc.max_iterations = cfg.max_iterations;
  kc.threads = cfg.threads;
  auto sweep = sweep_k(norm.matrix, cfg.k_min, k_max, kc);
  auto& best = sweep.best;
  const auto original = denormalize(best.centroids, norm.transform);
  best.labels = label_clusters(original);

  std::ostringstream assign, cn, co, sw, summary;
  write_assignment_csv(features.labels, best, assign);
  run.write("clusters", kClusters, assign.str());
  write_centroids_csv(best.centroids, best.sizes, cn);
  run.write("centroids_normalized", "centroids_normalized.csv", cn.str());
  write_centroids_csv(original, best.sizes, co);
  run.write("centroids_original", "centroids_original.csv", co.str());
  write_sweep_csv(sweep, sw);
  run.write("db_sweep", "db_sweep.csv", sw.str());

  summary << "cluster,size,share_pct,label\n";
  for (std::size_t c = 0; c < best.k; ++c) {
    const double share = 100.0 * static_cast<double>(best.sizes[c]) / static_cast<double>(x.rows);
    summary << c << ',' << best.sizes[c] << ',' << format_double(share) << ','
            << csv_field(best.labels[c]) << '\n';
  }
  run.write("cluster_summary", kClusterSummary, summary.str());

  run.extra()["seeds"] = {{"cluster", cfg.cluster_seed}};
  run.extra()["k"] = best.k;
  run.extra()["davies_bouldin"] = best.db_index;
  run.note("k = " + std::to_string(best.k) + ", Davies-Bouldin " + format_double(best.db_index));
  return run.finish();
}

std::vector<Artifact> report(const PipelineConfig& cfg, std::ostream& log) {
  StageRun run(Stage::Report, cfg, log);
  const auto g = load_graph(run);
  const auto records = with_file(run.require(kCapitalists, Stage::Detect),
                                 [&](std::istream& in) { return read_capitalists_csv(g, in); });
  const auto assigned = with_file(run.require(kClusters, Stage::Cluster),
                                  [](std::istream& in) { return read_assignment_csv(in); });

  constexpr std::uint32_t kUnset = UINT32_MAX;
  std::vector<std::uint32_t> cluster_of(g.node_count(), kUnset);
  std::uint32_t k = 0;
  for (std::size_t i = 0; i < assigned.labels.size(); ++i) {
    const auto u = g.find(assigned.labels[i]);
    if (!u) throw DataError(std::string(kClusters) + ": unknown node " + assigned.labels[i]);
    cluster_of[*u] = assigned.cluster[i];
    k = std::max(k, assigned.cluster[i] + 1);
  }
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (cluster_of[u] == kUnset) {
      throw DataError(std::string(kClusters) + ": node " + g.label(u) +
                      " has no cluster; rerun measures and cluster");
    }
  }

  std::vector<std::string> labels(k);
  if (fs::exists(run.path(kClusterSummary))) {
    std::istringstream in(read_file(run.path(kClusterSummary)));
    std::string line;
    std::getline(in, line);
    for (std::size_t no = 2; std::getline(in, line); ++no) {
      const auto f = split_csv(line, no);
      if (f.size() == 4) {
        const auto c = parse_uint(f[0], no);
        if (c < k) labels[c] = f[3];
      }
    }
  }

  const auto dist = capitalist_distribution(g, records, cluster_of, k, cfg.bucketing,
                                            cfg.detection.passive_bound);
  for (const auto& w : dist.warnings) run.note("warning: " + w);
  run.write("distribution_csv", "distribution.csv", distribution_csv(dist));
  run.write("distribution_json", "distribution.json", distribution_json(dist));
  run.write("distribution_text", "distribution.txt", distribution_text(dist));

  auto ig = cluster_interconnection(g, cluster_of, k, cfg.filter, cfg.threads);
  ig.cluster_labels = labels;
  run.write("interconnection_csv", "interconnection.csv", interconnection_csv(ig));
  run.write("interconnection_json", "interconnection.json", interconnection_json(ig));
  run.write("interconnection_dot", "interconnection.dot", interconnection_dot(ig));
  run.note(std::to_string(records.size()) + " capitalists over " + std::to_string(k) +
           " clusters, " + std::to_string(ig.total_links) + " links");
  return run.finish();
}

}  // namespace

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Ingest:
      return "ingest";
    case Stage::Communities:
      return "communities";
    case Stage::Measures:
      return "measures";
    case Stage::Detect:
      return "detect";
    case Stage::Cluster:
      return "cluster";
    case Stage::Report:
      return "report";
    case Stage::All:
      return "all";
  }
  return "?";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : {Stage::Ingest, Stage::Communities, Stage::Measures, Stage::Detect,
                  Stage::Cluster, Stage::Report, Stage::All}) {
    if (to_string(s) == name) return s;
  }
  throw DataError("unknown stage: " + std::string(name));
}

std::vector<Artifact> run_stage(Stage stage, const PipelineConfig& cfg, std::ostream& log) {
  fs::create_directories(cfg.output_dir);
  switch (stage) {
    case Stage::Ingest:
      return ingest(cfg, log);
    case Stage::Communities:
      return communities(cfg, log);
    case Stage::Measures:
      return measures(cfg, log);
    case Stage::Detect:
      return detect_stage(cfg, log);
    case Stage::Cluster:
      return cluster(cfg, log);
    case Stage::Report:
      return report(cfg, log);
    case Stage::All:
      break;
  }
  std::vector<Artifact> all;
  for (Stage s : {Stage::Ingest, Stage::Communities, Stage::Measures, Stage::Detect,
                  Stage::Cluster, Stage::Report}) {
    auto part = run_stage(s, cfg, log);
    for (auto& a : part) {
      const bool seen = std::any_of(all.begin(), all.end(),
                                    [&](const Artifact& b) { return b.path == a.path; });
      if (!seen) all.push_back(std::move(a));
    }
  }
  return all;
}

int run(Stage stage, const PipelineConfig& cfg, std::ostream& out, std::ostream& log) {
  try {
    for (const auto& a : run_stage(stage, cfg, log)) {
      out << "ARTIFACT " << a.kind << ' ' << a.path.generic_string() << '\n';
    }
    out.flush();
    return kExitOk;
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DataError& e) {
    log << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    log << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace capiroles
