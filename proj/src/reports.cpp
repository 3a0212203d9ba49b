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

#include "capiroles/reports.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "capiroles/errors.hpp"
#include "capiroles/parallel.hpp"
#include "capiroles/text_io.hpp"
#include "json.hpp"

namespace capiroles {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kDistributionSchema = "capiroles.distribution/1";
constexpr std::string_view kInterconnectionSchema = "capiroles.interconnection/1";

double pct(std::uint64_t part, std::uint64_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

std::vector<std::string> bucket_names(Bucketing b, double bound) {
  const std::string lo = format_double(bound);
  std::vector<std::string> names;
  if (b == Bucketing::Split) {
    names = {"low:r<=1", "low:r>1"};
  } else {
    names = {"low:r<=" + lo, "low:" + lo + "<r<=1", "low:r>1"};
  }
  names.insert(names.end(), {"high:r<=" + lo, "high:" + lo + "<r<=1", "high:r>1"});
  return names;
}

std::size_t bucket_of(const CapitalistRecord& r, Bucketing b, double bound) {
  const std::size_t band = r.ratio > 1.0 ? 2 : (r.ratio <= bound ? 0 : 1);
  if (r.degree_class == DegreeClass::HighInDegree) return (b == Bucketing::Split ? 2 : 3) + band;
  if (b == Bucketing::Split) return band == 2 ? 1 : 0;
  return band;
}

void write_or_throw(const std::filesystem::path& path, const std::string& content) {
  try {
    write_file(path, content);
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError("cannot write " + path.string() + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(Bucketing b) { return b == Bucketing::Split ? "split" : "threeway"; }

Bucketing parse_bucketing(std::string_view name) {
  if (name == "split") return Bucketing::Split;
  if (name == "threeway") return Bucketing::ThreeWay;
  throw DataError("unknown bucketing '" + std::string(name) + "' (expected split or threeway)");
}

DistributionTable capitalist_distribution(const DirectedGraph& g,
                                          std::span<const CapitalistRecord> records,
                                          std::span<const std::uint32_t> cluster_of,
                                          std::size_t k, Bucketing bucketing,
                                          double passive_bound) {
  DistributionTable t;
  t.cluster_sizes.assign(k, 0);
  for (auto c : cluster_of) {
    if (c < k) ++t.cluster_sizes[c];
  }
  const auto names = bucket_names(bucketing, passive_bound);
  t.rows.resize(names.size());
  for (std::size_t b = 0; b < names.size(); ++b) {
    t.rows[b].bucket = names[b];
    t.rows[b].cells.assign(k, {});
  }
  for (const auto& r : records) {
    if (r.node >= cluster_of.size() || cluster_of[r.node] >= k) {
      const std::string name = r.node < g.node_count() ? g.label(r.node) : std::to_string(r.node);
      throw DataError("capitalist '" + name + "' has no cluster");
    }
    auto& row = t.rows[bucket_of(r, bucketing, passive_bound)];
    ++row.total;
    ++row.cells[cluster_of[r.node]].count;
  }
  if (records.empty()) t.warnings.push_back("no capitalist records; table is all zeros");
  for (auto& row : t.rows) {
    if (row.total == 0 && !records.empty()) {
      t.warnings.push_back("bucket " + row.bucket + " is empty");
    }
    for (std::size_t c = 0; c < k; ++c) {
      auto& cell = row.cells[c];
      cell.share_of_bucket = pct(cell.count, row.total);
      cell.share_of_cluster = pct(cell.count, t.cluster_sizes[c]);
    }
  }
  return t;
}

InterconnectionArc InterconnectionGraph::arc(std::size_t i, std::size_t j) const {
  std::uint64_t out = 0, in = 0;
  for (std::size_t x = 0; x < k; ++x) {
    out += count(i, x);
    in += count(x, j);
  }
  InterconnectionArc a;
  a.source = static_cast<std::uint32_t>(i);
  a.target = static_cast<std::uint32_t>(j);
  a.count = count(i, j);
  a.pct_source_out = pct(a.count, out);
  a.pct_all_links = pct(a.count, total_links);
  a.pct_target_in = pct(a.count, in);
  return a;
}

bool InterconnectionGraph::displayed(const InterconnectionArc& a) const {
  if (a.count == 0) return false;
  return a.pct_all_links >= filter.min_pct_all_links ||
         a.pct_source_out >= filter.min_pct_source_out;
}

std::vector<InterconnectionArc> InterconnectionGraph::arcs() const {
  std::vector<InterconnectionArc> out;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (count(i, j) > 0) out.push_back(arc(i, j));
    }
  }
  return out;
}

InterconnectionGraph cluster_interconnection(const DirectedGraph& g,
                                             std::span<const std::uint32_t> cluster_of,
                                             std::size_t k, const ArcFilter& filter,
                                             unsigned threads) {
  if (cluster_of.size() != g.node_count()) throw DataError("clustering does not cover the graph");
  for (auto c : cluster_of) {
    if (c >= k) throw DataError("cluster index out of range");
  }
  constexpr std::size_t kChunk = 16384;
  std::vector<std::vector<std::uint64_t>> partial(chunk_count(g.node_count(), kChunk));
  parallel_chunks(g.node_count(), kChunk, threads,
                  [&](std::size_t chunk, std::size_t begin, std::size_t end) {
                    auto& counts = partial[chunk];
                    counts.assign(k * k, 0);
                    for (auto u = static_cast<NodeId>(begin); u < end; ++u) {
                      const auto cu = cluster_of[u];
                      for (NodeId v : g.out_neighbors(u)) ++counts[cu * k + cluster_of[v]];
                    }
                  });
  InterconnectionGraph ig;
  ig.k = k;
  ig.filter = filter;
  ig.total_links = g.arc_count();
  ig.counts.assign(k * k, 0);
  for (const auto& part : partial) {
    for (std::size_t i = 0; i < part.size(); ++i) ig.counts[i] += part[i];
  }
  ig.cluster_sizes.assign(k, 0);
  for (auto c : cluster_of) ++ig.cluster_sizes[c];
  ig.cluster_labels.assign(k, "");
  return ig;
}

std::string distribution_csv(const DistributionTable& t) {
  std::ostringstream out;
  out << "bucket,total";
  for (std::size_t c = 0; c < t.cluster_sizes.size(); ++c) {
    out << ",c" << c << "_count,c" << c << "_share_of_bucket,c" << c << "_share_of_cluster";
  }
  out << '\n';
  for (const auto& row : t.rows) {
    out << csv_field(row.bucket) << ',' << row.total;
    for (const auto& cell : row.cells) {
      out << ',' << cell.count << ',' << format_double(cell.share_of_bucket) << ','
          << format_double(cell.share_of_cluster);
    }
    out << '\n';
  }
  return out.str();
}

std::string distribution_json(const DistributionTable& t) {
  Json j;
  j["schema"] = kDistributionSchema;
  j["cluster_sizes"] = t.cluster_sizes;
  Json rows = Json::array();
  for (const auto& row : t.rows) {
    Json cells = Json::array();
    for (const auto& cell : row.cells) {
      cells.push_back({{"count", cell.count},
                       {"share_of_bucket", cell.share_of_bucket},
                       {"share_of_cluster", cell.share_of_cluster}});
    }
    rows.push_back({{"bucket", row.bucket}, {"total", row.total}, {"cells", cells}});
  }
  j["rows"] = rows;
  j["warnings"] = t.warnings;
  return j.dump(2) + "\n";
}

DistributionTable distribution_from_json(std::string_view text) {
  DistributionTable t;
  try {
    const auto j = Json::parse(text);
    if (j.at("schema") != kDistributionSchema) throw DataError("unexpected distribution schema");
    t.cluster_sizes = j.at("cluster_sizes").get<std::vector<std::uint64_t>>();
    for (const auto& r : j.at("rows")) {
      DistributionRow row;
      row.bucket = r.at("bucket").get<std::string>();
      row.total = r.at("total").get<std::uint64_t>();
      for (const auto& c : r.at("cells")) {
        row.cells.push_back({c.at("count").get<std::uint64_t>(),
                             c.at("share_of_bucket").get<double>(),
                             c.at("share_of_cluster").get<double>()});
      }
      t.rows.push_back(std::move(row));
    }
    t.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("distribution json: ") + e.what(), 0);
  }
  return t;
}

std::string distribution_text(const DistributionTable& t) {
  std::ostringstream out;
  // Two lines per bucket: share of the bucket, then share of the cluster.
  out << std::left << std::setw(18) << "bucket";
  for (std::size_t c = 0; c < t.cluster_sizes.size(); ++c) {
    out << std::right << std::setw(12) << ("cluster " + std::to_string(c));
  }
  out << '\n';
  for (const auto& row : t.rows) {
    out << std::left << std::setw(18) << row.bucket;
    for (const auto& cell : row.cells) out << std::right << std::setw(12) << format_percent(cell.share_of_bucket);
    out << '\n' << std::left << std::setw(18) << "";
    for (const auto& cell : row.cells) out << std::right << std::setw(12) << format_percent(cell.share_of_cluster);
    out << '\n';
  }
  for (const auto& w : t.warnings) out << "warning: " << w << '\n';
  return out.str();
}

std::string interconnection_csv(const InterconnectionGraph& ig) {
  std::ostringstream out;
  out << "source,target,count,pct_source_out,pct_all_links,pct_target_in,displayed\n";
  for (const auto& a : ig.arcs()) {
    out << a.source << ',' << a.target << ',' << a.count << ',' << format_double(a.pct_source_out)
        << ',' << format_double(a.pct_all_links) << ',' << format_double(a.pct_target_in) << ','
        << (ig.displayed(a) ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string interconnection_json(const InterconnectionGraph& ig) {
  Json j;
  j["schema"] = kInterconnectionSchema;
  j["k"] = ig.k;
  j["total_links"] = ig.total_links;
  j["cluster_sizes"] = ig.cluster_sizes;
  j["cluster_labels"] = ig.cluster_labels;
  j["filter"] = {{"min_pct_all_links", ig.filter.min_pct_all_links},
                 {"min_pct_source_out", ig.filter.min_pct_source_out}};
  j["counts"] = ig.counts;
  Json arcs = Json::array();
  for (const auto& a : ig.arcs()) {
    arcs.push_back({{"source", a.source},
                    {"target", a.target},
                    {"count", a.count},
                    {"pct_source_out", a.pct_source_out},
                    {"pct_all_links", a.pct_all_links},
                    {"pct_target_in", a.pct_target_in},
                    {"displayed", ig.displayed(a)}});
  }
  j["arcs"] = arcs;
  return j.dump(2) + "\n";
}

InterconnectionGraph interconnection_from_json(std::string_view text) {
  InterconnectionGraph ig;
  try {
    const auto j = Json::parse(text);
    if (j.at("schema") != kInterconnectionSchema) {
      throw DataError("unexpected interconnection schema");
    }
    ig.k = j.at("k").get<std::size_t>();
    ig.total_links = j.at("total_links").get<std::uint64_t>();
    ig.cluster_sizes = j.at("cluster_sizes").get<std::vector<std::uint64_t>>();
    ig.cluster_labels = j.at("cluster_labels").get<std::vector<std::string>>();
    ig.filter.min_pct_all_links = j.at("filter").at("min_pct_all_links").get<double>();
    ig.filter.min_pct_source_out = j.at("filter").at("min_pct_source_out").get<double>();
    ig.counts = j.at("counts").get<std::vector<std::uint64_t>>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("interconnection json: ") + e.what(), 0);
  }
  if (ig.counts.size() != ig.k * ig.k) throw DataError("interconnection counts are not k x k");
  return ig;
}

std::string interconnection_dot(const InterconnectionGraph& ig) {
  std::ostringstream out;
  const std::uint64_t largest =
      ig.cluster_sizes.empty() ? 1 : std::max<std::uint64_t>(
                                          1, *std::max_element(ig.cluster_sizes.begin(),
                                                               ig.cluster_sizes.end()));
  out << "digraph clusters {\n";
  out << "  node [shape=circle, fixedsize=true];\n";
  for (std::size_t i = 0; i < ig.k; ++i) {
    const double share = static_cast<double>(ig.cluster_sizes[i]) / static_cast<double>(largest);
    std::string label = "C" + std::to_string(i);
    if (i < ig.cluster_labels.size() && !ig.cluster_labels[i].empty()) {
      label += "\\n" + ig.cluster_labels[i];
    }
    out << "  C" << i << " [label=\"" << label << "\", width=" << format_double(0.5 + 2.5 * share)
        << ", tooltip=\"" << ig.cluster_sizes[i] << " nodes\"];\n";
  }
  for (const auto& a : ig.arcs()) {
    if (!ig.displayed(a)) continue;
    out << "  C" << a.source << " -> C" << a.target << " [label=\""
        << format_percent(a.pct_source_out) << " / " << format_percent(a.pct_all_links) << " / "
        << format_percent(a.pct_target_in) << "\", penwidth=" << format_double(std::max(0.5, 0.25 * a.pct_all_links))
        << "];\n";
  }
  out << "}\n";
  return out.str();
}

void export_report(const DistributionTable& t, ReportFormat format,
                   const std::filesystem::path& path) {
  switch (format) {
    case ReportFormat::Csv:
      return write_or_throw(path, distribution_csv(t));
    case ReportFormat::Json:
      return write_or_throw(path, distribution_json(t));
    case ReportFormat::Text:
      return write_or_throw(path, distribution_text(t));
    case ReportFormat::Dot:
      break;
  }
  throw DataError("distribution tables have no DOT form");
}

void export_report(const InterconnectionGraph& ig, ReportFormat format,
                   const std::filesystem::path& path) {
  switch (format) {
    case ReportFormat::Csv:
      return write_or_throw(path, interconnection_csv(ig));
    case ReportFormat::Json:
      return write_or_throw(path, interconnection_json(ig));
    case ReportFormat::Dot:
      return write_or_throw(path, interconnection_dot(ig));
    case ReportFormat::Text:
      break;
  }
  throw DataError("interconnection graphs have no text form");
}

}  // namespace capiroles
