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

#include "capiroles/graph.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "capiroles/errors.hpp"
#include "capiroles/text_io.hpp"

namespace capiroles {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view strip_leading_zeros(std::string_view s) {
  std::size_t i = 0;
  while (i + 1 < s.size() && s[i] == '0') ++i;
  return s.substr(i);
}

// Counting pass + fill pass into CSR rows, then per-row sort/unique with
// in-place compaction. Returns the number of duplicates dropped.
std::uint64_t fill_rows(std::size_t n, const std::vector<Arc>& arcs,
                        std::vector<std::uint64_t>& offsets, std::vector<NodeId>& targets) {
  offsets.assign(n + 1, 0);
  for (const Arc& a : arcs) {
    if (a.source != a.target) ++offsets[a.source + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  targets.resize(offsets[n]);
  std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const Arc& a : arcs) {
    if (a.source != a.target) targets[cursor[a.source]++] = a.target;
  }
  std::uint64_t write = 0;
  std::uint64_t dropped = 0;
  for (std::size_t u = 0; u < n; ++u) {
    auto first = targets.begin() + static_cast<std::ptrdiff_t>(offsets[u]);
    auto last = targets.begin() + static_cast<std::ptrdiff_t>(offsets[u + 1]);
    std::sort(first, last);
    auto uend = std::unique(first, last);
    const auto kept = static_cast<std::uint64_t>(uend - first);
    dropped += static_cast<std::uint64_t>(last - uend);
    std::move(first, uend, targets.begin() + static_cast<std::ptrdiff_t>(write));
    offsets[u] = write;
    write += kept;
  }
  offsets[n] = write;
  targets.resize(write);
  targets.shrink_to_fit();
  return dropped;
}

constexpr char kCacheMagic[8] = {'C', 'A', 'P', 'R', 'G', 'R', 'P', 'H'};
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void put_vec(std::ostream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) {
    throw DataError("truncated graph cache " + path.string());
  }
  return v;
}

template <typename T>
void get_vec(std::istream& in, std::vector<T>& v, std::size_t n,
             const std::filesystem::path& path) {
  v.resize(n);
  if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)))) {
    throw DataError("truncated graph cache " + path.string());
  }
}

}  // namespace

bool label_less(std::string_view a, std::string_view b) {
  const bool da = all_digits(a);
  const bool db = all_digits(b);
  if (da != db) return da;
  if (da) {
    const auto sa = strip_leading_zeros(a);
    const auto sb = strip_leading_zeros(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

DirectedGraph DirectedGraph::build(std::vector<std::string> labels, std::vector<Arc> arcs,
                                   IngestStats* stats) {
  const std::size_t n = labels.size();
  if (n >= std::numeric_limits<NodeId>::max()) throw DataError("too many nodes");
  std::uint64_t loops = 0;
  for (const Arc& a : arcs) {
    if (a.source >= n || a.target >= n) throw DataError("arc references unknown node");
    if (a.source == a.target) ++loops;
  }

  DirectedGraph g;
  g.labels_ = std::move(labels);
  const std::uint64_t dups = fill_rows(n, arcs, g.out_offsets_, g.out_targets_);
  arcs.clear();
  arcs.shrink_to_fit();

  // Transpose. Visiting sources in increasing order leaves each
  // predecessor row sorted.
  g.in_offsets_.assign(n + 1, 0);
  for (NodeId v : g.out_targets_) ++g.in_offsets_[v + 1];
  std::partial_sum(g.in_offsets_.begin(), g.in_offsets_.end(), g.in_offsets_.begin());
  g.in_sources_.resize(g.out_targets_.size());
  std::vector<std::uint64_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v : g.out_neighbors(u)) g.in_sources_[cursor[v]++] = u;
  }
  g.index_labels();

  if (stats) {
    stats->self_loops_removed += loops;
    stats->duplicates_removed += dups;
  }
  return g;
}

void DirectedGraph::index_labels() {
  index_.clear();
  index_.reserve(labels_.size());
  for (NodeId i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], i).second) {
      throw DataError("duplicate node label '" + labels_[i] + "'");
    }
  }
}

std::size_t DirectedGraph::degree(NodeId u, Direction d) const {
  if (u >= node_count()) {
    throw std::out_of_range("node index " + std::to_string(u) + " out of range (n=" +
                            std::to_string(node_count()) + ")");
  }
  return neighbors(u, d).size();
}

bool DirectedGraph::has_arc(NodeId u, NodeId v) const {
  const auto row = out_neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::optional<NodeId> DirectedGraph::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Arc> DirectedGraph::arcs() const {
  std::vector<Arc> out;
  out.reserve(arc_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : out_neighbors(u)) out.push_back({u, v});
  }
  return out;
}

IngestResult ingest_edge_list(std::istream& in, const EdgeListFormat& format) {
  IngestResult result;
  IngestStats& stats = result.stats;
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<Arc> arcs;

  auto intern = [&](std::string_view token) {
    auto [it, inserted] = ids.try_emplace(std::string(token), static_cast<NodeId>(labels.size()));
    if (inserted) labels.emplace_back(token);
    return it->second;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++stats.lines;
    const auto tokens = split_whitespace(line);
    if (tokens.empty() || format.comment_chars.find(tokens[0][0]) != std::string::npos) {
      ++stats.skipped_lines;
      continue;
    }
    if (tokens.size() != 2) {
      throw ParseError("expected 'SRC DST', got " + std::to_string(tokens.size()) + " field(s)",
                       stats.lines);
    }
    const NodeId s = intern(tokens[0]);
    const NodeId t = intern(tokens[1]);
    arcs.push_back({s, t});
  }
  if (in.bad()) throw IoError("read error after line " + std::to_string(stats.lines));
  if (labels.empty()) throw DataError("edge list contains no arcs");
  stats.raw_arcs = arcs.size();
  ids.clear();

  // Canonical relabeling: first-appearance ids -> sorted-label ids.
  std::vector<NodeId> order(labels.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::sort(order.begin(), order.end(),
            [&](NodeId a, NodeId b) { return label_less(labels[a], labels[b]); });
  std::vector<NodeId> rank(labels.size());
  std::vector<std::string> sorted_labels(labels.size());
  for (NodeId r = 0; r < order.size(); ++r) {
    rank[order[r]] = r;
    sorted_labels[r] = std::move(labels[order[r]]);
  }
  labels.clear();
  for (Arc& a : arcs) a = {rank[a.source], rank[a.target]};

  result.graph = DirectedGraph::build(std::move(sorted_labels), std::move(arcs), &stats);
  return result;
}

IngestResult ingest_edge_list_file(const std::filesystem::path& path,
                                   const EdgeListFormat& format) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return ingest_edge_list(in, format);
}

void export_edge_list(const DirectedGraph& g, std::ostream& out) {
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto row = g.out_neighbors(u);
    if (row.empty() && g.in_neighbors(u).empty()) {
      out << g.label(u) << ' ' << g.label(u) << '\n';
      continue;
    }
    for (NodeId v : row) out << g.label(u) << ' ' << g.label(v) << '\n';
  }
}

void save_graph_cache(const DirectedGraph& g, const std::filesystem::path& path) {
  static_assert(std::endian::native == std::endian::little, "cache format is little-endian");
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(kCacheMagic, sizeof(kCacheMagic));
    put(out, kCacheVersion);
    put(out, std::uint32_t{0});
    put(out, static_cast<std::uint64_t>(g.node_count()));
    put(out, static_cast<std::uint64_t>(g.arc_count()));
    put_vec(out, g.out_offsets_);
    put_vec(out, g.out_targets_);
    put_vec(out, g.in_offsets_);
    put_vec(out, g.in_sources_);
    for (const auto& label : g.labels()) {
      put(out, static_cast<std::uint32_t>(label.size()));
      out.write(label.data(), static_cast<std::streamsize>(label.size()));
    }
    if (!out.flush()) throw IoError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

DirectedGraph load_graph_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[sizeof(kCacheMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) {
    throw DataError(path.string() + " is not a graph cache");
  }
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCacheVersion) {
    throw DataError("unsupported graph cache version " + std::to_string(version));
  }
  get<std::uint32_t>(in, path);
  const auto n = get<std::uint64_t>(in, path);
  const auto m = get<std::uint64_t>(in, path);

  DirectedGraph g;
  get_vec(in, g.out_offsets_, n + 1, path);
  get_vec(in, g.out_targets_, m, path);
  get_vec(in, g.in_offsets_, n + 1, path);
  get_vec(in, g.in_sources_, m, path);
  if (g.out_offsets_.back() != m || g.in_offsets_.back() != m) {
    throw DataError("corrupt graph cache " + path.string());
  }
  g.labels_.resize(n);
  for (auto& label : g.labels_) {
    const auto len = get<std::uint32_t>(in, path);
    label.resize(len);
    if (!in.read(label.data(), len)) throw DataError("truncated graph cache " + path.string());
  }
  g.index_labels();
  return g;
}

}  // namespace capiroles
