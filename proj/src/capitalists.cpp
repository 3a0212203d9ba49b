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

#include "capiroles/capitalists.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "capiroles/errors.hpp"
#include "capiroles/parallel.hpp"
#include "capiroles/text_io.hpp"

namespace capiroles {

std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::FMIFY:
      return "FMIFY";
    case Behavior::IFYFM:
      return "IFYFM";
    case Behavior::Passive:
      return "Passive";
  }
  return "?";
}

std::string_view to_string(DegreeClass c) {
  return c == DegreeClass::HighInDegree ? "HighInDegree" : "LowInDegree";
}

Behavior parse_behavior(std::string_view s) {
  for (auto b : {Behavior::FMIFY, Behavior::IFYFM, Behavior::Passive}) {
    if (to_string(b) == s) return b;
  }
  throw DataError("unknown behavior '" + std::string(s) + "'");
}

DegreeClass parse_degree_class(std::string_view s) {
  for (auto c : {DegreeClass::LowInDegree, DegreeClass::HighInDegree}) {
    if (to_string(c) == s) return c;
  }
  throw DataError("unknown degree class '" + std::string(s) + "'");
}

std::optional<double> overlap_index(const DirectedGraph& g, NodeId u) {
  if (u >= g.node_count()) throw std::out_of_range("node index out of range");
  const auto in = g.in_neighbors(u);
  const auto out = g.out_neighbors(u);
  if (in.empty() || out.empty()) return std::nullopt;
  std::size_t common = 0;
  auto a = in.begin();
  auto b = out.begin();
  while (a != in.end() && b != out.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++common;
      ++a;
      ++b;
    }
  }
  return static_cast<double>(common) / static_cast<double>(std::min(in.size(), out.size()));
}

std::optional<double> follow_ratio(const DirectedGraph& g, NodeId u) {
  const auto dout = g.degree(u, Direction::Out);
  if (dout == 0) return std::nullopt;
  return static_cast<double>(g.degree(u, Direction::In)) / static_cast<double>(dout);
}

Behavior classify_behavior(double ratio, DegreeClass degree_class, const DetectionConfig& cfg) {
  if (ratio > 1.0) return Behavior::IFYFM;
  const bool passive_allowed =
      !cfg.passive_high_degree_only || degree_class == DegreeClass::HighInDegree;
  if (passive_allowed && ratio <= cfg.passive_bound) return Behavior::Passive;
  return Behavior::FMIFY;
}

std::vector<CapitalistRecord> detect(const DirectedGraph& g, const DetectionConfig& cfg) {
  constexpr std::size_t kChunk = 8192;
  const std::size_t n = g.node_count();
  std::vector<std::vector<CapitalistRecord>> partial(chunk_count(n, kChunk));
  parallel_chunks(n, kChunk, cfg.threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
    auto& out = partial[chunk];
    for (auto u = static_cast<NodeId>(begin); u < end; ++u) {
      const std::size_t din = g.in_neighbors(u).size();
      const std::size_t dout = g.out_neighbors(u).size();
      if (din <= cfg.min_followers || dout <= cfg.min_followees) continue;
      const auto overlap = overlap_index(g, u);
      if (!overlap || !(*overlap > cfg.overlap_threshold)) continue;
      CapitalistRecord rec;
      rec.node = u;
      rec.overlap = *overlap;
      rec.ratio = static_cast<double>(din) / static_cast<double>(dout);
      rec.in_degree = din;
      rec.out_degree = dout;
      rec.degree_class = din > cfg.high_degree ? DegreeClass::HighInDegree : DegreeClass::LowInDegree;
      rec.behavior = classify_behavior(rec.ratio, rec.degree_class, cfg);
      out.push_back(rec);
    }
  });
  std::vector<CapitalistRecord> records;
  for (auto& part : partial) records.insert(records.end(), part.begin(), part.end());
  return records;
}

void write_capitalists_csv(const DirectedGraph& g, const std::vector<CapitalistRecord>& records,
                           std::ostream& out) {
  out << "node_label,overlap,ratio,in_degree,out_degree,behavior,degree_class\n";
  for (const auto& r : records) {
    out << csv_field(g.label(r.node)) << ',' << format_double(r.overlap) << ','
        << format_double(r.ratio) << ',' << r.in_degree << ',' << r.out_degree << ','
        << to_string(r.behavior) << ',' << to_string(r.degree_class) << '\n';
  }
}

std::vector<CapitalistRecord> read_capitalists_csv(const DirectedGraph& g, std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind("node_label,overlap,ratio,in_degree,out_degree,behavior,degree_class", 0) != 0) {
    throw ParseError("missing capitalist CSV header", 1);
  }
  std::vector<CapitalistRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line, line_no);
    if (f.size() != 7) throw ParseError("expected 7 fields", line_no);
    const auto u = g.find(f[0]);
    if (!u) throw ParseError("unknown node '" + f[0] + "'", line_no);
    CapitalistRecord r;
    r.node = *u;
    r.overlap = parse_double(f[1], line_no);
    r.ratio = parse_double(f[2], line_no);
    r.in_degree = parse_uint(f[3], line_no);
    r.out_degree = parse_uint(f[4], line_no);
    r.behavior = parse_behavior(f[5]);
    r.degree_class = parse_degree_class(f[6]);
    out.push_back(r);
  }
  return out;
}

}  // namespace capiroles
