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

// capiroles-synth: writes a planted test graph as an edge list plus a
// ground-truth CSV.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "capiroles/errors.hpp"
#include "capiroles/synth.hpp"
#include "capiroles/text_io.hpp"

int main(int argc, char** argv) {
  using namespace capiroles;
  PlantedSpec spec;
  std::vector<std::size_t> sizes{100, 100, 100, 100, 100};
  std::size_t hubs = 0, connectors = 0, kinless = 0, peripherals = 0;
  double multiplier = 10.0;
  std::string edges_path = "edges.txt", truth_path;

  CLI::App app{"Planted-structure directed graph generator"};
  app.add_option("--sizes", sizes, "Community sizes")->delimiter(',')->capture_default_str();
  app.add_option("--p-intra", spec.p_intra, "Arc probability inside a community")
      ->capture_default_str();
  app.add_option("--p-inter", spec.p_inter, "Arc probability across communities")
      ->capture_default_str();
  app.add_option("--hubs", hubs, "Planted hubs");
  app.add_option("--connectors", connectors, "Planted connectors");
  app.add_option("--kinless", kinless, "Planted kinless nodes");
  app.add_option("--peripherals", peripherals, "Planted peripheral nodes");
  app.add_option("--degree-multiplier", multiplier, "Overlay degree over background")
      ->capture_default_str();
  app.add_option("--capitalists", spec.capitalists.count, "Planted reciprocating nodes");
  app.add_option("--partners", spec.capitalists.partners, "Partners per planted capitalist")
      ->capture_default_str();
  app.add_option("--reciprocity", spec.capitalists.reciprocity, "Share of mutual partnerships")
      ->capture_default_str();
  app.add_option("--ifyfm-share", spec.capitalists.ifyfm_share,
                 "Share of one-way partnerships pointing out of the capitalist")
      ->capture_default_str();
  app.add_option("--seed", spec.seed, "Random seed")->capture_default_str();
  app.add_option("-o,--edges", edges_path, "Edge list output")->capture_default_str();
  app.add_option("--truth", truth_path, "Ground-truth CSV output");
  CLI11_PARSE(app, argc, argv);

  spec.community_sizes = sizes;
  const std::pair<Archetype, std::size_t> plants[] = {{Archetype::Hub, hubs},
                                                      {Archetype::Connector, connectors},
                                                      {Archetype::Kinless, kinless},
                                                      {Archetype::Peripheral, peripherals}};
  for (const auto& [archetype, count] : plants) {
    if (count > 0) spec.roles.push_back({archetype, count, 0, multiplier});
  }

  try {
    const auto pg = generate(spec);
    std::ostringstream edges;
    export_edge_list(pg.graph, edges);
    write_file(edges_path, edges.str());
    std::cout << "ARTIFACT edges " << edges_path << '\n';
    if (!truth_path.empty()) {
      std::ostringstream truth;
      write_ground_truth_csv(pg, truth);
      write_file(truth_path, truth.str());
      std::cout << "ARTIFACT truth " << truth_path << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
