#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sltm/network.hpp"
#include "sltm/signal.hpp"

namespace sltm {

/// A runnable scenario: the network plus an optional signal layout for
/// optimization case studies.
struct Scenario {
  std::string name;
  NetworkConfig network;
  std::optional<SignalLayout> signals;
};

/// Parses the JSON scenario document (keys: links, nodes, demand, delta_s,
/// horizon_s, output_stride_s, optional signals).
Scenario load_scenario_json(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario_file(const std::string& path);
std::string scenario_to_json(const Scenario& scenario);

/// Names of the bundled scenarios.
std::vector<std::string> bundled_scenario_names();

/// Builds a bundled scenario by name; throws on unknown names.
Scenario bundled_scenario(const std::string& name);

// Individual builders, usable directly from tests.
Scenario make_merge_exp1();
Scenario make_merge_exp2();
Scenario make_diverge_exp3();
Scenario make_diverge_exp4();
Scenario make_eight_link();
Scenario make_grid20(const std::string& demand_level);  // "high" or "medium"

/// Single isolated link with the standard lane parameters.
Scenario make_single_link(double lambda, double mu, double horizon_s);

/// Chain of `count` identical standard links in series (scaling checks).
Scenario make_chain(int count, double lambda, double mu, double horizon_s, double length_km = 0.05);

}  // namespace sltm
