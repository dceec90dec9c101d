#include <stdexcept>
#include <string>

#include <doctest.h>

#include "sltm/network.hpp"
#include "sltm/scenario.hpp"

using namespace sltm;

TEST_CASE("bundled scenario registry") {
  auto names = bundled_scenario_names();
  REQUIRE(names.size() == 7);
  for (const std::string& name : names) {
    Scenario s = bundled_scenario(name);
    CHECK(s.name == name);
    CHECK(validate_config(s.network).empty());
  }
  CHECK_THROWS_AS(bundled_scenario("no_such_scenario"), std::invalid_argument);
}

TEST_CASE("bundled scenario shapes") {
  CHECK(make_merge_exp1().network.link_count() == 3);
  CHECK(make_diverge_exp3().network.nodes.size() == 1);
  CHECK(make_eight_link().network.link_count() == 8);

  Scenario grid = make_grid20("high");
  CHECK(grid.network.link_count() == 20);
  CHECK(grid.network.horizon_s == 900.0);
  REQUIRE(grid.signals.has_value());
  CHECK(grid.signals->intersections.size() == 4);
  CHECK(grid.signals->phase_count() == 8);

  Scenario medium = make_grid20("medium");
  // same topology, lighter demand
  CHECK(medium.network.demand[0][0].rate_veh_s < grid.network.demand[0][0].rate_veh_s);
  CHECK_THROWS_AS(make_grid20("extreme"), std::invalid_argument);
}

TEST_CASE("json round trip preserves the network") {
  for (const std::string& name : bundled_scenario_names()) {
    Scenario original = bundled_scenario(name);
    Scenario copy = load_scenario_json(scenario_to_json(original), name);
    CAPTURE(name);

    REQUIRE(copy.network.link_count() == original.network.link_count());
    CHECK(copy.network.delta_s == original.network.delta_s);
    CHECK(copy.network.horizon_s == original.network.horizon_s);
    CHECK(copy.network.output_stride_s == original.network.output_stride_s);
    for (int i = 0; i < original.network.link_count(); ++i) {
      size_t li = static_cast<size_t>(i);
      int j = copy.network.link_index(original.network.link_names[li]);
      REQUIRE(j >= 0);
      size_t lj = static_cast<size_t>(j);
      CHECK(copy.network.links[lj].length_km == original.network.links[li].length_km);
      CHECK(copy.network.links[lj].service_rate_veh_s ==
            original.network.links[li].service_rate_veh_s);
      CHECK(copy.network.links[lj].mixture_weight == original.network.links[li].mixture_weight);
      REQUIRE(copy.network.demand[lj].size() == original.network.demand[li].size());
      for (size_t d = 0; d < original.network.demand[li].size(); ++d) {
        CHECK(copy.network.demand[lj][d].t_start_s == original.network.demand[li][d].t_start_s);
        CHECK(copy.network.demand[lj][d].rate_veh_s == original.network.demand[li][d].rate_veh_s);
      }
    }
    REQUIRE(copy.network.nodes.size() == original.network.nodes.size());
    CHECK(copy.signals.has_value() == original.signals.has_value());
    if (original.signals) {
      CHECK(copy.signals->phase_count() == original.signals->phase_count());
      CHECK(copy.signals->saturation_flow_veh_s == original.signals->saturation_flow_veh_s);
      CHECK(copy.signals->x_lb_s == original.signals->x_lb_s);
      for (size_t d = 0; d < original.signals->intersections.size(); ++d) {
        CHECK(copy.signals->intersections[d].available_ratio ==
              original.signals->intersections[d].available_ratio);
        CHECK(copy.signals->intersections[d].cycle_s == original.signals->intersections[d].cycle_s);
      }
    }
    CHECK(validate_config(copy.network).empty());
  }
}

TEST_CASE("round-tripped nodes keep their turning structure") {
  Scenario original = make_eight_link();
  Scenario copy = load_scenario_json(scenario_to_json(original), "eight_link");
  REQUIRE(copy.network.nodes.size() == 4);
  for (size_t n = 0; n < 4; ++n) {
    const NodeSpec& a = original.network.nodes[n];
    const NodeSpec& b = copy.network.nodes[n];
    REQUIRE(a.upstream.size() == b.upstream.size());
    REQUIRE(a.downstream.size() == b.downstream.size());
    for (size_t m = 0; m < a.upstream.size(); ++m)
      for (size_t j = 0; j < a.downstream.size(); ++j)
        CHECK(b.turning[m][j] == doctest::Approx(a.turning[m][j]).epsilon(1e-15));
  }
}

TEST_CASE("scenario parser rejects malformed documents") {
  CHECK_THROWS(load_scenario_json("not json at all"));
  CHECK_THROWS(load_scenario_json("{}"));
  CHECK_THROWS(load_scenario_file("/no/such/file.json"));
}

#ifdef SCENARIO_DIR
TEST_CASE("checked-in scenario files match the builders") {
  for (const std::string& name : bundled_scenario_names()) {
    Scenario from_file = load_scenario_file(std::string(SCENARIO_DIR) + "/" + name + ".json");
    Scenario built = bundled_scenario(name);
    CAPTURE(name);
    CHECK(from_file.network.link_count() == built.network.link_count());
    CHECK(from_file.network.nodes.size() == built.network.nodes.size());
    CHECK(from_file.network.horizon_s == built.network.horizon_s);
    CHECK(from_file.signals.has_value() == built.signals.has_value());
    CHECK(validate_config(from_file.network).empty());
  }
}
#endif
