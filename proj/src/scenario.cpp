#include "sltm/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sltm {

using nlohmann::json;

namespace {

LinkParams link_params_from_json(const json& j) {
  LinkParams p;
  p.length_km = j.at("length_km").get<double>();
  p.free_flow_speed_kms = j.at("free_flow_speed_kms").get<double>();
  p.backward_wave_speed_kms = j.at("backward_wave_speed_kms").get<double>();
  p.jam_density_veh_km = j.at("jam_density_veh_km").get<double>();
  p.flow_capacity_veh_s = j.at("flow_capacity_veh_s").get<double>();
  p.service_rate_veh_s = j.at("service_rate_veh_s").get<double>();
  p.entry_rate_veh_s = j.value("entry_rate_veh_s", 0.0);
  p.mixture_weight = j.value("mixture_weight", -1.0);
  return p;
}

json link_params_to_json(const LinkParams& p) {
  json j;
  j["length_km"] = p.length_km;
  j["free_flow_speed_kms"] = p.free_flow_speed_kms;
  j["backward_wave_speed_kms"] = p.backward_wave_speed_kms;
  j["jam_density_veh_km"] = p.jam_density_veh_km;
  j["flow_capacity_veh_s"] = p.flow_capacity_veh_s;
  j["service_rate_veh_s"] = p.service_rate_veh_s;
  j["entry_rate_veh_s"] = p.entry_rate_veh_s;
  if (p.mixture_weight >= 0.0) j["mixture_weight"] = p.mixture_weight;
  return j;
}

}  // namespace

Scenario load_scenario_json(const std::string& text, const std::string& name) {
  json doc = json::parse(text);
  Scenario scenario;
  scenario.name = name;
  NetworkConfig& net = scenario.network;

  net.delta_s = doc.at("delta_s").get<double>();
  net.horizon_s = doc.at("horizon_s").get<double>();
  net.output_stride_s = doc.at("output_stride_s").get<double>();

  const json& links = doc.at("links");
  for (auto it = links.begin(); it != links.end(); ++it) {
    net.link_names.push_back(it.key());
    net.links.push_back(link_params_from_json(it.value()));
  }
  net.demand.assign(net.links.size(), {});

  auto index_of = [&](const std::string& id) {
    int idx = net.link_index(id);
    if (idx < 0) throw std::runtime_error("scenario: unknown link id '" + id + "'");
    return idx;
  };

  for (const json& jn : doc.value("nodes", json::array())) {
    NodeSpec node;
    for (const auto& id : jn.at("upstream")) node.upstream.push_back(index_of(id.get<std::string>()));
    for (const auto& id : jn.at("downstream")) node.downstream.push_back(index_of(id.get<std::string>()));
    node.turning.assign(node.upstream.size(), std::vector<double>(node.downstream.size(), 0.0));
    const json& turning = jn.at("turning");
    for (size_t m = 0; m < node.upstream.size(); ++m) {
      const std::string& from = net.link_names[static_cast<size_t>(node.upstream[m])];
      if (!turning.contains(from)) continue;
      for (auto it = turning.at(from).begin(); it != turning.at(from).end(); ++it) {
        int j = index_of(it.key());
        int n_pos = node.downstream_pos(j);
        if (n_pos < 0) throw std::runtime_error("scenario: turning target '" + it.key() + "' not downstream");
        node.turning[m][static_cast<size_t>(n_pos)] = it.value().get<double>();
      }
    }
    net.nodes.push_back(std::move(node));
  }

  if (doc.contains("demand")) {
    for (auto it = doc.at("demand").begin(); it != doc.at("demand").end(); ++it) {
      int i = index_of(it.key());
      for (const json& seg : it.value()) {
        net.demand[static_cast<size_t>(i)].push_back(
            {seg.at(0).get<double>(), seg.at(1).get<double>(), seg.at(2).get<double>()});
      }
    }
  }

  if (doc.contains("signals")) {
    const json& js = doc.at("signals");
    SignalLayout layout;
    layout.saturation_flow_veh_s = js.value("saturation_flow_veh_s", 0.5);
    layout.x_lb_s = js.value("x_lb_s", 4.0);
    layout.fixed_green_ratio.assign(net.links.size(), 0.0);
    if (js.contains("fixed_green")) {
      for (auto it = js.at("fixed_green").begin(); it != js.at("fixed_green").end(); ++it)
        layout.fixed_green_ratio[static_cast<size_t>(index_of(it.key()))] = it.value().get<double>();
    }
    for (const json& ji : js.at("intersections")) {
      IntersectionSpec spec;
      spec.id = ji.at("id").get<std::string>();
      spec.available_ratio = ji.value("available_ratio", 1.0);
      spec.cycle_s = ji.value("cycle_s", 90.0);
      for (const json& jp : ji.at("phases")) {
        PhaseSpec phase;
        phase.id = jp.at("id").get<std::string>();
        for (const auto& id : jp.at("links")) phase.links.push_back(index_of(id.get<std::string>()));
        spec.phases.push_back(std::move(phase));
      }
      layout.intersections.push_back(std::move(spec));
    }
    scenario.signals = std::move(layout);
  }

  return scenario;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (auto dot = name.find_last_of('.'); dot != std::string::npos) name = name.substr(0, dot);
  return load_scenario_json(buf.str(), name);
}

std::string scenario_to_json(const Scenario& scenario) {
  const NetworkConfig& net = scenario.network;
  json doc;
  doc["delta_s"] = net.delta_s;
  doc["horizon_s"] = net.horizon_s;
  doc["output_stride_s"] = net.output_stride_s;
  json links = json::object();
  for (size_t i = 0; i < net.links.size(); ++i) links[net.link_names[i]] = link_params_to_json(net.links[i]);
  doc["links"] = links;

  json nodes = json::array();
  for (const NodeSpec& node : net.nodes) {
    json jn;
    for (int i : node.upstream) jn["upstream"].push_back(net.link_names[static_cast<size_t>(i)]);
    for (int j : node.downstream) jn["downstream"].push_back(net.link_names[static_cast<size_t>(j)]);
    json turning = json::object();
    for (size_t m = 0; m < node.upstream.size(); ++m) {
      json row = json::object();
      for (size_t n = 0; n < node.downstream.size(); ++n)
        if (node.turning[m][n] > 0.0)
          row[net.link_names[static_cast<size_t>(node.downstream[n])]] = node.turning[m][n];
      turning[net.link_names[static_cast<size_t>(node.upstream[m])]] = row;
    }
    jn["turning"] = turning;
    nodes.push_back(jn);
  }
  doc["nodes"] = nodes;

  json demand = json::object();
  for (size_t i = 0; i < net.demand.size(); ++i) {
    if (net.demand[i].empty()) continue;
    json segs = json::array();
    for (const DemandSegment& s : net.demand[i]) segs.push_back({s.t_start_s, s.t_end_s, s.rate_veh_s});
    demand[net.link_names[i]] = segs;
  }
  doc["demand"] = demand;

  if (scenario.signals) {
    const SignalLayout& layout = *scenario.signals;
    json js;
    js["saturation_flow_veh_s"] = layout.saturation_flow_veh_s;
    js["x_lb_s"] = layout.x_lb_s;
    json fixed = json::object();
    for (size_t i = 0; i < layout.fixed_green_ratio.size(); ++i)
      if (layout.fixed_green_ratio[i] > 0.0) fixed[net.link_names[i]] = layout.fixed_green_ratio[i];
    if (!fixed.empty()) js["fixed_green"] = fixed;
    json intersections = json::array();
    for (const IntersectionSpec& spec : layout.intersections) {
      json ji;
      ji["id"] = spec.id;
      ji["available_ratio"] = spec.available_ratio;
      ji["cycle_s"] = spec.cycle_s;
      json phases = json::array();
      for (const PhaseSpec& phase : spec.phases) {
        json jp;
        jp["id"] = phase.id;
        for (int link : phase.links) jp["links"].push_back(net.link_names[static_cast<size_t>(link)]);
        phases.push_back(jp);
      }
      ji["phases"] = phases;
      intersections.push_back(ji);
    }
    js["intersections"] = intersections;
    doc["signals"] = js;
  }

  return doc.dump(2);
}

namespace {

// standard lane of the validation experiments
LinkParams standard_lane(double mu) {
  LinkParams p;
  p.length_km = 0.05;
  p.free_flow_speed_kms = 0.01;
  p.backward_wave_speed_kms = -0.005;
  p.jam_density_veh_km = 200.0;
  p.flow_capacity_veh_s = 0.67;
  p.service_rate_veh_s = mu;
  return p;
}

Scenario base_three_link(const std::string& name, double mu1, double mu2, double mu3) {
  Scenario s;
  s.name = name;
  NetworkConfig& net = s.network;
  net.delta_s = 0.1;
  net.horizon_s = 600.0;
  net.output_stride_s = 10.0;
  net.link_names = {"1", "2", "3"};
  net.links = {standard_lane(mu1), standard_lane(mu2), standard_lane(mu3)};
  net.demand.assign(3, {});
  return s;
}

}  // namespace

Scenario make_merge_exp1() {
  Scenario s = base_three_link("merge_exp1", 0.4, 0.2, 0.2);
  NodeSpec node;
  node.upstream = {0, 1};
  node.downstream = {2};
  node.turning = {{1.0}, {1.0}};
  s.network.nodes.push_back(node);
  s.network.demand[0] = {{0, 200, 0.15}, {200, 400, 0.25}, {400, 600, 0.05}};
  s.network.demand[1] = {{0, 600, 0.05}};
  return s;
}

Scenario make_merge_exp2() {
  Scenario s = base_three_link("merge_exp2", 0.2, 0.2, 0.6);
  NodeSpec node;
  node.upstream = {0, 1};
  node.downstream = {2};
  node.turning = {{1.0}, {1.0}};
  s.network.nodes.push_back(node);
  s.network.demand[0] = {{0, 200, 0.15}, {200, 400, 0.25}, {400, 600, 0.05}};
  s.network.demand[1] = {{0, 600, 0.15}};
  return s;
}

namespace {

Scenario base_diverge(const std::string& name, double mu1, double mu2, double mu3, double p12) {
  Scenario s = base_three_link(name, mu1, mu2, mu3);
  NodeSpec node;
  node.upstream = {0};
  node.downstream = {1, 2};
  node.turning = {{p12, 1.0 - p12}};
  s.network.nodes.push_back(node);
  s.network.demand[0] = {{0, 200, 0.2}, {200, 400, 0.4}, {400, 600, 0.1}};
  return s;
}

}  // namespace

Scenario make_diverge_exp3() { return base_diverge("diverge_exp3", 0.3, 0.05, 0.4, 0.2); }
Scenario make_diverge_exp4() { return base_diverge("diverge_exp4", 0.6, 0.4, 0.4, 0.5); }

Scenario make_eight_link() {
  Scenario s;
  s.name = "eight_link";
  NetworkConfig& net = s.network;
  net.delta_s = 0.1;
  net.horizon_s = 600.0;
  net.output_stride_s = 10.0;
  net.link_names = {"1", "2", "3", "4", "5", "6", "7", "8"};
  double mu[] = {0.25, 0.25, 0.2, 0.2, 0.4, 0.4, 0.4, 0.4};
  for (double m : mu) net.links.push_back(standard_lane(m));
  net.demand.assign(8, {});
  net.demand[0] = {{0, 200, 0.1}, {200, 400, 0.2}, {400, 600, 0.15}};
  net.demand[1] = {{0, 200, 0.1}, {200, 400, 0.15}, {400, 600, 0.2}};

  auto idx = [&](const char* name) { return net.link_index(name); };
  // straight with probability 2/3, U-turn with probability 1/3
  NodeSpec n2;  // downstream end of link 1
  n2.upstream = {idx("1")};
  n2.downstream = {idx("6"), idx("5")};
  n2.turning = {{2.0 / 3.0, 1.0 / 3.0}};
  NodeSpec n7;  // downstream end of link 2
  n7.upstream = {idx("2")};
  n7.downstream = {idx("8"), idx("7")};
  n7.turning = {{2.0 / 3.0, 1.0 / 3.0}};
  NodeSpec n3;  // merge into exit link 4
  n3.upstream = {idx("6"), idx("7")};
  n3.downstream = {idx("4")};
  n3.turning = {{1.0}, {1.0}};
  NodeSpec n6;  // merge into exit link 3
  n6.upstream = {idx("8"), idx("5")};
  n6.downstream = {idx("3")};
  n6.turning = {{1.0}, {1.0}};
  net.nodes = {n2, n7, n3, n6};
  return s;
}

Scenario make_grid20(const std::string& demand_level) {
  double arterial, cross;
  if (demand_level == "high") {
    arterial = 0.22;
    cross = 0.14;
  } else if (demand_level == "medium") {
    arterial = 0.11;
    cross = 0.07;
  } else {
    throw std::invalid_argument("make_grid20: demand level must be 'high' or 'medium'");
  }

  Scenario s;
  s.name = "grid20_" + demand_level;
  NetworkConfig& net = s.network;
  net.delta_s = 0.1;
  net.horizon_s = 900.0;
  net.output_stride_s = 10.0;

  LinkParams road;
  road.length_km = 0.1;
  road.free_flow_speed_kms = 50.0 / 3600.0;
  road.backward_wave_speed_kms = -15.0 / 3600.0;
  road.jam_density_veh_km = 200.0;
  road.flow_capacity_veh_s = 0.5;
  road.service_rate_veh_s = 0.5;  // unsignalized default; plans override signalized links

  for (int i = 1; i <= 20; ++i) net.link_names.push_back("L" + std::to_string(i));
  net.links.assign(20, road);
  net.demand.assign(20, {});

  auto idx = [&](int n) { return n - 1; };
  // signalized approaches start at half of the saturation flow
  for (int n : {1, 5, 14, 2, 4, 19, 7, 11, 15, 8, 10, 18})
    net.links[static_cast<size_t>(idx(n))].service_rate_veh_s = 0.25;

  auto node = [&](std::vector<int> up, std::vector<int> down,
                  std::vector<std::vector<double>> turning) {
    NodeSpec spec;
    for (int u : up) spec.upstream.push_back(idx(u));
    for (int d : down) spec.downstream.push_back(idx(d));
    spec.turning = std::move(turning);
    net.nodes.push_back(std::move(spec));
  };

  // 2x2 grid: intersections A,B (top row, west/east) and C,D (bottom row);
  // two-way east-west arterials, one-way cross streets with feeder segments
  node({1, 5, 14}, {2, 6, 15}, {{0.7, 0.0, 0.3}, {0.0, 0.7, 0.3}, {0.25, 0.25, 0.5}});   // A
  node({2, 4, 19}, {3, 5, 20}, {{0.7, 0.0, 0.3}, {0.0, 0.7, 0.3}, {0.25, 0.25, 0.5}});   // B
  node({7, 11, 15}, {8, 12, 16}, {{0.7, 0.0, 0.3}, {0.0, 0.7, 0.3}, {0.25, 0.25, 0.5}}); // C
  node({8, 10, 18}, {9, 11, 19}, {{0.7, 0.0, 0.3}, {0.0, 0.7, 0.3}, {0.25, 0.25, 0.5}}); // D
  node({13}, {14}, {{1.0}});  // north feeder
  node({17}, {18}, {{1.0}});  // south feeder

  for (int n : {1, 4, 7, 10}) net.demand[static_cast<size_t>(idx(n))] = {{0, 900, arterial}};
  for (int n : {13, 17}) net.demand[static_cast<size_t>(idx(n))] = {{0, 900, cross}};

  SignalLayout layout;
  layout.saturation_flow_veh_s = 0.5;  // 1800 veh/h
  layout.x_lb_s = 4.0;
  layout.fixed_green_ratio.assign(20, 0.0);
  auto intersection = [&](const std::string& id, std::vector<int> ew, std::vector<int> ns) {
    IntersectionSpec spec;
    spec.id = id;
    spec.available_ratio = 0.9;
    spec.cycle_s = 90.0;
    PhaseSpec pe, pn;
    pe.id = id + "_EW";
    for (int n : ew) pe.links.push_back(idx(n));
    pn.id = id + "_NS";
    for (int n : ns) pn.links.push_back(idx(n));
    spec.phases = {pe, pn};
    layout.intersections.push_back(std::move(spec));
  };
  intersection("A", {1, 5}, {14});
  intersection("B", {2, 4}, {19});
  intersection("C", {7, 11}, {15});
  intersection("D", {8, 10}, {18});
  s.signals = std::move(layout);
  return s;
}

Scenario make_single_link(double lambda, double mu, double horizon_s) {
  Scenario s;
  s.name = "single_link";
  NetworkConfig& net = s.network;
  net.delta_s = 0.1;
  net.horizon_s = horizon_s;
  net.output_stride_s = 10.0;
  net.link_names = {"1"};
  net.links = {standard_lane(mu)};
  net.demand = {{{0.0, horizon_s, lambda}}};
  return s;
}

Scenario make_chain(int count, double lambda, double mu, double horizon_s, double length_km) {
  Scenario s;
  s.name = "chain" + std::to_string(count);
  NetworkConfig& net = s.network;
  net.delta_s = 0.1;
  net.horizon_s = horizon_s;
  net.output_stride_s = 10.0;
  for (int i = 1; i <= count; ++i) {
    net.link_names.push_back(std::to_string(i));
    LinkParams p = standard_lane(mu);
    p.length_km = length_km;
    net.links.push_back(p);
  }
  net.demand.assign(static_cast<size_t>(count), {});
  net.demand[0] = {{0.0, horizon_s, lambda}};
  for (int i = 0; i + 1 < count; ++i) {
    NodeSpec node;
    node.upstream = {i};
    node.downstream = {i + 1};
    node.turning = {{1.0}};
    net.nodes.push_back(node);
  }
  return s;
}

std::vector<std::string> bundled_scenario_names() {
  return {"merge_exp1", "merge_exp2", "diverge_exp3", "diverge_exp4",
          "eight_link", "grid20_high", "grid20_medium"};
}

Scenario bundled_scenario(const std::string& name) {
  if (name == "merge_exp1") return make_merge_exp1();
  if (name == "merge_exp2") return make_merge_exp2();
  if (name == "diverge_exp3") return make_diverge_exp3();
  if (name == "diverge_exp4") return make_diverge_exp4();
  if (name == "eight_link") return make_eight_link();
  if (name == "grid20_high") return make_grid20("high");
  if (name == "grid20_medium") return make_grid20("medium");
  throw std::invalid_argument("unknown bundled scenario: " + name);
}

}  // namespace sltm
