// Randomized invariant checks across modules. The acceptance suite runs a
// larger budget of the same properties; this file keeps a quick version in
// the regular unit-test cycle.
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "oracles.hpp"
#include "sltm/network.hpp"
#include "sltm/scenario.hpp"
#include "sltm/simulator.hpp"

using namespace sltm;

namespace {

// small random merge or diverge with the standard lane geometry
Scenario random_network(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool merge = unit(rng) < 0.5;
  Scenario s = merge ? make_merge_exp1() : make_diverge_exp4();
  s.network.horizon_s = 60.0;
  for (LinkParams& p : s.network.links) {
    p.service_rate_veh_s = 0.05 + 0.5 * unit(rng);
    if (unit(rng) < 0.3) p.mixture_weight = unit(rng);
  }
  if (!merge) {
    double p12 = unit(rng);
    s.network.nodes[0].turning = {{p12 * 0.9, (1.0 - p12) * 0.9}};  // 10% exits at the node
  }
  for (auto& d : s.network.demand)
    if (!d.empty()) d = {{0.0, 60.0, 0.4 * unit(rng)}};
  return s;
}

}  // namespace

TEST_CASE("kernel fuzz: propagation stays a valid distribution") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> rate(0.0, 4.0);
  std::uniform_real_distribution<double> time(0.01, 3.0);
  std::uniform_int_distribution<int> cap(1, 12);
  for (int c = 0; c < 500; ++c) {
    QueueDistribution d = QueueDistribution::from_probs(oracles::random_distribution(rng, cap(rng)));
    QueueDistribution out = propagate_birth_death(d, rate(rng), rate(rng), time(rng));
    CHECK(out.is_valid(1e-9));
  }
}

TEST_CASE("node fuzz: transmission probability bounds and service-rate bracket") {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> n_down(0, 3);
  for (int c = 0; c < 500; ++c) {
    int nd = n_down(rng);
    std::vector<LinkBoundary> links(static_cast<size_t>(nd) + 1);
    for (LinkBoundary& b : links) {
      b.p_dq_empty = unit(rng);
      b.p_uq_full = unit(rng);
      b.q_dq_rate = 4.0 * unit(rng);
      b.q_uq_rate = 4.0 * unit(rng);
      b.capacity = 1 + static_cast<int>(unit(rng) * 8);
    }
    BoundarySnapshot snap;
    snap.links = links;

    NodeSpec node;
    node.upstream = {0};
    std::vector<double> row;
    double remaining = 1.0;
    for (int j = 0; j < nd; ++j) {
      node.downstream.push_back(j + 1);
      double p = remaining * unit(rng);
      row.push_back(p);
      remaining -= p;
    }
    node.turning = {row};

    double trans = flow_transmission_probability(0, node, snap, 0.1);
    CHECK(trans >= 0.0);
    CHECK(trans <= 1.0 - snap.at(0).p_dq_empty + 1e-12);
    for (int j = 0; j < nd; ++j) CHECK(trans <= 1.0 - snap.at(j + 1).p_uq_full + 1e-12);

    double mu = 0.1 + unit(rng);
    double mu_hat = effective_service_rate(0, node, snap, mu, 0.1);
    double p_sum = node.turn_sum(0);
    CHECK(mu_hat >= mu * (1.0 - p_sum) - 1e-12);
    CHECK(mu_hat <= mu + 1e-12);

    if (nd > 0) {
      double gamma = 0.3 * unit(rng);
      std::vector<double> mus(links.size(), mu);
      double lambda = arrival_rate(1, node, snap, gamma, mus, 0.1);
      CHECK(lambda >= gamma - 1e-15);
    }
  }
}

TEST_CASE("loading fuzz: trajectory invariants on random small networks") {
  std::mt19937_64 rng(103);
  for (int c = 0; c < 15; ++c) {
    Scenario s = random_network(rng);
    REQUIRE(validate_config(s.network).empty());
    LoadingResult res = run_loading(s.network);
    for (const TrajectoryRecord& r : res.records) {
      size_t li = static_cast<size_t>(r.link);
      double gamma = s.network.demand_rate(r.link, r.time_s);
      CHECK(r.e_uq >= -1e-12);
      CHECK(r.e_uq <= 10.0 + 1e-9);
      CHECK(r.e_dq >= -1e-12);
      CHECK(r.e_dq <= 10.0 + 1e-9);
      CHECK(r.p_uq_full >= 0.0);
      CHECK(r.p_uq_full <= 1.0 + 1e-12);
      CHECK(r.p_dq_empty >= 0.0);
      CHECK(r.p_dq_empty <= 1.0 + 1e-12);
      CHECK(r.lambda >= gamma - 1e-9);
      CHECK(r.mu_eff <= s.network.links[li].service_rate_veh_s + 1e-12);
      CHECK(r.q_in <= r.lambda + 1e-12);
      CHECK(r.q_out <= r.mu_eff + 1e-12);
    }
  }
}

TEST_CASE("simulator fuzz: conservation, FIFO, and bounds on random networks") {
  std::mt19937_64 rng(104);
  for (int c = 0; c < 10; ++c) {
    Scenario s = random_network(rng);
    SimTrajectory traj = simulate_replication(s.network, rng());
    CHECK(traj.fifo_ok);
    CHECK(traj.vehicles_entered - traj.vehicles_exited == traj.on_network_at_end);
    for (size_t i = 0; i < traj.uq.size(); ++i) {
      for (size_t t = 0; t < traj.uq[i].size(); ++t) {
        CHECK(traj.uq[i][t] >= 0.0);
        CHECK(traj.uq[i][t] <= 10.0);
        CHECK(traj.dq[i][t] <= traj.uq[i][t]);
      }
    }
  }
}

TEST_CASE("flow conservation in expectation stays within capacity slack") {
  std::mt19937_64 rng(105);
  for (int c = 0; c < 5; ++c) {
    Scenario s = random_network(rng);
    LoadingResult res = run_loading(s.network);
    // cumulative expected inflow minus outflow per link, via the emitted rates
    std::vector<double> cum(static_cast<size_t>(s.network.link_count()), 0.0);
    double stride = s.network.output_stride_s;
    for (const TrajectoryRecord& r : res.records) {
      if (r.time_s == 0.0) continue;
      size_t li = static_cast<size_t>(r.link);
      cum[li] += (r.q_in - r.q_out) * stride;
      double mu = s.network.links[li].service_rate_veh_s;
      CHECK(cum[li] >= -0.5);                  // coarse stride sampling slack
      CHECK(cum[li] <= 10.0 + mu * 0.1 * 100 + 0.5);  // capacity plus backward-lag slack
    }
  }
}
