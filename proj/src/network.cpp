#include "sltm/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sltm {

int NetworkConfig::link_index(const std::string& name) const {
  for (size_t i = 0; i < link_names.size(); ++i)
    if (link_names[i] == name) return static_cast<int>(i);
  return -1;
}

double NetworkConfig::demand_rate(int link, double t) const {
  if (link < 0 || link >= link_count()) return 0.0;
  for (const DemandSegment& seg : demand[static_cast<size_t>(link)]) {
    if (t >= seg.t_start_s && t < seg.t_end_s) return seg.rate_veh_s;
  }
  // closed right end of the horizon reads the last covering segment
  for (const DemandSegment& seg : demand[static_cast<size_t>(link)]) {
    if (t == seg.t_end_s && t >= horizon_s) return seg.rate_veh_s;
  }
  return 0.0;
}

std::vector<std::string> validate_config(const NetworkConfig& config) {
  std::vector<std::string> issues;
  auto name = [&](int i) {
    return i >= 0 && i < config.link_count() ? config.link_names[static_cast<size_t>(i)]
                                             : "#" + std::to_string(i);
  };

  if (!(config.delta_s > 0.0)) issues.push_back("delta_s must be > 0");
  if (!(config.horizon_s > 0.0)) issues.push_back("horizon_s must be > 0");
  if (!(config.output_stride_s > 0.0)) issues.push_back("output_stride_s must be > 0");
  if (config.link_names.size() != config.links.size())
    issues.push_back("link_names and links sizes differ");
  if (config.demand.size() != config.links.size())
    issues.push_back("demand table size differs from link count");

  for (int i = 0; i < config.link_count(); ++i) {
    const LinkParams& p = config.links[static_cast<size_t>(i)];
    if (!p.valid()) {
      issues.push_back("link " + name(i) + ": invalid parameters");
      continue;
    }
    if (std::floor(p.jam_density_veh_km * p.length_km + 0.5) < 1.0)
      issues.push_back("link " + name(i) + ": space capacity rounds to 0 (link too short)");
  }

  std::vector<int> as_upstream(config.links.size(), 0), as_downstream(config.links.size(), 0);
  for (size_t n = 0; n < config.nodes.size(); ++n) {
    const NodeSpec& node = config.nodes[n];
    std::string tag = "node " + std::to_string(n);
    if (node.downstream.size() > 10)
      issues.push_back(tag + ": more than 10 downstream links, split the node");
    if (node.turning.size() != node.upstream.size())
      issues.push_back(tag + ": turning matrix row count mismatch");
    for (int i : node.upstream) {
      if (i < 0 || i >= config.link_count()) {
        issues.push_back(tag + ": dangling upstream link reference " + std::to_string(i));
        continue;
      }
      as_upstream[static_cast<size_t>(i)]++;
      if (node.downstream_pos(i) >= 0)
        issues.push_back(tag + ": link " + name(i) + " appears both upstream and downstream");
    }
    for (int j : node.downstream) {
      if (j < 0 || j >= config.link_count()) {
        issues.push_back(tag + ": dangling downstream link reference " + std::to_string(j));
        continue;
      }
      as_downstream[static_cast<size_t>(j)]++;
    }
    for (size_t m = 0; m < node.turning.size(); ++m) {
      if (node.turning[m].size() != node.downstream.size()) {
        issues.push_back(tag + ": turning row size mismatch");
        continue;
      }
      double row = 0.0;
      bool neg = false;
      for (double p : node.turning[m]) {
        row += p;
        neg = neg || p < 0.0;
      }
      if (neg)
        issues.push_back(tag + ": negative turning probability from link " +
                         name(node.upstream[m]));
      if (row > 1.0 + 1e-9)
        issues.push_back(tag + ": turning probabilities from link " + name(node.upstream[m]) +
                         " sum to " + std::to_string(row) + " > 1");
    }
  }
  for (int i = 0; i < config.link_count(); ++i) {
    if (as_upstream[static_cast<size_t>(i)] > 1)
      issues.push_back("link " + name(i) + " is upstream of more than one node");
    if (as_downstream[static_cast<size_t>(i)] > 1)
      issues.push_back("link " + name(i) + " is downstream of more than one node");
  }

  for (int i = 0; i < config.link_count() && static_cast<size_t>(i) < config.demand.size(); ++i) {
    std::vector<DemandSegment> segs = config.demand[static_cast<size_t>(i)];
    if (segs.empty()) continue;
    std::sort(segs.begin(), segs.end(),
              [](const DemandSegment& a, const DemandSegment& b) { return a.t_start_s < b.t_start_s; });
    double cursor = 0.0;
    for (const DemandSegment& s : segs) {
      if (s.rate_veh_s < 0.0) issues.push_back("link " + name(i) + ": negative demand rate");
      if (s.t_start_s > cursor + 1e-9)
        issues.push_back("link " + name(i) + ": demand gap [" + std::to_string(cursor) + "," +
                         std::to_string(s.t_start_s) + ")");
      if (s.t_start_s < cursor - 1e-9)
        issues.push_back("link " + name(i) + ": demand segments overlap at " +
                         std::to_string(s.t_start_s));
      cursor = std::max(cursor, s.t_end_s);
    }
    if (cursor < config.horizon_s - 1e-9)
      issues.push_back("link " + name(i) + ": demand gap [" + std::to_string(cursor) + "," +
                       std::to_string(config.horizon_s) + ")");
  }

  return issues;
}

namespace {

struct LinkRuntime {
  LinkGeometry geometry;
  LinkState state;
  double weight = 0.5;
  int upstream_node = -1;   // node where this link is in M
  int downstream_node = -1; // node where this link is in N

  LinkRuntime(const LinkParams& params, double delta)
      : geometry(compute_geometry(params, delta)), state(geometry.space_capacity) {}
};

}  // namespace

LoadingResult run_loading(const NetworkConfig& config,
                          const std::function<void(const TrajectoryRecord&)>& sink) {
  {
    auto issues = validate_config(config);
    if (!issues.empty())
      throw std::runtime_error("run_loading: invalid config: " + issues.front());
  }

  LoadingResult result;
  Diagnostics diag;
  const int links = config.link_count();
  const double delta = config.delta_s;
  const int total_steps = static_cast<int>(std::llround(config.horizon_s / delta));
  const int stride_steps =
      std::max(1, static_cast<int>(std::llround(config.output_stride_s / delta)));

  std::vector<LinkRuntime> rt;
  rt.reserve(static_cast<size_t>(links));
  std::vector<double> mu(static_cast<size_t>(links)), gamma_now(static_cast<size_t>(links));
  for (int i = 0; i < links; ++i) {
    const LinkParams& p = config.links[static_cast<size_t>(i)];
    rt.emplace_back(p, delta);
    mu[static_cast<size_t>(i)] = p.service_rate_veh_s;
    result.output_state_values += 2L * (rt.back().geometry.space_capacity + 1);
  }
  for (size_t n = 0; n < config.nodes.size(); ++n) {
    for (int i : config.nodes[n].upstream) rt[static_cast<size_t>(i)].upstream_node = static_cast<int>(n);
    for (int j : config.nodes[n].downstream) rt[static_cast<size_t>(j)].downstream_node = static_cast<int>(n);
  }

  // initial conditions: empty network, lambda = gamma(0), mu_hat = mu
  for (int i = 0; i < links; ++i) {
    LinkRuntime& r = rt[static_cast<size_t>(i)];
    double gamma0 = config.demand_rate(i, 0.0);
    r.state.arrival_rate = gamma0;
    r.state.effective_service_rate = mu[static_cast<size_t>(i)];
    const LinkParams& p = config.links[static_cast<size_t>(i)];
    r.weight = p.mixture_weight >= 0.0 ? p.mixture_weight
                                       : default_mixture_weight(gamma0, mu[static_cast<size_t>(i)]);
    r.state.history.append(gamma0, 0.0);  // q_in(0), q_out(0)
  }

  auto emit = [&](double t, int link, const QueueDistribution& uq, const QueueDistribution& dq,
                  double q_in, double q_out) {
    const LinkRuntime& r = rt[static_cast<size_t>(link)];
    TrajectoryRecord rec;
    rec.time_s = t;
    rec.link = link;
    rec.e_uq = uq.mean();
    rec.e_dq = dq.mean();
    rec.p_uq_full = uq.prob_full();
    rec.p_dq_empty = dq.prob_empty();
    rec.q_in = q_in;
    rec.q_out = q_out;
    rec.lambda = r.state.arrival_rate;
    rec.mu_eff = r.state.effective_service_rate;
    result.records.push_back(rec);
    if (sink) sink(rec);
  };

  for (int i = 0; i < links; ++i) {
    auto [uq, dq] = mixture_marginals(rt[static_cast<size_t>(i)].state, rt[static_cast<size_t>(i)].weight);
    emit(0.0, i, uq, dq, rt[static_cast<size_t>(i)].state.history.rate_in(0), 0.0);
  }

  BoundarySnapshot snapshot;
  snapshot.links.assign(static_cast<size_t>(links), LinkBoundary{});
  std::vector<QueueDistribution> uq_marg, dq_marg;
  uq_marg.reserve(static_cast<size_t>(links));
  dq_marg.reserve(static_cast<size_t>(links));

  for (int k = 1; k <= total_steps; ++k) {
    const double t = k * delta;

    // phase A: advance every link with interval-(k-1) rates
    uq_marg.clear();
    dq_marg.clear();
    for (int i = 0; i < links; ++i) {
      LinkRuntime& r = rt[static_cast<size_t>(i)];
      const LinkParams& p = config.links[static_cast<size_t>(i)];
      step_univariate_uq(r.state, r.geometry, p, r.state.arrival_rate,
                         r.state.effective_service_rate, delta, &diag);
      step_univariate_dq(r.state, r.geometry, p, r.state.arrival_rate,
                         r.state.effective_service_rate, delta, &diag);
      auto [uq, dq] = mixture_marginals(r.state, r.weight);
      LinkBoundary& b = snapshot.links[static_cast<size_t>(i)];
      b.p_uq_full = uq.prob_full();
      b.p_dq_empty = dq.prob_empty();
      b.q_uq_rate = expected_uq_rate(r.state.history, k, r.geometry.k_bwd, &diag);
      b.q_dq_rate = expected_dq_rate(r.state.history, k, r.geometry.k_fwd, &diag);
      b.capacity = r.geometry.space_capacity;
      uq_marg.push_back(std::move(uq));
      dq_marg.push_back(std::move(dq));
      gamma_now[static_cast<size_t>(i)] = config.demand_rate(i, t);
    }

    // phase B: node coupling yields interval-k rates
    for (const NodeSpec& node : config.nodes) {
      for (int i : node.upstream) {
        rt[static_cast<size_t>(i)].state.effective_service_rate =
            effective_service_rate(i, node, snapshot, mu[static_cast<size_t>(i)], delta);
      }
      for (int j : node.downstream) {
        rt[static_cast<size_t>(j)].state.arrival_rate =
            arrival_rate(j, node, snapshot, gamma_now[static_cast<size_t>(j)], mu, delta);
      }
    }
    for (int i = 0; i < links; ++i) {
      LinkRuntime& r = rt[static_cast<size_t>(i)];
      if (r.upstream_node < 0) r.state.effective_service_rate = mu[static_cast<size_t>(i)];
      if (r.downstream_node < 0) r.state.arrival_rate = gamma_now[static_cast<size_t>(i)];
    }

    // phase C: commit instantaneous flows
    for (int i = 0; i < links; ++i) {
      LinkRuntime& r = rt[static_cast<size_t>(i)];
      auto [q_in, q_out] =
          instantaneous_flows(r.state, r.state.arrival_rate, r.state.effective_service_rate,
                              uq_marg[static_cast<size_t>(i)], dq_marg[static_cast<size_t>(i)]);
      if (k % stride_steps == 0) emit(t, i, uq_marg[static_cast<size_t>(i)], dq_marg[static_cast<size_t>(i)], q_in, q_out);
    }
  }

  result.warnings = std::move(diag.warnings);
  return result;
}

BaselineResult run_deterministic_baseline(const NetworkConfig& config) {
  {
    auto issues = validate_config(config);
    if (!issues.empty())
      throw std::runtime_error("run_deterministic_baseline: invalid config: " + issues.front());
  }

  const int links = config.link_count();
  const double delta = config.delta_s;
  const int total_steps = static_cast<int>(std::llround(config.horizon_s / delta));
  const int stride_steps =
      std::max(1, static_cast<int>(std::llround(config.output_stride_s / delta)));

  std::vector<LinkGeometry> geom;
  geom.reserve(static_cast<size_t>(links));
  for (int i = 0; i < links; ++i) geom.push_back(compute_geometry(config.links[static_cast<size_t>(i)], delta));

  // cumulative counts, index k = 0..total_steps
  std::vector<std::vector<double>> up(static_cast<size_t>(links)), down(static_cast<size_t>(links));
  for (int i = 0; i < links; ++i) {
    up[static_cast<size_t>(i)].assign(static_cast<size_t>(total_steps) + 1, 0.0);
    down[static_cast<size_t>(i)].assign(static_cast<size_t>(total_steps) + 1, 0.0);
  }

  std::vector<int> upstream_node(static_cast<size_t>(links), -1), downstream_node(static_cast<size_t>(links), -1);
  for (size_t n = 0; n < config.nodes.size(); ++n) {
    for (int i : config.nodes[n].upstream) upstream_node[static_cast<size_t>(i)] = static_cast<int>(n);
    for (int j : config.nodes[n].downstream) downstream_node[static_cast<size_t>(j)] = static_cast<int>(n);
  }

  BaselineResult result;
  result.cum_up.assign(static_cast<size_t>(links), {});
  result.cum_down.assign(static_cast<size_t>(links), {});
  auto record = [&](int k) {
    result.times_s.push_back(k * delta);
    for (int i = 0; i < links; ++i) {
      result.cum_up[static_cast<size_t>(i)].push_back(up[static_cast<size_t>(i)][static_cast<size_t>(k)]);
      result.cum_down[static_cast<size_t>(i)].push_back(down[static_cast<size_t>(i)][static_cast<size_t>(k)]);
    }
  };
  record(0);

  std::vector<double> sending(static_cast<size_t>(links)), receiving(static_cast<size_t>(links)),
      outflow(static_cast<size_t>(links)), inflow(static_cast<size_t>(links));

  auto at = [](const std::vector<double>& v, int k) {
    if (k < 0) return 0.0;
    if (k >= static_cast<int>(v.size())) k = static_cast<int>(v.size()) - 1;
    return v[static_cast<size_t>(k)];
  };

  for (int k = 1; k <= total_steps; ++k) {
    const double t_prev = (k - 1) * delta;
    for (int i = 0; i < links; ++i) {
      const LinkParams& p = config.links[static_cast<size_t>(i)];
      const LinkGeometry& g = geom[static_cast<size_t>(i)];
      double avail = at(up[static_cast<size_t>(i)], k - g.k_fwd) - down[static_cast<size_t>(i)][static_cast<size_t>(k - 1)];
      sending[static_cast<size_t>(i)] = std::clamp(avail, 0.0, p.service_rate_veh_s * delta);
      double space = at(down[static_cast<size_t>(i)], k - g.k_bwd) + g.space_capacity -
                     up[static_cast<size_t>(i)][static_cast<size_t>(k - 1)];
      receiving[static_cast<size_t>(i)] = std::clamp(space, 0.0, p.flow_capacity_veh_s * delta);
      outflow[static_cast<size_t>(i)] = 0.0;
      inflow[static_cast<size_t>(i)] = 0.0;
    }

    for (const NodeSpec& node : config.nodes) {
      // per-destination scaling when receiving binds, then FIFO throttles the
      // whole sending flow of each upstream link
      std::vector<double> theta(node.downstream.size(), 1.0);
      for (size_t n = 0; n < node.downstream.size(); ++n) {
        double demand = 0.0;
        for (size_t m = 0; m < node.upstream.size(); ++m)
          demand += node.turning_prob(static_cast<int>(m), static_cast<int>(n)) *
                    sending[static_cast<size_t>(node.upstream[m])];
        double recv = receiving[static_cast<size_t>(node.downstream[n])];
        if (demand > recv) theta[n] = demand > 0.0 ? recv / demand : 1.0;
      }
      for (size_t m = 0; m < node.upstream.size(); ++m) {
        int i = node.upstream[m];
        double alpha = 1.0;
        for (size_t n = 0; n < node.downstream.size(); ++n)
          if (node.turning_prob(static_cast<int>(m), static_cast<int>(n)) > 0.0)
            alpha = std::min(alpha, theta[n]);
        double out = alpha * sending[static_cast<size_t>(i)];
        outflow[static_cast<size_t>(i)] = out;
        for (size_t n = 0; n < node.downstream.size(); ++n)
          inflow[static_cast<size_t>(node.downstream[n])] +=
              node.turning_prob(static_cast<int>(m), static_cast<int>(n)) * out;
      }
    }

    for (int i = 0; i < links; ++i) {
      if (upstream_node[static_cast<size_t>(i)] < 0) outflow[static_cast<size_t>(i)] = sending[static_cast<size_t>(i)];
      double entry = config.demand_rate(i, t_prev) * delta;
      double room = receiving[static_cast<size_t>(i)] - inflow[static_cast<size_t>(i)];
      inflow[static_cast<size_t>(i)] += std::clamp(entry, 0.0, std::max(room, 0.0));
      up[static_cast<size_t>(i)][static_cast<size_t>(k)] =
          up[static_cast<size_t>(i)][static_cast<size_t>(k - 1)] + inflow[static_cast<size_t>(i)];
      down[static_cast<size_t>(i)][static_cast<size_t>(k)] =
          down[static_cast<size_t>(i)][static_cast<size_t>(k - 1)] + outflow[static_cast<size_t>(i)];
    }

    if (k % stride_steps == 0) record(k);
  }

  return result;
}

}  // namespace sltm
