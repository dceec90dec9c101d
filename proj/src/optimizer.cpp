#include "sltm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sltm/simulator.hpp"

namespace sltm {

namespace {

NetworkConfig config_for_plan(const SignalPlan& plan, const Scenario& scenario) {
  if (!scenario.signals) throw std::invalid_argument("objective: scenario has no signal layout");
  NetworkConfig net = scenario.network;
  std::vector<double> base_mu;
  for (const LinkParams& p : net.links) base_mu.push_back(p.service_rate_veh_s);
  std::vector<double> mu = service_rates_from_plan(plan, *scenario.signals, base_mu);
  for (size_t i = 0; i < net.links.size(); ++i) net.links[i].service_rate_veh_s = mu[i];
  net.output_stride_s = 60.0;  // objective samples instantaneous values at integer minutes
  return net;
}

int resolve_t_tilde(const Scenario& scenario, const ObjectiveOptions& options) {
  int t = options.t_tilde_min > 0 ? options.t_tilde_min
                                  : static_cast<int>(scenario.network.horizon_s / 60.0);
  if (t < 1 || t * 60.0 > scenario.network.horizon_s + 1e-9)
    throw std::invalid_argument("objective: T_tilde outside the horizon");
  return t;
}

}  // namespace

double objective(const SignalPlan& plan, LoadingModel model, const Scenario& scenario,
                 const ObjectiveOptions& options) {
  NetworkConfig net = config_for_plan(plan, scenario);
  const int t_tilde = resolve_t_tilde(scenario, options);
  const int links = net.link_count();
  double sum = 0.0;

  switch (model) {
    case LoadingModel::analytic: {
      LoadingResult res = run_loading(net);
      for (const TrajectoryRecord& rec : res.records) {
        double minutes = rec.time_s / 60.0;
        int m = static_cast<int>(std::llround(minutes));
        if (m >= 1 && m <= t_tilde && std::abs(minutes - m) < 1e-9) sum += rec.e_dq;
      }
      break;
    }
    case LoadingModel::deterministic: {
      BaselineResult res = run_deterministic_baseline(net);
      for (size_t t = 0; t < res.times_s.size(); ++t) {
        double minutes = res.times_s[t] / 60.0;
        int m = static_cast<int>(std::llround(minutes));
        if (m < 1 || m > t_tilde || std::abs(minutes - m) >= 1e-9) continue;
        for (int i = 0; i < links; ++i)
          sum += res.cum_up[static_cast<size_t>(i)][t] - res.cum_down[static_cast<size_t>(i)][t];
      }
      break;
    }
    case LoadingModel::monte_carlo: {
      MonteCarloResult res = monte_carlo(net, options.mc_replications, options.mc_seed);
      for (size_t t = 0; t < res.times_s.size(); ++t) {
        double minutes = res.times_s[t] / 60.0;
        int m = static_cast<int>(std::llround(minutes));
        if (m < 1 || m > t_tilde || std::abs(minutes - m) >= 1e-9) continue;
        for (int i = 0; i < links; ++i) sum += res.mean_dq[static_cast<size_t>(i)][t];
      }
      break;
    }
  }
  return sum / (static_cast<double>(t_tilde) * static_cast<double>(links));
}

OptimizeResult optimize(const SignalPlan& initial, LoadingModel model, const Scenario& scenario,
                        int budget, const ObjectiveOptions& options) {
  if (budget < 1) throw std::invalid_argument("optimize: budget must be >= 1");
  if (!scenario.signals) throw std::invalid_argument("optimize: scenario has no signal layout");
  const SignalLayout& layout = *scenario.signals;
  if (!plan_feasible(initial, layout)) throw std::invalid_argument("optimize: infeasible initial plan");

  OptimizeResult result;
  result.best = initial;

  auto evaluate = [&](const SignalPlan& plan) {
    double f = objective(plan, model, scenario, options);
    result.trace.push_back({result.evaluations, f, plan});
    result.evaluations++;
    return f;
  };

  result.initial_objective = evaluate(initial);
  result.best_objective = result.initial_objective;

  double step = 0.1;
  const double min_step = 1e-3;
  while (result.evaluations < budget && step >= min_step) {
    bool improved = false;
    int phase_idx = 0;
    for (size_t d = 0; d < layout.intersections.size() && result.evaluations < budget; ++d) {
      const int m = static_cast<int>(layout.intersections[d].phases.size());
      const double lb = layout.x_lb_ratio(static_cast<int>(d));
      const int base = phase_idx;
      // transfer `step` of green from phase a to phase b, staying on the simplex
      for (int a = 0; a < m && result.evaluations < budget; ++a) {
        for (int b = 0; b < m && result.evaluations < budget; ++b) {
          if (a == b) continue;
          if (result.best.x[static_cast<size_t>(base + a)] - step < lb - 1e-12) continue;
          SignalPlan candidate = result.best;
          candidate.x[static_cast<size_t>(base + a)] -= step;
          candidate.x[static_cast<size_t>(base + b)] += step;
          double f = evaluate(candidate);
          if (f < result.best_objective - 1e-12) {
            result.best = candidate;
            result.best_objective = f;
            improved = true;
          }
        }
      }
      phase_idx += m;
    }
    if (!improved) step *= 0.5;
  }
  return result;
}

}  // namespace sltm
