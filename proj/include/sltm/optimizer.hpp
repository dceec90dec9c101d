#pragma once

#include <cstdint>

#include "sltm/scenario.hpp"

namespace sltm {

enum class LoadingModel { analytic, deterministic, monte_carlo };

struct ObjectiveOptions {
  int t_tilde_min = 0;       // 0 selects horizon / 60
  int mc_replications = 200; // monte_carlo model only
  std::uint64_t mc_seed = 1;
};

/// Average over links and integer minutes 1..T_tilde of E[DQ] (analytic and
/// Monte-Carlo models) or of vehicles-on-link c_up - c_down (deterministic
/// baseline), evaluated with per-link service rates derived from the plan.
double objective(const SignalPlan& plan, LoadingModel model, const Scenario& scenario,
                 const ObjectiveOptions& options = {});

struct OptimizeResult {
  SignalPlan best;
  double best_objective = 0.0;
  double initial_objective = 0.0;
  int evaluations = 0;
  struct Eval {
    int index;
    double objective;
    SignalPlan plan;
  };
  std::vector<Eval> trace;
};

/// Derivative-free pattern search over paired green-split transfers within
/// each intersection; every iterate stays exactly feasible. Budget counts
/// objective evaluations (including the initial plan).
OptimizeResult optimize(const SignalPlan& initial, LoadingModel model, const Scenario& scenario,
                        int budget, const ObjectiveOptions& options = {});

}  // namespace sltm
