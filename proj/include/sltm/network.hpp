#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sltm/link.hpp"
#include "sltm/node.hpp"

namespace sltm {

struct DemandSegment {
  double t_start_s = 0.0;
  double t_end_s = 0.0;
  double rate_veh_s = 0.0;
};

/// Whole-network configuration. Links are indexed densely; `link_names`
/// preserves the ids used in scenario files.
struct NetworkConfig {
  std::vector<std::string> link_names;
  std::vector<LinkParams> links;
  std::vector<NodeSpec> nodes;
  std::vector<std::vector<DemandSegment>> demand;  // per link, may be empty
  double delta_s = 0.1;
  double horizon_s = 600.0;
  double output_stride_s = 1.0;

  int link_count() const { return static_cast<int>(links.size()); }
  int link_index(const std::string& name) const;

  /// Exogenous entry rate gamma of `link` at time t (0 outside any segment).
  double demand_rate(int link, double t) const;
};

/// Non-throwing configuration checks; an empty result means runnable.
std::vector<std::string> validate_config(const NetworkConfig& config);

struct TrajectoryRecord {
  double time_s = 0.0;
  int link = 0;
  double e_uq = 0.0;
  double e_dq = 0.0;
  double p_uq_full = 0.0;
  double p_dq_empty = 1.0;
  double q_in = 0.0;
  double q_out = 0.0;
  double lambda = 0.0;
  double mu_eff = 0.0;
};

struct LoadingResult {
  std::vector<TrajectoryRecord> records;  // grouped by time, then link
  std::vector<std::string> warnings;
  /// Distribution values retained for output: 2*(capacity+1) summed over links.
  long output_state_values = 0;
};

/// Runs the full analytical network loading over the horizon, emitting one
/// record per link at every output stride. Deterministic: no randomness in
/// the analytical path.
LoadingResult run_loading(const NetworkConfig& config,
                          const std::function<void(const TrajectoryRecord&)>& sink = {});

struct BaselineResult {
  std::vector<double> times_s;                 // output strides
  std::vector<std::vector<double>> cum_up;     // [link][stride]
  std::vector<std::vector<double>> cum_down;   // [link][stride]
};

/// Deterministic link-transmission baseline: cumulative boundary counts with
/// sending/receiving constraints and proportional scaling at nodes.
BaselineResult run_deterministic_baseline(const NetworkConfig& config);

}  // namespace sltm
