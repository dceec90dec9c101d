#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sltm/network.hpp"
#include "sltm/simulator.hpp"

namespace sltm {

/// Writes the loading trajectory CSV:
/// time_s,link_id,e_uq,e_dq,p_uq_full,p_dq_empty,q_in,q_out,lambda,mu_eff
void write_trajectory_csv(std::ostream& out, const NetworkConfig& config,
                          const std::vector<TrajectoryRecord>& records);

/// Same shape plus ci_half_width_uq, ci_half_width_dq columns.
void write_monte_carlo_csv(std::ostream& out, const NetworkConfig& config,
                           const MonteCarloResult& result);

/// Baseline cumulative counts: time_s,link_id,c_up,c_down,on_link.
void write_baseline_csv(std::ostream& out, const NetworkConfig& config,
                        const BaselineResult& result);

/// Minimal per-link series parsed back from either CSV flavor.
struct ParsedSeries {
  std::vector<double> times_s;
  std::map<std::string, std::vector<double>> e_uq;  // by link id
  std::map<std::string, std::vector<double>> e_dq;
};

ParsedSeries read_series_csv(std::istream& in);

struct LinkErrorReport {
  std::string link;
  double rmse_uq = 0.0;
  double rmse_dq = 0.0;
  double max_abs_uq = 0.0;
  double max_abs_dq = 0.0;
};

/// Per-link RMSE and max-abs error between two series sharing link ids and
/// time grids. Throws on mismatched link sets or time grids.
std::vector<LinkErrorReport> compare_series(const ParsedSeries& a, const ParsedSeries& b);

}  // namespace sltm
