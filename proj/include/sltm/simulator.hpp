#pragma once

#include <cstdint>
#include <vector>

#include "sltm/network.hpp"

namespace sltm {

/// One Monte-Carlo replication: per-link UQ/DQ sampled at output strides,
/// plus bookkeeping used by the conservation and FIFO checks.
struct SimTrajectory {
  std::vector<double> times_s;
  std::vector<std::vector<double>> uq;  // [link][stride]
  std::vector<std::vector<double>> dq;
  long vehicles_entered = 0;
  long vehicles_exited = 0;
  long vehicles_lost = 0;     // external arrivals blocked by a full entry link
  long on_network_at_end = 0; // vehicles still on some link at the horizon
  bool fifo_ok = true;
};

/// Exact-lag discrete-event simulation of the stochastic link transmission
/// model. Identical (config, seed) pairs produce bit-identical trajectories.
SimTrajectory simulate_replication(const NetworkConfig& config, std::uint64_t seed);

struct MonteCarloResult {
  std::vector<double> times_s;
  std::vector<std::vector<double>> mean_uq;  // [link][stride]
  std::vector<std::vector<double>> mean_dq;
  std::vector<std::vector<double>> ci_uq;    // 95% normal half-widths
  std::vector<std::vector<double>> ci_dq;
  int replications = 0;
};

/// Runs `replications` independent replications (seeds derived from
/// base_seed) in parallel and aggregates sample means and 95% CIs.
/// threads <= 0 selects hardware concurrency.
MonteCarloResult monte_carlo(const NetworkConfig& config, int replications,
                             std::uint64_t base_seed, int threads = 0);

/// Deterministic per-replication seed stream.
std::uint64_t derive_seed(std::uint64_t base_seed, int replication);

}  // namespace sltm
