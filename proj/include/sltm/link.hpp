#pragma once

#include <utility>
#include <vector>

#include "sltm/probability.hpp"

namespace sltm {

/// Static parameters of a single-lane link with a triangular fundamental
/// diagram. SI-ish units: km, km/s, veh/km, veh/s.
struct LinkParams {
  double length_km = 0.0;
  double free_flow_speed_kms = 0.0;
  double backward_wave_speed_kms = 0.0;  // negative
  double jam_density_veh_km = 0.0;
  double flow_capacity_veh_s = 0.0;
  double service_rate_veh_s = 0.0;
  double entry_rate_veh_s = 0.0;  // 0 for non-source links
  double mixture_weight = -1.0;   // < 0 selects the default weight rule

  bool valid() const;
};

/// Discretized link geometry: space capacity and the forward/backward wave
/// lags expressed in whole time steps.
struct LinkGeometry {
  int space_capacity = 0;  // round(jam_density * length)
  int k_fwd = 0;           // ceil(L / (v * delta))
  int k_bwd = 0;           // ceil(L / (|w| * delta))
};

LinkGeometry compute_geometry(const LinkParams& params, double delta_s);

/// Instantaneous boundary flow-rate series q_in(r), q_out(r) for r = 0..k-1
/// with prefix sums; indices before 0 read as 0.
class FlowHistory {
 public:
  void append(double q_in, double q_out);
  int size() const { return static_cast<int>(q_in_.size()); }

  double rate_in(int r) const;
  double rate_out(int r) const;

  /// Sum of q_in(r) for r in [0, upto_exclusive), clamped to the recorded range.
  double cum_in(int upto_exclusive) const;
  double cum_out(int upto_exclusive) const;

 private:
  std::vector<double> q_in_, q_out_;
  std::vector<double> cum_in_{0.0}, cum_out_{0.0};
};

/// Expected UQ state rate q^UQ(k): accumulated inflows up to k-1 minus
/// accumulated outflows up to k-k_bwd-1. Clamped at 0.
double expected_uq_rate(const FlowHistory& history, int k, int k_bwd,
                        Diagnostics* diag = nullptr);

/// Expected DQ state rate q^DQ(k): accumulated inflows up to k-k_fwd-1 minus
/// accumulated outflows up to k-1. Clamped at 0.
double expected_dq_rate(const FlowHistory& history, int k, int k_fwd,
                        Diagnostics* diag = nullptr);

/// Per-link state: the four univariate-model component distributions, the
/// flow history, and the rates driving the next interval.
struct LinkState {
  QueueDistribution uq_from_uq_model;
  QueueDistribution dq_from_uq_model;
  QueueDistribution dq_from_dq_model;
  QueueDistribution uq_from_dq_model;
  FlowHistory history;
  double arrival_rate = 0.0;           // lambda(k)
  double effective_service_rate = 0.0; // mu_hat(k)

  explicit LinkState(int space_capacity)
      : uq_from_uq_model(space_capacity),
        dq_from_uq_model(space_capacity),
        dq_from_dq_model(space_capacity),
        uq_from_dq_model(space_capacity) {}
};

/// Advances the univariate UQ model one interval: the UQ component with
/// birth = lambda and a death rate matching the lag-delayed outflow, the DQ
/// component with a birth rate matching the lag-delayed inflow and
/// death = mu_eff. Rates are held constant over the interval.
void step_univariate_uq(LinkState& state, const LinkGeometry& geometry,
                        const LinkParams& params, double lambda, double mu_eff,
                        double delta_s, Diagnostics* diag = nullptr);

/// Mirror of step_univariate_uq acting on the DQ-model component pair. The
/// two univariate models are evaluated independently.
void step_univariate_dq(LinkState& state, const LinkGeometry& geometry,
                        const LinkParams& params, double lambda, double mu_eff,
                        double delta_s, Diagnostics* diag = nullptr);

/// Mixture marginals P(UQ) and P(DQ): convex combination of the two
/// univariate models with weight w_hat on the UQ model.
std::pair<QueueDistribution, QueueDistribution> mixture_marginals(
    const LinkState& state, double w_hat);

/// Instantaneous boundary flows q_in = lambda * P(UQ < capacity) and
/// q_out = mu_eff * P(DQ > 0), appended to the flow history.
std::pair<double, double> instantaneous_flows(LinkState& state, double lambda,
                                              double mu_eff,
                                              const QueueDistribution& uq_marginal,
                                              const QueueDistribution& dq_marginal);

/// Default mixture weight: mu / (lambda + mu) clamped to [0.1, 0.9].
double default_mixture_weight(double lambda0, double mu0);

}  // namespace sltm
