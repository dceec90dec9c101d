#include "sltm/link.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sltm {

bool LinkParams::valid() const {
  return length_km > 0.0 && free_flow_speed_kms > 0.0 && backward_wave_speed_kms < 0.0 &&
         jam_density_veh_km > 0.0 && flow_capacity_veh_s > 0.0 && service_rate_veh_s >= 0.0 &&
         entry_rate_veh_s >= 0.0 && mixture_weight <= 1.0;
}

LinkGeometry compute_geometry(const LinkParams& params, double delta_s) {
  if (!params.valid()) throw std::invalid_argument("compute_geometry: invalid link parameters");
  if (!(delta_s > 0.0)) throw std::invalid_argument("compute_geometry: delta must be > 0");
  LinkGeometry g;
  // ties round half up
  g.space_capacity = static_cast<int>(std::floor(params.jam_density_veh_km * params.length_km + 0.5));
  if (g.space_capacity < 1)
    throw std::runtime_error("compute_geometry: link too short, space capacity rounds to 0");
  g.k_fwd = static_cast<int>(std::ceil(params.length_km / (params.free_flow_speed_kms * delta_s) - 1e-12));
  g.k_bwd = static_cast<int>(
      std::ceil(params.length_km / (std::abs(params.backward_wave_speed_kms) * delta_s) - 1e-12));
  g.k_fwd = std::max(g.k_fwd, 1);
  g.k_bwd = std::max(g.k_bwd, 1);
  return g;
}

void FlowHistory::append(double q_in, double q_out) {
  q_in_.push_back(q_in);
  q_out_.push_back(q_out);
  cum_in_.push_back(cum_in_.back() + q_in);
  cum_out_.push_back(cum_out_.back() + q_out);
}

double FlowHistory::rate_in(int r) const {
  if (r < 0 || r >= size()) return 0.0;
  return q_in_[static_cast<size_t>(r)];
}

double FlowHistory::rate_out(int r) const {
  if (r < 0 || r >= size()) return 0.0;
  return q_out_[static_cast<size_t>(r)];
}

double FlowHistory::cum_in(int upto_exclusive) const {
  int idx = std::clamp(upto_exclusive, 0, size());
  return cum_in_[static_cast<size_t>(idx)];
}

double FlowHistory::cum_out(int upto_exclusive) const {
  int idx = std::clamp(upto_exclusive, 0, size());
  return cum_out_[static_cast<size_t>(idx)];
}

namespace {

double clamp_rate(double value, const char* what, Diagnostics* diag) {
  if (value < -1e-9) {
    warn(diag, std::string(what) + " negative by " + std::to_string(-value) + ", clamped");
  }
  return std::max(value, 0.0);
}

}  // namespace

double expected_uq_rate(const FlowHistory& history, int k, int k_bwd, Diagnostics* diag) {
  double v = history.cum_in(k) - history.cum_out(k - k_bwd);
  return clamp_rate(v, "expected UQ rate", diag);
}

double expected_dq_rate(const FlowHistory& history, int k, int k_fwd, Diagnostics* diag) {
  double v = history.cum_in(k - k_fwd) - history.cum_out(k);
  return clamp_rate(v, "expected DQ rate", diag);
}

namespace {

constexpr double kGuard = 1e-12;

// Death rate whose expected downward flux d * P(X > 0) matches target_flux.
double lifted_death_rate(const QueueDistribution& dist, double target_flux, double cap) {
  double p_busy = 1.0 - dist.prob_empty();
  if (p_busy < kGuard) return 0.0;
  return std::min(target_flux / p_busy, cap);
}

// Birth rate whose expected upward flux b * P(X < capacity) matches target_flux.
double lifted_birth_rate(const QueueDistribution& dist, double target_flux) {
  double p_open = 1.0 - dist.prob_full();
  if (p_open < kGuard) return 0.0;
  return target_flux / p_open;
}

}  // namespace

void step_univariate_uq(LinkState& state, const LinkGeometry& geometry, const LinkParams& params,
                        double lambda, double mu_eff, double delta_s, Diagnostics* diag) {
  const int k = state.history.size();
  const double delayed_out = state.history.rate_out(k - geometry.k_bwd - 1);
  const double delayed_in = state.history.rate_in(k - geometry.k_fwd - 1);

  double d_uq = lifted_death_rate(state.uq_from_uq_model, delayed_out, params.flow_capacity_veh_s);
  state.uq_from_uq_model = propagate_birth_death(state.uq_from_uq_model, lambda, d_uq, delta_s, diag);

  double b_dq = lifted_birth_rate(state.dq_from_uq_model, delayed_in);
  state.dq_from_uq_model = propagate_birth_death(state.dq_from_uq_model, b_dq, mu_eff, delta_s, diag);
}

void step_univariate_dq(LinkState& state, const LinkGeometry& geometry, const LinkParams& params,
                        double lambda, double mu_eff, double delta_s, Diagnostics* diag) {
  const int k = state.history.size();
  const double delayed_out = state.history.rate_out(k - geometry.k_bwd - 1);
  const double delayed_in = state.history.rate_in(k - geometry.k_fwd - 1);

  double b_dq = lifted_birth_rate(state.dq_from_dq_model, delayed_in);
  state.dq_from_dq_model = propagate_birth_death(state.dq_from_dq_model, b_dq, mu_eff, delta_s, diag);

  double d_uq = lifted_death_rate(state.uq_from_dq_model, delayed_out, params.flow_capacity_veh_s);
  state.uq_from_dq_model = propagate_birth_death(state.uq_from_dq_model, lambda, d_uq, delta_s, diag);
}

std::pair<QueueDistribution, QueueDistribution> mixture_marginals(const LinkState& state,
                                                                  double w_hat) {
  if (w_hat < 0.0 || w_hat > 1.0) throw std::invalid_argument("mixture_marginals: weight outside [0,1]");
  const size_t n = state.uq_from_uq_model.probs().size();
  std::vector<double> uq(n), dq(n);
  for (size_t i = 0; i < n; ++i) {
    uq[i] = w_hat * state.uq_from_uq_model.probs()[i] + (1.0 - w_hat) * state.uq_from_dq_model.probs()[i];
    dq[i] = w_hat * state.dq_from_uq_model.probs()[i] + (1.0 - w_hat) * state.dq_from_dq_model.probs()[i];
  }
  return {QueueDistribution::from_probs(std::move(uq)), QueueDistribution::from_probs(std::move(dq))};
}

std::pair<double, double> instantaneous_flows(LinkState& state, double lambda, double mu_eff,
                                              const QueueDistribution& uq_marginal,
                                              const QueueDistribution& dq_marginal) {
  double q_in = lambda * (1.0 - uq_marginal.prob_full());
  double q_out = mu_eff * (1.0 - dq_marginal.prob_empty());
  state.history.append(q_in, q_out);
  return {q_in, q_out};
}

double default_mixture_weight(double lambda0, double mu0) {
  double denom = lambda0 + mu0;
  double w = denom > 0.0 ? mu0 / denom : 0.5;
  return std::clamp(w, 0.1, 0.9);
}

}  // namespace sltm
