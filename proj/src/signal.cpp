#include "sltm/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace sltm {

int SignalLayout::phase_count() const {
  int n = 0;
  for (const IntersectionSpec& d : intersections) n += static_cast<int>(d.phases.size());
  return n;
}

int SignalLayout::phase_offset(int d) const {
  int n = 0;
  for (int i = 0; i < d; ++i) n += static_cast<int>(intersections[static_cast<size_t>(i)].phases.size());
  return n;
}

bool plan_feasible(const SignalPlan& plan, const SignalLayout& layout, double tol) {
  if (static_cast<int>(plan.x.size()) != layout.phase_count()) return false;
  int idx = 0;
  for (size_t d = 0; d < layout.intersections.size(); ++d) {
    const IntersectionSpec& spec = layout.intersections[d];
    double lb = layout.x_lb_ratio(static_cast<int>(d));
    double sum = 0.0;
    for (size_t p = 0; p < spec.phases.size(); ++p, ++idx) {
      double x = plan.x[static_cast<size_t>(idx)];
      if (x < lb - tol) return false;
      sum += x;
    }
    if (std::abs(sum - spec.available_ratio) > tol) return false;
  }
  return true;
}

std::vector<double> service_rates_from_plan(const SignalPlan& plan, const SignalLayout& layout,
                                            const std::vector<double>& base_mu) {
  if (!plan_feasible(plan, layout))
    throw std::invalid_argument("service_rates_from_plan: infeasible plan");
  std::vector<double> mu = base_mu;
  std::vector<double> green(base_mu.size(), 0.0);
  std::vector<bool> signalized(base_mu.size(), false);

  int idx = 0;
  for (const IntersectionSpec& spec : layout.intersections) {
    for (const PhaseSpec& phase : spec.phases) {
      for (int link : phase.links) {
        green[static_cast<size_t>(link)] += plan.x[static_cast<size_t>(idx)];
        signalized[static_cast<size_t>(link)] = true;
      }
      ++idx;
    }
  }
  for (size_t i = 0; i < mu.size(); ++i) {
    double e = layout.fixed_green(static_cast<int>(i));
    if (signalized[i] || e > 0.0) mu[i] = (green[i] + e) * layout.saturation_flow_veh_s;
  }
  return mu;
}

SignalPlan sample_feasible_plan(const SignalLayout& layout, std::mt19937_64& rng) {
  SignalPlan plan;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (size_t d = 0; d < layout.intersections.size(); ++d) {
    const IntersectionSpec& spec = layout.intersections[d];
    const int m = static_cast<int>(spec.phases.size());
    const double lb = layout.x_lb_ratio(static_cast<int>(d));
    const double free_mass = spec.available_ratio - m * lb;
    if (free_mass <= 0.0)
      throw std::runtime_error("sample_feasible_plan: lower bounds exceed available cycle at " + spec.id);
    std::vector<double> spacings(static_cast<size_t>(m));
    double total = 0.0;
    for (double& s : spacings) {
      s = -std::log1p(-unit(rng));
      total += s;
    }
    for (double s : spacings) plan.x.push_back(lb + free_mass * s / total);
  }
  return plan;
}

}  // namespace sltm
