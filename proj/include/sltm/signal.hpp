#pragma once

#include <random>
#include <string>
#include <vector>

#include "sltm/network.hpp"

namespace sltm {

/// One endogenous signal phase and the links it serves.
struct PhaseSpec {
  std::string id;
  std::vector<int> links;
};

struct IntersectionSpec {
  std::string id;
  std::vector<PhaseSpec> phases;
  double available_ratio = 1.0;  // b_d
  double cycle_s = 90.0;
};

/// Signal layout of a scenario: intersections with their endogenous phases,
/// saturation flow, green lower bound, and per-link fixed-green ratios.
struct SignalLayout {
  std::vector<IntersectionSpec> intersections;
  double saturation_flow_veh_s = 0.5;
  double x_lb_s = 4.0;
  std::vector<double> fixed_green_ratio;  // per link id, may be empty (all 0)

  int phase_count() const;
  /// First global phase index of intersection d.
  int phase_offset(int d) const;
  double x_lb_ratio(int d) const {
    return x_lb_s / intersections[static_cast<size_t>(d)].cycle_s;
  }
  double fixed_green(int link) const {
    return static_cast<size_t>(link) < fixed_green_ratio.size()
               ? fixed_green_ratio[static_cast<size_t>(link)]
               : 0.0;
  }
};

/// Green-split vector, one entry per endogenous phase across all
/// intersections, in layout order.
struct SignalPlan {
  std::vector<double> x;
};

/// Checks per-intersection split sums (within tol) and lower bounds.
bool plan_feasible(const SignalPlan& plan, const SignalLayout& layout, double tol = 1e-9);

/// Per-link service rates mu_i = (sum of serving phase splits + e_i) * s.
/// Links served by no phase and with zero fixed green keep base_mu.
std::vector<double> service_rates_from_plan(const SignalPlan& plan, const SignalLayout& layout,
                                            const std::vector<double>& base_mu);

/// Uniform sample on the product of simplices {x >= x_LB, sum = b_d} via
/// exponential spacings.
SignalPlan sample_feasible_plan(const SignalLayout& layout, std::mt19937_64& rng);

}  // namespace sltm
