#pragma once

#include <functional>
#include <vector>

#include "sltm/diagnostics.hpp"

namespace sltm {

/// One node: ordered upstream link set M, ordered downstream link set N, and
/// turning probabilities p_ij. A row may sum to less than 1; the remainder
/// exits the network at the upstream link.
struct NodeSpec {
  std::vector<int> upstream;    // link ids, set M
  std::vector<int> downstream;  // link ids, set N
  std::vector<std::vector<double>> turning;  // [pos in M][pos in N]

  double turning_prob(int m_pos, int n_pos) const {
    return turning[static_cast<size_t>(m_pos)][static_cast<size_t>(n_pos)];
  }
  double turn_sum(int m_pos) const;
  int upstream_pos(int link) const;
  int downstream_pos(int link) const;
};

/// Per-link boundary quantities assembled after all link steps of an
/// interval: blocking probabilities from the mixture marginals and the
/// expected-state rates feeding the Poisson-sum approximation.
struct LinkBoundary {
  double p_dq_empty = 1.0;  // P(DQ = 0)
  double p_uq_full = 0.0;   // P(UQ = capacity)
  double q_dq_rate = 0.0;   // q^DQ(k) [veh/s]
  double q_uq_rate = 0.0;   // q^UQ(k) [veh/s]
  int capacity = 1;
};

struct BoundarySnapshot {
  std::vector<LinkBoundary> links;  // indexed by link id
  const LinkBoundary& at(int link) const { return links[static_cast<size_t>(link)]; }
};

/// A boundary event entering the inclusion-exclusion sum: either
/// {DQ_link = 0} or {UQ_link = capacity}.
struct QueueEvent {
  int link = 0;
  bool uq_full = false;  // false -> DQ empty event
};

/// Joint probability of a set of boundary events. Overridable so tests can
/// substitute exact joints of independent marginals.
using JointFn = std::function<double(const std::vector<QueueEvent>&, const BoundarySnapshot&, double)>;

/// Poisson/multinomial approximation of P(all events in `subset` hold).
/// Singletons return the marginal read directly from the snapshot.
double joint_blocking_probability(const std::vector<QueueEvent>& subset,
                                  const BoundarySnapshot& snapshot, double delta_s);

/// Inclusion-exclusion estimate of P(no event in `events` holds), clamped to
/// [0, min of the marginal complements]. Empty event set yields 1.
double all_clear_probability(const std::vector<QueueEvent>& events,
                             const BoundarySnapshot& snapshot, double delta_s,
                             const JointFn& joint = {});

/// P(DQ_i > 0, UQ_n < capacity_n for all n in N) for upstream link i.
/// Throws if |N| > 10 (2^(|N|+1) subset terms).
double flow_transmission_probability(int upstream_link, const NodeSpec& node,
                                     const BoundarySnapshot& snapshot, double delta_s,
                                     const JointFn& joint = {});

/// Expected flow rate q_{i->j} = p_ij * mu_i * transmission probability.
double node_flow(int upstream_link, int downstream_link, const NodeSpec& node,
                 const BoundarySnapshot& snapshot, double mu_i, double delta_s,
                 const JointFn& joint = {});

/// Effective service rate mu_hat_i in [mu_i(1 - sum p_ij), mu_i].
double effective_service_rate(int upstream_link, const NodeSpec& node,
                              const BoundarySnapshot& snapshot, double mu_i, double delta_s,
                              const JointFn& joint = {});

/// Arrival rate lambda_j = gamma_j + sum_i p_ij mu_i P(transmission | UQ_j open).
/// `mu` is indexed by link id.
double arrival_rate(int downstream_link, const NodeSpec& node, const BoundarySnapshot& snapshot,
                    double gamma_j, const std::vector<double>& mu, double delta_s,
                    const JointFn& joint = {});

struct NodeRates {
  std::vector<double> outflow;  // q_i^out per upstream link, in M order
  std::vector<double> inflow;   // q_j^in per downstream link, in N order
};

/// Expected in/out flow rates across the node. `mu` and `gamma` indexed by link id.
NodeRates expected_node_in_out_rates(const NodeSpec& node, const BoundarySnapshot& snapshot,
                                     const std::vector<double>& mu, const std::vector<double>& gamma,
                                     double delta_s, const JointFn& joint = {});

}  // namespace sltm
