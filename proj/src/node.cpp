#include "sltm/node.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace sltm {

namespace {
constexpr double kGuard = 1e-12;
}

double NodeSpec::turn_sum(int m_pos) const {
  double s = 0.0;
  for (double p : turning[static_cast<size_t>(m_pos)]) s += p;
  return s;
}

int NodeSpec::upstream_pos(int link) const {
  for (size_t i = 0; i < upstream.size(); ++i)
    if (upstream[i] == link) return static_cast<int>(i);
  return -1;
}

int NodeSpec::downstream_pos(int link) const {
  for (size_t i = 0; i < downstream.size(); ++i)
    if (downstream[i] == link) return static_cast<int>(i);
  return -1;
}

namespace {

double marginal_probability(const QueueEvent& e, const BoundarySnapshot& snapshot) {
  const LinkBoundary& b = snapshot.at(e.link);
  return e.uq_full ? b.p_uq_full : b.p_dq_empty;
}

}  // namespace

double joint_blocking_probability(const std::vector<QueueEvent>& subset,
                                  const BoundarySnapshot& snapshot, double delta_s) {
  if (subset.empty()) throw std::invalid_argument("joint_blocking_probability: empty subset");
  if (subset.size() == 1) return marginal_probability(subset[0], snapshot);

  long total = 0;
  double rate_sum = 0.0;
  double log_terms = 0.0;  // sum of target*log(rate) - lgamma(target+1)
  for (const QueueEvent& e : subset) {
    const LinkBoundary& b = snapshot.at(e.link);
    long target = e.uq_full ? b.capacity : 0;
    double rate = e.uq_full ? b.q_uq_rate : b.q_dq_rate;
    rate_sum += rate;
    total += target;
    if (target > 0) {
      if (rate <= 0.0) return 0.0;  // no mass can reach a positive target
      double t = static_cast<double>(target);
      log_terms += t * std::log(rate) - std::lgamma(t + 1.0);
    }
  }
  if (rate_sum <= 0.0) return total == 0 ? 1.0 : 0.0;
  // poisson_pmf(delta*rate_sum, total) * multinomial collapses to this form
  double log_p = static_cast<double>(total) * std::log(delta_s) - delta_s * rate_sum + log_terms;
  return std::min(std::exp(log_p), 1.0);
}

double all_clear_probability(const std::vector<QueueEvent>& events,
                             const BoundarySnapshot& snapshot, double delta_s,
                             const JointFn& joint) {
  const size_t m = events.size();
  if (m == 0) return 1.0;
  if (m > 11) throw std::runtime_error("all_clear_probability: too many events, split the node");

  const JointFn& j = joint ? joint
                           : JointFn([](const std::vector<QueueEvent>& s, const BoundarySnapshot& sn,
                                        double d) { return joint_blocking_probability(s, sn, d); });

  // P(no event) = sum over subsets S of (-1)^|S| P(all of S), Gray-code order
  double sum = 1.0;  // empty subset
  std::vector<QueueEvent> members;
  for (unsigned long code = 1; code < (1ul << m); ++code) {
    unsigned long bits = code ^ (code >> 1);
    members.clear();
    for (size_t b = 0; b < m; ++b)
      if (bits & (1ul << b)) members.push_back(events[b]);
    double sign = (members.size() % 2 == 0) ? 1.0 : -1.0;
    sum += sign * j(members, snapshot, delta_s);
  }

  double upper = 1.0;
  for (const QueueEvent& e : events)
    upper = std::min(upper, 1.0 - marginal_probability(e, snapshot));
  return std::clamp(sum, 0.0, upper);
}

namespace {

std::vector<QueueEvent> transmission_events(int upstream_link, const NodeSpec& node) {
  std::vector<QueueEvent> events;
  events.push_back({upstream_link, false});
  for (int n : node.downstream) events.push_back({n, true});
  return events;
}

}  // namespace

double flow_transmission_probability(int upstream_link, const NodeSpec& node,
                                     const BoundarySnapshot& snapshot, double delta_s,
                                     const JointFn& joint) {
  if (node.downstream.size() > 10)
    throw std::runtime_error("flow_transmission_probability: more than 10 downstream links, split the node");
  return all_clear_probability(transmission_events(upstream_link, node), snapshot, delta_s, joint);
}

double node_flow(int upstream_link, int downstream_link, const NodeSpec& node,
                 const BoundarySnapshot& snapshot, double mu_i, double delta_s,
                 const JointFn& joint) {
  int m_pos = node.upstream_pos(upstream_link);
  int n_pos = node.downstream_pos(downstream_link);
  if (m_pos < 0 || n_pos < 0) throw std::invalid_argument("node_flow: link not attached to node");
  double p = node.turning_prob(m_pos, n_pos);
  if (p == 0.0) return 0.0;
  return p * mu_i * flow_transmission_probability(upstream_link, node, snapshot, delta_s, joint);
}

double effective_service_rate(int upstream_link, const NodeSpec& node,
                              const BoundarySnapshot& snapshot, double mu_i, double delta_s,
                              const JointFn& joint) {
  int m_pos = node.upstream_pos(upstream_link);
  if (m_pos < 0) throw std::invalid_argument("effective_service_rate: link not upstream of node");
  double p_sum = node.turn_sum(m_pos);
  if (p_sum == 0.0) return mu_i;

  double p_dq_busy = 1.0 - snapshot.at(upstream_link).p_dq_empty;
  double conditional;
  if (p_dq_busy < kGuard) {
    // unconditional P(UQ_n < capacity for all n), DQ term dropped
    std::vector<QueueEvent> events;
    for (int n : node.downstream) events.push_back({n, true});
    conditional = all_clear_probability(events, snapshot, delta_s, joint);
  } else {
    conditional =
        flow_transmission_probability(upstream_link, node, snapshot, delta_s, joint) / p_dq_busy;
  }
  conditional = std::clamp(conditional, 0.0, 1.0);
  return mu_i * ((1.0 - p_sum) + p_sum * conditional);
}

double arrival_rate(int downstream_link, const NodeSpec& node, const BoundarySnapshot& snapshot,
                    double gamma_j, const std::vector<double>& mu, double delta_s,
                    const JointFn& joint) {
  int n_pos = node.downstream_pos(downstream_link);
  if (n_pos < 0) throw std::invalid_argument("arrival_rate: link not downstream of node");
  double p_uq_open = 1.0 - snapshot.at(downstream_link).p_uq_full;
  double lambda = gamma_j;
  if (p_uq_open < kGuard) return lambda;
  for (size_t m = 0; m < node.upstream.size(); ++m) {
    double p = node.turning_prob(static_cast<int>(m), n_pos);
    if (p == 0.0) continue;
    // joint over all n already contains {UQ_j open}, so divide by its marginal
    double trans = flow_transmission_probability(node.upstream[m], node, snapshot, delta_s, joint);
    lambda += p * mu[static_cast<size_t>(node.upstream[m])] * std::min(trans / p_uq_open, 1.0);
  }
  return lambda;
}

NodeRates expected_node_in_out_rates(const NodeSpec& node, const BoundarySnapshot& snapshot,
                                     const std::vector<double>& mu, const std::vector<double>& gamma,
                                     double delta_s, const JointFn& joint) {
  NodeRates rates;
  rates.outflow.assign(node.upstream.size(), 0.0);
  rates.inflow.assign(node.downstream.size(), 0.0);

  std::vector<double> transmission(node.upstream.size());
  for (size_t m = 0; m < node.upstream.size(); ++m)
    transmission[m] = flow_transmission_probability(node.upstream[m], node, snapshot, delta_s, joint);

  for (size_t m = 0; m < node.upstream.size(); ++m) {
    int i = node.upstream[m];
    double mu_i = mu[static_cast<size_t>(i)];
    double p_sum = node.turn_sum(static_cast<int>(m));
    double p_dq_busy = 1.0 - snapshot.at(i).p_dq_empty;
    double out = mu_i * (1.0 - p_sum) * p_dq_busy;
    for (size_t n = 0; n < node.downstream.size(); ++n) {
      double q_ij = node.turning_prob(static_cast<int>(m), static_cast<int>(n)) * mu_i * transmission[m];
      out += q_ij;
      rates.inflow[n] += q_ij;
    }
    rates.outflow[m] = out;
  }
  for (size_t n = 0; n < node.downstream.size(); ++n) {
    int j = node.downstream[n];
    rates.inflow[n] += gamma[static_cast<size_t>(j)] * (1.0 - snapshot.at(j).p_uq_full);
  }
  return rates;
}

}  // namespace sltm
