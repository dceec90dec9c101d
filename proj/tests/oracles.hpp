// Independent reference implementations used only by the tests. Everything
// here is deliberately naive: dense linear algebra and brute-force sums, so a
// bug in the library cannot hide in a shared code path.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sltm/node.hpp"
#include "sltm/probability.hpp"

namespace oracles {

using Matrix = std::vector<std::vector<double>>;

inline Matrix identity(int n) {
  Matrix m(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) m[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1.0;
  return m;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  const size_t n = a.size();
  Matrix c(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k) {
      double aik = a[i][k];
      if (aik == 0.0) continue;
      for (size_t j = 0; j < n; ++j) c[i][j] += aik * b[k][j];
    }
  return c;
}

// exp(A) by scaling-and-squaring with a plain Taylor series
inline Matrix matrix_exponential(Matrix a) {
  const size_t n = a.size();
  double norm = 0.0;
  for (const auto& row : a) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    norm = std::max(norm, s);
  }
  int squarings = 0;
  while (norm > 0.5) {
    norm /= 2.0;
    squarings++;
  }
  double scale = std::ldexp(1.0, -squarings);
  for (auto& row : a)
    for (double& v : row) v *= scale;

  Matrix result = identity(static_cast<int>(n));
  Matrix term = identity(static_cast<int>(n));
  for (int k = 1; k <= 30; ++k) {
    term = multiply(term, a);
    for (auto& row : term)
      for (double& v : row) v /= static_cast<double>(k);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) result[i][j] += term[i][j];
  }
  for (int s = 0; s < squarings; ++s) result = multiply(result, result);
  return result;
}

// Transient distribution of the capacity-bounded birth-death chain via a
// dense matrix exponential of the generator.
inline std::vector<double> expm_birth_death(const std::vector<double>& start, double birth,
                                            double death, double dt) {
  const int n = static_cast<int>(start.size());
  Matrix q(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    double out = 0.0;
    if (i + 1 < n) {
      q[static_cast<size_t>(i)][static_cast<size_t>(i + 1)] = birth;
      out += birth;
    }
    if (i > 0) {
      q[static_cast<size_t>(i)][static_cast<size_t>(i - 1)] = death;
      out += death;
    }
    q[static_cast<size_t>(i)][static_cast<size_t>(i)] = -out;
  }
  for (auto& row : q)
    for (double& v : row) v *= dt;
  Matrix p = matrix_exponential(q);

  std::vector<double> result(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      result[static_cast<size_t>(j)] += start[static_cast<size_t>(i)] * p[static_cast<size_t>(i)][static_cast<size_t>(j)];
  return result;
}

// Stationary law of the finite-capacity single-server queue: truncated
// geometric with ratio lambda/mu.
inline std::vector<double> stationary_single_server(int capacity, double lambda, double mu) {
  std::vector<double> p(static_cast<size_t>(capacity) + 1);
  double r = lambda / mu;
  double total = 0.0;
  for (int n = 0; n <= capacity; ++n) {
    p[static_cast<size_t>(n)] = std::pow(r, n);
    total += p[static_cast<size_t>(n)];
  }
  for (double& v : p) v /= total;
  return p;
}

inline double mean_of(const std::vector<double>& probs) {
  double m = 0.0;
  for (size_t n = 1; n < probs.size(); ++n) m += static_cast<double>(n) * probs[n];
  return m;
}

// Full independent marginals for one upstream link and its downstream links,
// used to drive exact-joint tests of the inclusion-exclusion path.
struct IndependentQueues {
  std::vector<double> dq_upstream;               // P(DQ_i = n)
  std::vector<std::vector<double>> uq_downstream;  // per downstream link, P(UQ = n)
};

// Exact joint of independent marginals, pluggable as sltm::JointFn. The
// snapshot still carries the matching marginal blocking probabilities.
inline sltm::JointFn exact_product_joint(const IndependentQueues& queues, int upstream_link,
                                         const std::vector<int>& downstream_links) {
  return [&queues, upstream_link, downstream_links](const std::vector<sltm::QueueEvent>& events,
                                                    const sltm::BoundarySnapshot&, double) {
    double p = 1.0;
    for (const sltm::QueueEvent& e : events) {
      if (!e.uq_full) {
        p *= queues.dq_upstream.front();
        (void)upstream_link;
      } else {
        for (size_t n = 0; n < downstream_links.size(); ++n)
          if (downstream_links[n] == e.link) p *= queues.uq_downstream[n].back();
      }
    }
    return p;
  };
}

// Brute-force P(DQ_i > 0, UQ_n < capacity for all n) under independence.
inline double enumerate_transmission(const IndependentQueues& queues) {
  double p_dq_busy = 1.0 - queues.dq_upstream.front();
  double p = p_dq_busy;
  for (const auto& uq : queues.uq_downstream) p *= 1.0 - uq.back();
  return p;
}

// Exhaustive sum over the full product state space, kept separate from
// enumerate_transmission so the test compares two independent derivations.
inline double enumerate_transmission_full(const IndependentQueues& queues) {
  double total = 0.0;
  std::vector<size_t> idx(queues.uq_downstream.size(), 0);
  for (size_t dq = 0; dq < queues.dq_upstream.size(); ++dq) {
    if (dq == 0) continue;
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      double p = queues.dq_upstream[dq];
      bool all_open = true;
      for (size_t n = 0; n < idx.size(); ++n) {
        p *= queues.uq_downstream[n][idx[n]];
        if (idx[n] + 1 == queues.uq_downstream[n].size()) all_open = false;
      }
      if (all_open) total += p;
      size_t carry = 0;
      while (carry < idx.size()) {
        if (++idx[carry] < queues.uq_downstream[carry].size()) break;
        idx[carry] = 0;
        carry++;
      }
      if (carry == idx.size()) break;
    }
  }
  return total;
}

inline std::vector<double> random_distribution(std::mt19937_64& rng, int capacity) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> p(static_cast<size_t>(capacity) + 1);
  double total = 0.0;
  for (double& v : p) {
    v = unit(rng);
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

}  // namespace oracles
