#pragma once

#include <vector>

#include "sltm/diagnostics.hpp"

namespace sltm {

/// Probability vector over the occupancy states {0, ..., capacity} of a
/// boundary queue. Entries are kept nonnegative and summing to 1; every
/// propagation step renormalizes.
class QueueDistribution {
 public:
  /// Point mass at 0 (empty queue) with the given space capacity.
  explicit QueueDistribution(int capacity);

  static QueueDistribution point_mass(int capacity, int state);
  static QueueDistribution from_probs(std::vector<double> probs);

  int capacity() const { return static_cast<int>(probs_.size()) - 1; }
  double operator[](int n) const { return probs_[static_cast<size_t>(n)]; }
  const std::vector<double>& probs() const { return probs_; }

  double prob_empty() const { return probs_.front(); }
  double prob_full() const { return probs_.back(); }
  double mean() const;

  /// Clamps negatives at 0 and rescales to total mass 1. Raises a
  /// numerical-health warning if the pre-normalization total deviates from 1
  /// by more than 1e-6.
  void renormalize(Diagnostics* diag = nullptr);

  bool is_valid(double tol = 1e-9) const;

  std::vector<double>& mutable_probs() { return probs_; }

 private:
  std::vector<double> probs_;
};

/// Poisson pmf e^{-mean} mean^n / n!, evaluated in log space for large n so
/// extreme tails underflow gracefully to 0 instead of NaN.
double poisson_pmf(double mean, long n);

/// Multinomial pmf of `counts` with `total` trials and cell probabilities
/// rates_i / sum(rates), in log space. total == 0 with all-zero counts is 1.
double conditional_multinomial(long total, const std::vector<long>& counts,
                               const std::vector<double>& rates);

/// Exact transient distribution at time dt of the continuous-time birth-death
/// chain on {0,...,capacity} with constant birth rate (blocked at capacity)
/// and constant death rate (blocked at 0), starting from dist. Uniformization
/// with truncation once the accumulated Poisson weight reaches 1 - 1e-10.
QueueDistribution propagate_birth_death(const QueueDistribution& dist,
                                        double birth, double death, double dt,
                                        Diagnostics* diag = nullptr);

}  // namespace sltm
