#include "sltm/probability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sltm {

QueueDistribution::QueueDistribution(int capacity) {
  if (capacity < 1) throw std::invalid_argument("QueueDistribution: capacity must be >= 1");
  probs_.assign(static_cast<size_t>(capacity) + 1, 0.0);
  probs_[0] = 1.0;
}

QueueDistribution QueueDistribution::point_mass(int capacity, int state) {
  QueueDistribution d(capacity);
  if (state < 0 || state > capacity)
    throw std::invalid_argument("QueueDistribution: state outside {0,...,capacity}");
  d.probs_[0] = 0.0;
  d.probs_[static_cast<size_t>(state)] = 1.0;
  return d;
}

QueueDistribution QueueDistribution::from_probs(std::vector<double> probs) {
  if (probs.size() < 2) throw std::invalid_argument("QueueDistribution: need at least 2 states");
  QueueDistribution d(static_cast<int>(probs.size()) - 1);
  d.probs_ = std::move(probs);
  d.renormalize();
  return d;
}

double QueueDistribution::mean() const {
  double m = 0.0;
  for (size_t n = 1; n < probs_.size(); ++n) m += static_cast<double>(n) * probs_[n];
  return m;
}

void QueueDistribution::renormalize(Diagnostics* diag) {
  double raw = 0.0;
  double total = 0.0;
  for (double& p : probs_) {
    raw += p;
    if (p < 0.0) p = 0.0;
    total += p;
  }
  if (std::abs(raw - 1.0) > 1e-6) {
    warn(diag, "distribution mass deviates from 1 by " + std::to_string(raw - 1.0));
  }
  if (total <= 0.0) throw std::runtime_error("QueueDistribution: zero total mass");
  for (double& p : probs_) p /= total;
}

bool QueueDistribution::is_valid(double tol) const {
  double total = 0.0;
  for (double p : probs_) {
    if (p < 0.0 || p > 1.0 + tol || !std::isfinite(p)) return false;
    total += p;
  }
  return std::abs(total - 1.0) <= tol;
}

double poisson_pmf(double mean, long n) {
  if (mean < 0.0 || !std::isfinite(mean)) throw std::invalid_argument("poisson_pmf: mean must be >= 0");
  if (n < 0) throw std::invalid_argument("poisson_pmf: n must be >= 0");
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  if (n <= 20) {
    double p = std::exp(-mean);
    for (long i = 1; i <= n; ++i) p *= mean / static_cast<double>(i);
    return p;
  }
  double nd = static_cast<double>(n);
  return std::exp(nd * std::log(mean) - mean - std::lgamma(nd + 1.0));
}

double conditional_multinomial(long total, const std::vector<long>& counts,
                               const std::vector<double>& rates) {
  if (total < 0) throw std::invalid_argument("conditional_multinomial: total must be >= 0");
  if (counts.size() != rates.size())
    throw std::invalid_argument("conditional_multinomial: counts/rates size mismatch");
  long sum = 0;
  for (long c : counts) {
    if (c < 0) throw std::invalid_argument("conditional_multinomial: negative count");
    sum += c;
  }
  if (sum != total) throw std::invalid_argument("conditional_multinomial: counts do not sum to total");
  if (total == 0) return 1.0;

  double rate_sum = 0.0;
  for (double r : rates) {
    if (r < 0.0 || !std::isfinite(r)) throw std::invalid_argument("conditional_multinomial: bad rate");
    rate_sum += r;
  }
  if (rate_sum <= 0.0) return 0.0;

  double log_p = std::lgamma(static_cast<double>(total) + 1.0);
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (rates[i] <= 0.0) return 0.0;  // zero cell probability with positive count
    double c = static_cast<double>(counts[i]);
    log_p += c * std::log(rates[i] / rate_sum) - std::lgamma(c + 1.0);
  }
  return std::exp(log_p);
}

QueueDistribution propagate_birth_death(const QueueDistribution& dist, double birth,
                                        double death, double dt, Diagnostics* diag) {
  if (!(dt > 0.0)) throw std::invalid_argument("propagate_birth_death: dt must be > 0");
  if (birth < 0.0 || death < 0.0 || !std::isfinite(birth) || !std::isfinite(death))
    throw std::invalid_argument("propagate_birth_death: rates must be finite and >= 0");

  const double uni_rate = birth + death;
  if (uni_rate * dt == 0.0) return dist;

  const size_t states = dist.probs().size();
  const double a = uni_rate * dt;  // Poisson parameter of the uniformized jump count
  const double p_up = birth / uni_rate;
  const double p_down = death / uni_rate;

  std::vector<double> v = dist.probs();
  std::vector<double> next(states, 0.0);
  std::vector<double> out(states, 0.0);

  // log-space Poisson weights keep large a from underflowing prematurely
  double accumulated = 0.0;
  const double log_a = std::log(a);
  for (long k = 0;; ++k) {
    double log_w = static_cast<double>(k) * log_a - a - std::lgamma(static_cast<double>(k) + 1.0);
    double weight = std::exp(log_w);
    if (k > 0) {
      // v <- v * P, one uniformized DTMC transition
      for (size_t n = 0; n < states; ++n) {
        double stay = 1.0;
        if (n + 1 < states) stay -= p_up;
        if (n > 0) stay -= p_down;
        double x = v[n] * stay;
        if (n > 0) x += v[n - 1] * p_up;
        if (n + 1 < states) x += v[n + 1] * p_down;
        next[n] = x;
      }
      v.swap(next);
    }
    if (weight > 0.0) {
      for (size_t n = 0; n < states; ++n) out[n] += weight * v[n];
      accumulated += weight;
    }
    if (accumulated >= 1.0 - 1e-10) break;
    if (k > static_cast<long>(a) + 200 + static_cast<long>(40.0 * std::sqrt(a + 1.0))) {
      warn(diag, "uniformization truncation limit reached before tolerance");
      break;
    }
  }

  QueueDistribution result = dist;
  result.mutable_probs() = std::move(out);
  result.renormalize(diag);
  return result;
}

}  // namespace sltm
