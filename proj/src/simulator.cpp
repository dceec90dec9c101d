#include "sltm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <queue>
#include <random>
#include <stdexcept>
#include <thread>

namespace sltm {

namespace {

enum class EventKind : int {
  // pop priority at equal times follows this order
  backward_lag = 0,
  forward_lag = 1,
  service = 2,
  arrival = 3,
};

struct Event {
  double time;
  EventKind kind;
  int link;
  long token;  // service generation guard / insertion id
  long seq;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
    return a.seq > b.seq;
  }
};

struct SimLink {
  int uq = 0;          // occupied spaces
  int dq = 0;          // vehicles ready for departure
  long on_link = 0;    // vehicles that entered and have not departed
  bool service_active = false;
  bool blocked = false;
  int head_dest = -1;  // sampled at service start, retained while blocked
  long service_token = 0;
  std::deque<long> fifo_ids;  // entry order of vehicles currently on the link
  long last_departed_id = -1;

  double fwd_lag_s = 0.0;
  double bwd_lag_s = 0.0;
  int capacity = 0;
  double mu = 0.0;
  double gamma_max = 0.0;
  int node = -1;  // node where this link is upstream, -1 if none
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t base_seed, int replication) {
  // splitmix64 over the pair keeps replication streams decorrelated
  std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(replication + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

SimTrajectory simulate_replication(const NetworkConfig& config, std::uint64_t seed) {
  const int links = config.link_count();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto exp_sample = [&](double rate) {
    // inverse transform keeps the draw count per event fixed
    double u = unit(rng);
    return -std::log1p(-u) / rate;
  };

  std::vector<SimLink> sim(static_cast<size_t>(links));
  for (int i = 0; i < links; ++i) {
    const LinkParams& p = config.links[static_cast<size_t>(i)];
    LinkGeometry g = compute_geometry(p, config.delta_s);
    SimLink& s = sim[static_cast<size_t>(i)];
    s.capacity = g.space_capacity;
    s.fwd_lag_s = p.length_km / p.free_flow_speed_kms;  // exact, not rounded
    s.bwd_lag_s = p.length_km / std::abs(p.backward_wave_speed_kms);
    s.mu = p.service_rate_veh_s;
    for (const DemandSegment& seg : config.demand[static_cast<size_t>(i)])
      s.gamma_max = std::max(s.gamma_max, seg.rate_veh_s);
  }
  for (size_t n = 0; n < config.nodes.size(); ++n)
    for (int i : config.nodes[n].upstream) sim[static_cast<size_t>(i)].node = static_cast<int>(n);

  std::priority_queue<Event, std::vector<Event>, EventLater> queue;
  long seq = 0;
  auto push = [&](double time, EventKind kind, int link, long token) {
    queue.push(Event{time, kind, link, token, seq++});
  };

  std::vector<std::vector<int>> blocked_waiters(static_cast<size_t>(links));

  SimTrajectory out;
  out.uq.assign(static_cast<size_t>(links), {});
  out.dq.assign(static_cast<size_t>(links), {});
  const int stride_count = static_cast<int>(std::llround(config.horizon_s / config.output_stride_s));
  for (int t = 0; t <= stride_count; ++t) out.times_s.push_back(t * config.output_stride_s);

  long next_vehicle_id = 0;

  // thinning candidates for the inhomogeneous external arrivals
  for (int i = 0; i < links; ++i)
    if (sim[static_cast<size_t>(i)].gamma_max > 0.0)
      push(exp_sample(sim[static_cast<size_t>(i)].gamma_max), EventKind::arrival, i, 0);

  // forward declarations as lambdas
  std::function<void(int, double)> start_service;
  std::function<void(int, double)> depart;

  auto enter_link = [&](int j, double t) {
    SimLink& s = sim[static_cast<size_t>(j)];
    s.uq++;
    s.on_link++;
    s.fifo_ids.push_back(next_vehicle_id++);
    push(t + s.fwd_lag_s, EventKind::forward_lag, j, 0);
  };

  start_service = [&](int i, double t) {
    SimLink& s = sim[static_cast<size_t>(i)];
    if (s.service_active || s.blocked || s.dq == 0) return;
    // sample the destination now; it is retained while blocked
    int dest = -1;  // exit
    if (s.node >= 0) {
      const NodeSpec& node = config.nodes[static_cast<size_t>(s.node)];
      int m_pos = node.upstream_pos(i);
      double u = unit(rng);
      double acc = 0.0;
      for (size_t n = 0; n < node.downstream.size(); ++n) {
        acc += node.turning_prob(m_pos, static_cast<int>(n));
        if (u < acc) {
          dest = node.downstream[n];
          break;
        }
      }
    }
    s.head_dest = dest;
    s.service_active = true;
    s.service_token++;
    push(t + exp_sample(s.mu), EventKind::service, i, s.service_token);
  };

  depart = [&](int i, double t) {
    SimLink& s = sim[static_cast<size_t>(i)];
    s.dq--;
    s.on_link--;
    long id = s.fifo_ids.front();
    s.fifo_ids.pop_front();
    if (id <= s.last_departed_id) out.fifo_ok = false;
    s.last_departed_id = id;
    s.service_active = false;
    push(t + s.bwd_lag_s, EventKind::backward_lag, i, 0);
    start_service(i, t);
  };

  const double horizon = config.horizon_s;
  size_t next_sample = 0;
  auto sample_until = [&](double t) {
    while (next_sample < out.times_s.size() && out.times_s[next_sample] <= t) {
      for (int i = 0; i < links; ++i) {
        out.uq[static_cast<size_t>(i)].push_back(sim[static_cast<size_t>(i)].uq);
        out.dq[static_cast<size_t>(i)].push_back(sim[static_cast<size_t>(i)].dq);
      }
      next_sample++;
    }
  };

  sample_until(0.0);
  while (!queue.empty()) {
    Event ev = queue.top();
    queue.pop();
    if (ev.time > horizon) break;
    sample_until(std::nextafter(ev.time, 0.0));  // states strictly before ev.time

    SimLink& s = sim[static_cast<size_t>(ev.link)];
    switch (ev.kind) {
      case EventKind::arrival: {
        double rate = config.demand_rate(ev.link, ev.time);
        if (unit(rng) * s.gamma_max < rate) {
          if (s.uq < s.capacity) {
            enter_link(ev.link, ev.time);
            out.vehicles_entered++;
          } else {
            out.vehicles_lost++;  // blocked external arrivals are discarded
          }
        }
        push(ev.time + exp_sample(s.gamma_max), EventKind::arrival, ev.link, 0);
        break;
      }
      case EventKind::forward_lag: {
        s.dq++;
        start_service(ev.link, ev.time);
        break;
      }
      case EventKind::service: {
        if (!s.service_active || ev.token != s.service_token) break;  // stale timer
        int dest = s.head_dest;
        if (dest < 0) {
          depart(ev.link, ev.time);
          out.vehicles_exited++;
        } else if (sim[static_cast<size_t>(dest)].uq < sim[static_cast<size_t>(dest)].capacity) {
          depart(ev.link, ev.time);
          enter_link(dest, ev.time);
        } else {
          s.service_active = false;
          s.blocked = true;
          blocked_waiters[static_cast<size_t>(dest)].push_back(ev.link);
        }
        break;
      }
      case EventKind::backward_lag: {
        s.uq--;
        if (s.uq < 0) throw std::runtime_error("simulate_replication: negative UQ (event bug)");
        auto& waiters = blocked_waiters[static_cast<size_t>(ev.link)];
        for (int b : waiters) {
          SimLink& w = sim[static_cast<size_t>(b)];
          if (!w.blocked) continue;
          // re-sample the remaining service by memorylessness
          w.blocked = false;
          w.service_active = true;
          w.service_token++;
          push(ev.time + exp_sample(w.mu), EventKind::service, b, w.service_token);
        }
        waiters.clear();
        break;
      }
    }
    if (s.dq > s.uq) throw std::runtime_error("simulate_replication: DQ exceeds UQ (event bug)");
  }
  sample_until(horizon);

  for (int i = 0; i < links; ++i) out.on_network_at_end += sim[static_cast<size_t>(i)].on_link;
  return out;
}

MonteCarloResult monte_carlo(const NetworkConfig& config, int replications,
                             std::uint64_t base_seed, int threads) {
  if (replications < 2) throw std::invalid_argument("monte_carlo: need at least 2 replications");
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, replications);

  const int links = config.link_count();
  const int strides = static_cast<int>(std::llround(config.horizon_s / config.output_stride_s)) + 1;
  const size_t cells = static_cast<size_t>(links) * static_cast<size_t>(strides);

  struct Accum {
    std::vector<double> sum_uq, sq_uq, sum_dq, sq_dq;
    void init(size_t n) {
      sum_uq.assign(n, 0.0);
      sq_uq.assign(n, 0.0);
      sum_dq.assign(n, 0.0);
      sq_dq.assign(n, 0.0);
    }
  };
  std::vector<Accum> partial(static_cast<size_t>(threads));

  auto worker = [&](int tid) {
    Accum& acc = partial[static_cast<size_t>(tid)];
    acc.init(cells);
    for (int r = tid; r < replications; r += threads) {
      SimTrajectory traj = simulate_replication(config, derive_seed(base_seed, r));
      for (int i = 0; i < links; ++i) {
        for (int t = 0; t < strides; ++t) {
          size_t c = static_cast<size_t>(i) * static_cast<size_t>(strides) + static_cast<size_t>(t);
          double u = traj.uq[static_cast<size_t>(i)][static_cast<size_t>(t)];
          double d = traj.dq[static_cast<size_t>(i)][static_cast<size_t>(t)];
          acc.sum_uq[c] += u;
          acc.sq_uq[c] += u * u;
          acc.sum_dq[c] += d;
          acc.sq_dq[c] += d * d;
        }
      }
    }
  };

  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker, t);
  worker(0);
  for (auto& th : pool) th.join();

  MonteCarloResult result;
  result.replications = replications;
  for (int t = 0; t < strides; ++t) result.times_s.push_back(t * config.output_stride_s);
  result.mean_uq.assign(static_cast<size_t>(links), std::vector<double>(static_cast<size_t>(strides)));
  result.mean_dq = result.mean_uq;
  result.ci_uq = result.mean_uq;
  result.ci_dq = result.mean_uq;

  const double n = static_cast<double>(replications);
  for (int i = 0; i < links; ++i) {
    for (int t = 0; t < strides; ++t) {
      size_t c = static_cast<size_t>(i) * static_cast<size_t>(strides) + static_cast<size_t>(t);
      double su = 0.0, qu = 0.0, sd = 0.0, qd = 0.0;
      for (const Accum& acc : partial) {
        su += acc.sum_uq[c];
        qu += acc.sq_uq[c];
        sd += acc.sum_dq[c];
        qd += acc.sq_dq[c];
      }
      double mu = su / n, md = sd / n;
      double vu = std::max(0.0, (qu - n * mu * mu) / (n - 1.0));
      double vd = std::max(0.0, (qd - n * md * md) / (n - 1.0));
      result.mean_uq[static_cast<size_t>(i)][static_cast<size_t>(t)] = mu;
      result.mean_dq[static_cast<size_t>(i)][static_cast<size_t>(t)] = md;
      result.ci_uq[static_cast<size_t>(i)][static_cast<size_t>(t)] = 1.96 * std::sqrt(vu / n);
      result.ci_dq[static_cast<size_t>(i)][static_cast<size_t>(t)] = 1.96 * std::sqrt(vd / n);
    }
  }
  return result;
}

}  // namespace sltm
