#include "sltm/csv.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sltm {

namespace {

void write_header(std::ostream& out, bool with_ci) {
  out << "time_s,link_id,e_uq,e_dq,p_uq_full,p_dq_empty,q_in,q_out,lambda,mu_eff";
  if (with_ci) out << ",ci_half_width_uq,ci_half_width_dq";
  out << "\n";
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const NetworkConfig& config,
                          const std::vector<TrajectoryRecord>& records) {
  write_header(out, false);
  out.precision(10);
  for (const TrajectoryRecord& r : records) {
    out << r.time_s << ',' << config.link_names[static_cast<size_t>(r.link)] << ',' << r.e_uq << ','
        << r.e_dq << ',' << r.p_uq_full << ',' << r.p_dq_empty << ',' << r.q_in << ',' << r.q_out
        << ',' << r.lambda << ',' << r.mu_eff << "\n";
  }
}

void write_monte_carlo_csv(std::ostream& out, const NetworkConfig& config,
                           const MonteCarloResult& result) {
  write_header(out, true);
  out.precision(10);
  for (size_t t = 0; t < result.times_s.size(); ++t) {
    for (int i = 0; i < config.link_count(); ++i) {
      size_t li = static_cast<size_t>(i);
      // the simulator reports sampled means only; model-internal columns are 0
      out << result.times_s[t] << ',' << config.link_names[li] << ',' << result.mean_uq[li][t]
          << ',' << result.mean_dq[li][t] << ",0,0,0,0,0,0," << result.ci_uq[li][t] << ','
          << result.ci_dq[li][t] << "\n";
    }
  }
}

void write_baseline_csv(std::ostream& out, const NetworkConfig& config,
                        const BaselineResult& result) {
  out << "time_s,link_id,c_up,c_down,on_link\n";
  out.precision(10);
  for (size_t t = 0; t < result.times_s.size(); ++t) {
    for (int i = 0; i < config.link_count(); ++i) {
      size_t li = static_cast<size_t>(i);
      out << result.times_s[t] << ',' << config.link_names[li] << ',' << result.cum_up[li][t]
          << ',' << result.cum_down[li][t] << ',' << result.cum_up[li][t] - result.cum_down[li][t]
          << "\n";
    }
  }
}

ParsedSeries read_series_csv(std::istream& in) {
  ParsedSeries series;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_series_csv: empty file");
  // locate columns by name so both CSV flavors parse
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("read_series_csv: missing column " + name);
    return static_cast<size_t>(it - header.begin());
  };
  const size_t c_time = column("time_s"), c_link = column("link_id");
  const size_t c_uq = column("e_uq"), c_dq = column("e_dq");

  double last_time = -1.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < header.size()) throw std::runtime_error("read_series_csv: short row");
    double t = std::stod(cells[c_time]);
    if (t != last_time) {
      series.times_s.push_back(t);
      last_time = t;
    }
    series.e_uq[cells[c_link]].push_back(std::stod(cells[c_uq]));
    series.e_dq[cells[c_link]].push_back(std::stod(cells[c_dq]));
  }
  return series;
}

std::vector<LinkErrorReport> compare_series(const ParsedSeries& a, const ParsedSeries& b) {
  if (a.e_uq.size() != b.e_uq.size())
    throw std::runtime_error("compare_series: link sets differ in size");
  if (a.times_s.size() != b.times_s.size())
    throw std::runtime_error("compare_series: time grids differ in length");
  for (size_t t = 0; t < a.times_s.size(); ++t)
    if (std::abs(a.times_s[t] - b.times_s[t]) > 1e-9)
      throw std::runtime_error("compare_series: time grids differ");

  std::vector<LinkErrorReport> reports;
  for (const auto& [link, ua] : a.e_uq) {
    auto itu = b.e_uq.find(link);
    auto itd = b.e_dq.find(link);
    if (itu == b.e_uq.end() || itd == b.e_dq.end())
      throw std::runtime_error("compare_series: link " + link + " missing from second series");
    const auto& da = a.e_dq.at(link);
    LinkErrorReport rep;
    rep.link = link;
    double su = 0.0, sd = 0.0;
    for (size_t t = 0; t < ua.size(); ++t) {
      double eu = ua[t] - itu->second[t];
      double ed = da[t] - itd->second[t];
      su += eu * eu;
      sd += ed * ed;
      rep.max_abs_uq = std::max(rep.max_abs_uq, std::abs(eu));
      rep.max_abs_dq = std::max(rep.max_abs_dq, std::abs(ed));
    }
    rep.rmse_uq = std::sqrt(su / static_cast<double>(ua.size()));
    rep.rmse_dq = std::sqrt(sd / static_cast<double>(ua.size()));
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace sltm
