#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "sltm/csv.hpp"
#include "sltm/optimizer.hpp"
#include "sltm/scenario.hpp"
#include "sltm/simulator.hpp"

namespace fs = std::filesystem;
using namespace sltm;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int replications = 1000;
  double horizon_s = -1.0;
  double stride_s = -1.0;
  double weight = -1.0;
  std::string model = "analytic";
  int budget = 60;
};

Scenario resolve_scenario(const CommonOpts& opts) {
  Scenario scenario;
  if (fs::exists(opts.config)) {
    scenario = load_scenario_file(opts.config);
  } else {
    scenario = bundled_scenario(opts.config);  // throws on unknown names
  }
  if (opts.horizon_s > 0.0) scenario.network.horizon_s = opts.horizon_s;
  if (opts.stride_s > 0.0) scenario.network.output_stride_s = opts.stride_s;
  if (opts.weight >= 0.0)
    for (LinkParams& p : scenario.network.links) p.mixture_weight = opts.weight;

  auto issues = validate_config(scenario.network);
  if (!issues.empty()) {
    for (const auto& msg : issues) std::cerr << "config error: " << msg << "\n";
    std::exit(kExitUsage);
  }
  return scenario;
}

std::ofstream open_output(const CommonOpts& opts, const std::string& filename) {
  fs::create_directories(opts.out_dir);
  fs::path path = fs::path(opts.out_dir) / filename;
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << "\n";
    std::exit(kExitRuntime);
  }
  std::cout << "writing " << path.string() << "\n";
  return out;
}

LoadingModel parse_model(const std::string& name) {
  if (name == "analytic") return LoadingModel::analytic;
  if (name == "baseline") return LoadingModel::deterministic;
  if (name == "mc") return LoadingModel::monte_carlo;
  std::cerr << "unknown model '" << name << "' (expected analytic|baseline|mc)\n";
  std::exit(kExitUsage);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic link-transmission network loading and signal optimization"};
  app.require_subcommand(1);

  CommonOpts opts;
  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    auto* c = cmd->add_option("--config", opts.config, "Scenario file path or bundled scenario name");
    if (needs_config) c->required();
    cmd->add_option("--out", opts.out_dir, "Output directory");
    cmd->add_option("--seed", opts.seed, "Random seed");
    cmd->add_option("--replications", opts.replications, "Monte-Carlo replications");
    cmd->add_option("--horizon-s", opts.horizon_s, "Override horizon [s]");
    cmd->add_option("--stride-s", opts.stride_s, "Override output stride [s]");
    cmd->add_option("--weight", opts.weight, "Override all per-link mixture weights");
    cmd->add_option("--model", opts.model, "Loading model: analytic|baseline|mc");
    cmd->add_option("--budget", opts.budget, "Optimizer evaluation budget");
  };

  auto* analytic = app.add_subcommand("analytic", "Run the analytical network loading");
  add_common(analytic);
  auto* simulate = app.add_subcommand("simulate", "Run Monte-Carlo event simulation");
  add_common(simulate);
  auto* baseline = app.add_subcommand("baseline", "Run the deterministic baseline");
  add_common(baseline);
  auto* compare = app.add_subcommand("compare", "Compare two trajectory CSVs");
  std::string file_a, file_b;
  compare->add_option("first", file_a, "First CSV (e.g. analytic)")->required();
  compare->add_option("second", file_b, "Second CSV (e.g. simulated)")->required();
  auto* optimize_cmd = app.add_subcommand("optimize", "Optimize fixed-time green splits");
  add_common(optimize_cmd);
  auto* scenarios = app.add_subcommand("scenarios", "Bundled scenario utilities");
  auto* scenarios_list = scenarios->add_subcommand("list", "List bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (analytic->parsed()) {
      Scenario scenario = resolve_scenario(opts);
      LoadingResult result = run_loading(scenario.network);
      auto out = open_output(opts, scenario.name + "_analytic.csv");
      write_trajectory_csv(out, scenario.network, result.records);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      return 0;
    }
    if (simulate->parsed()) {
      if (opts.replications < 1) {
        std::cerr << "--replications must be >= 1\n";
        return kExitUsage;
      }
      Scenario scenario = resolve_scenario(opts);
      MonteCarloResult result =
          monte_carlo(scenario.network, std::max(opts.replications, 2), opts.seed);
      auto out = open_output(opts, scenario.name + "_simulated.csv");
      write_monte_carlo_csv(out, scenario.network, result);
      return 0;
    }
    if (baseline->parsed()) {
      Scenario scenario = resolve_scenario(opts);
      BaselineResult result = run_deterministic_baseline(scenario.network);
      auto out = open_output(opts, scenario.name + "_baseline.csv");
      write_baseline_csv(out, scenario.network, result);
      return 0;
    }
    if (compare->parsed()) {
      std::ifstream ina(file_a), inb(file_b);
      if (!ina || !inb) {
        std::cerr << "cannot open input CSVs\n";
        return kExitUsage;
      }
      auto reports = compare_series(read_series_csv(ina), read_series_csv(inb));
      std::cout << "link_id,rmse_e_uq,rmse_e_dq,max_abs_e_uq,max_abs_e_dq\n";
      for (const auto& r : reports)
        std::cout << r.link << ',' << r.rmse_uq << ',' << r.rmse_dq << ',' << r.max_abs_uq << ','
                  << r.max_abs_dq << "\n";
      return 0;
    }
    if (optimize_cmd->parsed()) {
      Scenario scenario = resolve_scenario(opts);
      if (!scenario.signals) {
        std::cerr << "scenario has no signal layout to optimize\n";
        return kExitUsage;
      }
      std::mt19937_64 rng(opts.seed);
      SignalPlan initial = sample_feasible_plan(*scenario.signals, rng);
      ObjectiveOptions oopts;
      oopts.mc_replications = opts.replications;
      oopts.mc_seed = opts.seed;
      OptimizeResult result =
          optimize(initial, parse_model(opts.model), scenario, opts.budget, oopts);
      auto out = open_output(opts, scenario.name + "_optimize_trace.csv");
      out << "eval_index,objective";
      for (size_t p = 0; p < result.best.x.size(); ++p) out << ",x" << p;
      out << "\n";
      out.precision(10);
      for (const auto& e : result.trace) {
        out << e.index << ',' << e.objective;
        for (double x : e.plan.x) out << ',' << x;
        out << "\n";
      }
      std::cout << "initial objective: " << result.initial_objective << "\n"
                << "best objective:    " << result.best_objective << "\n"
                << "evaluations used:  " << result.evaluations << "\n"
                << "best plan:";
      for (double x : result.best.x) std::cout << ' ' << x;
      std::cout << "\n";
      return 0;
    }
    if (scenarios_list->parsed() || scenarios->parsed()) {
      for (const auto& name : bundled_scenario_names()) std::cout << name << "\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
