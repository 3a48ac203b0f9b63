#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wmr/experiment.hpp"

namespace {

struct SweepFlags {
  std::vector<int> n;
  std::vector<double> s;
  double theta = 0.0;
  double p_start = 0.0, p_stop = 0.0, p_step = 0.0;
  int m = 0;
  std::string out;
  std::string config;
  bool quick = false;

  CLI::Option* o_n = nullptr;
  CLI::Option* o_s = nullptr;
  CLI::Option* o_theta = nullptr;
  CLI::Option* o_p_start = nullptr;
  CLI::Option* o_p_stop = nullptr;
  CLI::Option* o_p_step = nullptr;
  CLI::Option* o_m = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_quick = nullptr;

  void attach(CLI::App* app) {
    o_n = app->add_option("--n", n, "qubit counts (comma separated)")->delimiter(',');
    o_s = app->add_option("--s", s, "weak measurement strengths (comma separated)")->delimiter(',');
    o_theta = app->add_option("--theta", theta, "gGHZ angle in radians");
    o_p_start = app->add_option("--p-start", p_start, "first damping value (bracket start for critical runs)");
    o_p_stop = app->add_option("--p-stop", p_stop, "last damping value (bracket end for critical runs)");
    o_p_step = app->add_option("--p-step", p_step, "damping grid step");
    o_m = app->add_option("--m", m, "bipartition size (default n/2)");
    o_out = app->add_option("--out", out, "CSV output path (default: standard output)");
    app->add_option("--config", config, "JSON configuration file; flags override its values");
    o_quick = app->add_flag("--quick", quick, "smaller oracle grids");
  }

  // Configuration file first, then explicit flags on top.
  wmr::ExperimentConfig build(std::optional<wmr::Experiment> experiment) const {
    std::optional<nlohmann::json> file;
    if (!config.empty()) file = wmr::read_config_file(config);
    if (!experiment) {
      if (!file || !file->contains("experiment")) throw wmr::UsageError("no experiment given on the command line or in the configuration file");
      experiment = wmr::parse_experiment((*file)["experiment"].get<std::string>());
    }
    wmr::ExperimentConfig cfg = wmr::default_config(*experiment);
    if (file) wmr::apply_config_json(cfg, *file);
    if (*o_n) {
      cfg.n_list = n;
      cfg.mark_explicit("n_list");
    }
    if (*o_s) {
      cfg.s_list = s;
      cfg.mark_explicit("s_list");
    }
    if (*o_theta) {
      cfg.theta = theta;
      cfg.mark_explicit("theta");
    }
    if (*o_p_start) cfg.p_grid.start = p_start;
    if (*o_p_stop) cfg.p_grid.stop = p_stop;
    if (*o_p_step) cfg.p_grid.step = p_step;
    if (*o_p_start || *o_p_stop || *o_p_step) cfg.mark_explicit("p_grid");
    if (*o_m) {
      cfg.m = m;
      cfg.mark_explicit("m");
    }
    if (*o_out) cfg.output_path = out;
    if (*o_quick) cfg.quick = quick;
    return cfg;
  }
};

void report(const wmr::ExperimentSummary& sum, const wmr::ExperimentConfig& cfg) {
  std::cerr << wmr::to_string(cfg.experiment) << ": " << sum.rows << " rows";
  if (sum.flagged) std::cerr << ", " << sum.flagged << " flagged (evaluation failed)";
  if (sum.no_crossing) std::cerr << ", " << sum.no_crossing << " without a threshold crossing";
  if (!cfg.output_path.empty()) std::cerr << " -> " << cfg.output_path;
  std::cerr << '\n';
}

int run_verify(bool quick, const std::string& out) {
  const auto checks = wmr::run_oracle_suite(quick);
  bool ok = true;
  std::printf("%-22s %3s %8s %12s %10s  %s\n", "check", "n", "points", "max_dev", "tol", "status");
  for (const auto& c : checks) {
    std::printf("%-22s %3d %8zu %12.3e %10.1e  %s\n", c.name.c_str(), c.n, c.points, c.max_deviation, c.tolerance,
                c.passed() ? "PASS" : ("FAIL at " + c.worst_point).c_str());
    ok = ok && c.passed();
  }
  if (!out.empty()) {
    wmr::ExperimentConfig cfg = wmr::default_config(wmr::Experiment::oracle_suite);
    cfg.quick = quick;
    cfg.output_path = out;
    wmr::run_experiment_to_output(cfg);
  }
  std::printf("%s\n", ok ? "all oracle checks passed" : "oracle checks FAILED");
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak measurement reversal for damped gGHZ states: sweeps, critical values and oracle checks"};
  app.require_subcommand(1);

  SweepFlags run_flags;
  std::string run_name;
  auto* run = app.add_subcommand("run", "evaluate an experiment grid and write CSV");
  run->add_option("experiment", run_name, "ln_vs_p | mw_vs_p | critical_ln | critical_mw | transmissivity_vs_s | tel_fidelity_vs_p | "
                                          "is_fidelity_vs_p | oracle_suite");
  run_flags.attach(run);

  bool verify_quick = false;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify", "run every cross-engine oracle check; exit 0 iff all pass");
  verify->add_flag("--quick", verify_quick, "smaller grids");
  verify->add_option("--out", verify_out, "also write the results as CSV");

  SweepFlags crit_flags;
  std::string crit_measure;
  auto* critical = app.add_subcommand("critical", "critical damping values against n (ln or mw)");
  critical->add_option("measure", crit_measure, "ln | mw")->required()->check(CLI::IsMember({"ln", "mw"}));
  crit_flags.attach(critical);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return run_verify(verify_quick, verify_out);

    wmr::ExperimentConfig cfg;
    if (*run) {
      std::optional<wmr::Experiment> e;
      if (!run_name.empty()) e = wmr::parse_experiment(run_name);
      cfg = run_flags.build(e);
    } else {
      cfg = crit_flags.build(crit_measure == "ln" ? wmr::Experiment::critical_ln : wmr::Experiment::critical_mw);
    }
    const auto sum = wmr::run_experiment_to_output(cfg);
    report(sum, cfg);
    if (cfg.experiment == wmr::Experiment::oracle_suite && !sum.oracle_passed) return 1;
    return 0;
  } catch (const wmr::UsageError& ex) {
    std::cerr << "usage error: " << ex.what() << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}
