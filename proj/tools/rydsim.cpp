// rydsim — dissipative preparation of the two-atom Rydberg singlet state.
//
// Subcommands:
//   run     integrate one scenario and write the trajectory CSV
//   sweep   evaluate an observable over a parameter grid
//   noise   Monte Carlo ensemble of stochastic-noise trajectories
//   presets list the built-in figure presets

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ryd/scenario.hpp"

namespace {

ryd::Scenario load(const std::string& preset, const std::string& config) {
  if (!preset.empty() && !config.empty())
    throw ryd::ConfigError("--preset and --config are mutually exclusive");
  if (!preset.empty()) return ryd::load_preset(preset);
  if (!config.empty()) return ryd::load_scenario_file(config);
  throw ryd::ConfigError("one of --preset or --config is required");
}

void report_units(const ryd::Scenario& s, double t_dimensionless) {
  if (!s.omega_r_mhz) return;
  const auto phys = ryd::to_physical_units(
      t_dimensionless, s.params, ryd::omega_r_from_mhz(*s.omega_r_mhz));
  std::fprintf(stderr,
               "physical units: t = %.6g ms at Omega_r/2pi = %g MHz "
               "(implied gamma/Omega_r = %.6g)\n",
               phys.t_ms, *s.omega_r_mhz, phys.implied_gamma_ratio);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-atom Rydberg singlet preparation simulator"};
  app.require_subcommand(1);

  std::string preset, config, out;
  double dt_override = 0, t_end_override = 0;
  int jobs = ryd::default_jobs();
  long trajectories = 0;
  long seed = -1;

  auto* run = app.add_subcommand("run", "integrate a single scenario");
  run->add_option("--preset", preset, "built-in scenario name");
  run->add_option("--config", config, "scenario config file");
  run->add_option("--out", out, "output CSV path");
  run->add_option("--dt", dt_override, "override the integration step");
  run->add_option("--t-end", t_end_override, "override t_end (dimensionless)");

  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep grid");
  sweep->add_option("--preset", preset, "built-in sweep preset name");
  sweep->add_option("--config", config, "sweep config file");
  sweep->add_option("--out", out, "output CSV path")->required();
  sweep->add_option("--jobs", jobs, "worker threads (default: hardware)");

  auto* noise = app.add_subcommand("noise", "Monte Carlo noise ensemble");
  noise->add_option("--preset", preset, "built-in noise preset name");
  noise->add_option("--config", config, "noise config file");
  noise->add_option("--trajectories", trajectories, "number of stochastic trajectories");
  noise->add_option("--seed", seed, "base RNG seed");
  noise->add_option("--out", out, "output CSV path")->required();
  noise->add_option("--jobs", jobs, "worker threads (default: hardware)");

  auto* presets = app.add_subcommand("presets", "list built-in presets");
  std::string show;
  presets->add_option("--show", show, "print the config of one preset");

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets->parsed()) {
      if (!show.empty()) {
        for (const ryd::Preset& p : ryd::presets())
          if (p.name == show) {
            std::cout << p.config;
            return 0;
          }
        throw ryd::ConfigError("unknown preset '" + show + "'");
      }
      for (const ryd::Preset& p : ryd::presets())
        std::printf("%-14s %s\n", p.name.c_str(), p.description.c_str());
      return 0;
    }

    ryd::Scenario s = load(preset, config);
    if (dt_override > 0) s.dt = dt_override;
    if (t_end_override > 0) s.t_end = t_end_override;

    if (run->parsed()) {
      if (s.kind != ryd::ScenarioKind::run)
        throw ryd::ConfigError("scenario kind is not 'run' (use the matching subcommand)");
      const ryd::RunResult r = ryd::run_scenario(s, out);
      const ryd::Sample& last = r.trajectory.back();
      std::fprintf(stderr,
                   "run done: t/2pi = %.6g  F = %.6g  P_D = %.6g  purity = %.6g  "
                   "renorm events = %ld\n",
                   last.t / (2 * M_PI), last.f, last.pd, last.purity,
                   r.trajectory.renorm_events);
      report_units(s, last.t);
    } else if (sweep->parsed()) {
      if (s.kind != ryd::ScenarioKind::sweep)
        throw ryd::ConfigError("scenario kind is not 'sweep'");
      const ryd::SweepResult r = ryd::run_sweep(s, jobs, out);
      std::fprintf(stderr, "sweep done: %zu rows -> %s\n", r.rows.size(), out.c_str());
      report_units(s, s.t_end);
    } else if (noise->parsed()) {
      if (s.kind != ryd::ScenarioKind::noise_mc)
        throw ryd::ConfigError("scenario kind is not 'noise'");
      if (trajectories > 0) s.trajectories = trajectories;
      if (seed >= 0) s.seed = static_cast<std::uint64_t>(seed);
      const ryd::NoiseMcResult r = ryd::run_noise_mc(s, jobs, out);
      std::fprintf(stderr,
                   "noise ensemble done: %ld trajectories, mean F(t_end) = %.6g "
                   "+- %.6g (standard error)\n",
                   s.trajectories, r.ensemble.mean_final_fidelity(),
                   r.ensemble.stderr_final_fidelity());
      report_units(s, s.t_end);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
