#pragma once

// Scenario configuration, figure presets, sweeps, unit conversion, and
// CSV emission — the surface the CLI drives.
//
// Config keys (flat `key = value`, '#' comments):
//   kind                  run | sweep | noise            (default run)
//   model                 full | effective               (default effective)
//   effective.dissipator  literal | cascade              (default literal)
//       literal: the effective Hamiltonian embedded in the 9-dim product
//       basis with the four physical collapse operators; cascade: the
//       5-dim basis with direct |rr> -> {|00>,|B>,|D>,|11>} branching.
//   delta_r, omega_m, delta_m, gamma, u_rr (default 2*delta_r), omega_r
//   control.mode          off | both | only_h1 | only_h2 (default off)
//   control.lambda1, control.lambda2
//   initial               00|01|10|11|B|D|rr|uniform|mix13|mix14
//   initial.superposition e.g. "(0.5,0)*00 + (0.866,0)*11"
//   initial.mixture       e.g. "0.5*00 + 0.5*10"
//   initial.eta           mixture parameter for mix13/mix14
//   t_end_over_2pi | t_end, dt, record_stride
//   noise.eta1..noise.eta4   averaged-dissipator amplitudes (run/sweep)
//   noise.channel, noise.eta, noise.trajectories, noise.seed  (kind=noise)
//   sweep.axis1, sweep.axis2  "name:min:max:points" with name one of
//       omega_m gamma delta_m lambda1 lambda2 eta1..eta4 mix_eta
//       noise_eta channel time   (time values in t/2pi units)
//   sweep.observable      F | P_D                        (default F)
//   sweep.at_over_2pi     observation time               (default t_end)
//   units.omega_r_mhz     physical Omega_r/2pi in MHz (optional report)
//   out                   output CSV path (optional; CLI --out overrides)

#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ryd/config.hpp"
#include "ryd/control.hpp"
#include "ryd/dynamics.hpp"
#include "ryd/model.hpp"
#include "ryd/noise.hpp"
#include "ryd/parallel.hpp"
#include "ryd/params.hpp"
#include "ryd/states.hpp"

namespace ryd {

enum class ScenarioKind { run, sweep, noise_mc };
enum class EffectiveDissipator { literal, cascade };
enum class SweepObservable { fidelity, pd };

struct InitialSpec {
  enum class Kind { named, superposition, mixture, mix13, mix14 };
  Kind kind = Kind::named;
  std::string label = "uniform";
  std::vector<std::pair<cplx, std::string>> amplitudes;   // superposition
  std::vector<std::pair<double, std::string>> weights;    // mixture
  double eta = 0.0;                                       // mix13/mix14
};

struct SweepAxis {
  std::string name;
  double min = 0, max = 0;
  long points = 0;

  double value(long i) const {
    return points <= 1 ? min
                       : min + (max - min) * static_cast<double>(i) /
                                   static_cast<double>(points - 1);
  }
};

struct Scenario {
  ScenarioKind kind = ScenarioKind::run;
  ModelKind model = ModelKind::effective;
  EffectiveDissipator dissipator = EffectiveDissipator::literal;
  SystemParams params;
  InitialSpec initial;
  ControlConfig control;
  double t_end = 0;        // dimensionless Omega_r t
  double dt = 0;           // 0: apply the step-size rule
  long record_stride = 0;  // 0: one sample per 2*pi
  std::string out;

  // kind == noise_mc
  int noise_channel = 0;
  double noise_eta = 0;
  long trajectories = 2000;
  std::uint64_t seed = 1;

  // kind == sweep
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  SweepObservable observable = SweepObservable::fidelity;
  double observe_at = 0;  // dimensionless; 0: t_end

  std::optional<double> omega_r_mhz;  // physical unit report
};

// ---------------------------------------------------------------------
// parsing

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) { out.push_back(cur); cur.clear(); }
    else cur += ch;
  }
  out.push_back(cur);
  return out;
}

inline double parse_number(const std::string& raw, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": expected number, got '" + raw + "'");
  }
}

// "w*label + w*label"; weights plain reals.
inline std::vector<std::pair<double, std::string>> parse_mixture(const std::string& s) {
  std::vector<std::pair<double, std::string>> out;
  for (const std::string& term : split(s, '+')) {
    const std::string t = Config::trim(term);
    if (t.empty()) throw ConfigError("initial.mixture: empty term");
    const auto parts = split(t, '*');
    if (parts.size() != 2)
      throw ConfigError("initial.mixture: expected 'weight*state', got '" + t + "'");
    out.emplace_back(parse_number(Config::trim(parts[0]), "initial.mixture"),
                     Config::trim(parts[1]));
  }
  return out;
}

// "(re,im)*label + ..." or "re*label + ...".
inline std::vector<std::pair<cplx, std::string>> parse_superposition(const std::string& s) {
  std::vector<std::pair<cplx, std::string>> out;
  for (const std::string& term : split(s, '+')) {
    const std::string t = Config::trim(term);
    if (t.empty()) throw ConfigError("initial.superposition: empty term");
    const size_t star = t.rfind('*');
    if (star == std::string::npos)
      throw ConfigError("initial.superposition: expected 'amplitude*state', got '" + t + "'");
    const std::string amp = Config::trim(t.substr(0, star));
    const std::string label = Config::trim(t.substr(star + 1));
    cplx a;
    if (!amp.empty() && amp.front() == '(' && amp.back() == ')') {
      const auto parts = split(amp.substr(1, amp.size() - 2), ',');
      if (parts.size() != 2)
        throw ConfigError("initial.superposition: expected '(re,im)', got '" + amp + "'");
      a = cplx(parse_number(Config::trim(parts[0]), "initial.superposition"),
               parse_number(Config::trim(parts[1]), "initial.superposition"));
    } else {
      a = cplx(parse_number(amp, "initial.superposition"), 0.0);
    }
    out.emplace_back(a, label);
  }
  return out;
}

inline SweepAxis parse_axis(const std::string& s, const std::string& where) {
  const auto parts = split(s, ':');
  if (parts.size() != 4)
    throw ConfigError(where + ": expected 'name:min:max:points', got '" + s + "'");
  SweepAxis ax;
  ax.name = Config::trim(parts[0]);
  ax.min = parse_number(Config::trim(parts[1]), where);
  ax.max = parse_number(Config::trim(parts[2]), where);
  ax.points = std::lround(parse_number(Config::trim(parts[3]), where));
  if (ax.points < 1) throw ConfigError(where + ": points must be >= 1");
  static const std::set<std::string> known = {
      "omega_m", "gamma", "delta_m", "lambda1", "lambda2", "eta1", "eta2",
      "eta3",    "eta4",  "mix_eta", "noise_eta", "channel", "time"};
  if (!known.count(ax.name))
    throw ConfigError(where + ": unknown sweep parameter '" + ax.name + "'");
  return ax;
}

}  // namespace detail

inline Scenario load_scenario(const Config& cfg) {
  Scenario s;

  const std::string kind = cfg.get_string("kind", "run");
  if (kind == "run") s.kind = ScenarioKind::run;
  else if (kind == "sweep") s.kind = ScenarioKind::sweep;
  else if (kind == "noise") s.kind = ScenarioKind::noise_mc;
  else throw ConfigError(cfg.location("kind") + ": unknown kind '" + kind + "'");

  const std::string model = cfg.get_string("model", "effective");
  if (model == "full") s.model = ModelKind::full;
  else if (model == "effective") s.model = ModelKind::effective;
  else throw ConfigError(cfg.location("model") + ": unknown model '" + model + "'");

  const std::string diss = cfg.get_string("effective.dissipator", "literal");
  if (diss == "literal") s.dissipator = EffectiveDissipator::literal;
  else if (diss == "cascade") s.dissipator = EffectiveDissipator::cascade;
  else throw ConfigError(cfg.location("effective.dissipator") +
                         ": unknown dissipator '" + diss + "'");

  s.params.omega_r = cfg.get_double("omega_r", 1.0);
  s.params.delta_r = cfg.get_double("delta_r", 50.0);
  s.params.omega_m = cfg.get_double("omega_m", 0.01);
  s.params.delta_m = cfg.get_double("delta_m", 0.005);
  s.params.u_rr = cfg.get_double("u_rr", 2.0 * s.params.delta_r);
  s.params.gamma = cfg.get_double("gamma", 0.002);
  s.params.lambda1 = cfg.get_double("control.lambda1", 0.0);
  s.params.lambda2 = cfg.get_double("control.lambda2", 0.0);
  for (int k = 0; k < 4; ++k)
    s.params.eta[static_cast<size_t>(k)] =
        cfg.get_double("noise.eta" + std::to_string(k + 1), 0.0);
  s.params.validate();

  const std::string mode = cfg.get_string("control.mode", "off");
  if (mode == "off") s.control.mode = ControlMode::off;
  else if (mode == "both") s.control.mode = ControlMode::both;
  else if (mode == "only_h1") s.control.mode = ControlMode::only_h1;
  else if (mode == "only_h2") s.control.mode = ControlMode::only_h2;
  else throw ConfigError(cfg.location("control.mode") + ": unknown mode '" + mode + "'");
  s.control.lambda1 = s.params.lambda1;
  s.control.lambda2 = s.params.lambda2;

  const std::string initial = cfg.get_string("initial", "uniform");
  if (cfg.has("initial.superposition")) {
    s.initial.kind = InitialSpec::Kind::superposition;
    s.initial.amplitudes =
        detail::parse_superposition(cfg.require_string("initial.superposition"));
  } else if (cfg.has("initial.mixture")) {
    s.initial.kind = InitialSpec::Kind::mixture;
    s.initial.weights = detail::parse_mixture(cfg.require_string("initial.mixture"));
    double sum = 0;
    for (const auto& [w, label] : s.initial.weights) {
      if (w < 0)
        throw ConfigError(cfg.location("initial.mixture") +
                          ": initial.mixture weights must be non-negative");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ConfigError(cfg.location("initial.mixture") +
                        ": initial.mixture weights must sum to 1 (got " +
                        std::to_string(sum) + ")");
  } else if (initial == "mix13") {
    s.initial.kind = InitialSpec::Kind::mix13;
  } else if (initial == "mix14") {
    s.initial.kind = InitialSpec::Kind::mix14;
  } else {
    s.initial.kind = InitialSpec::Kind::named;
    s.initial.label = initial;
  }
  s.initial.eta = cfg.get_double("initial.eta", 0.0);
  if (s.initial.eta < 0 || s.initial.eta > 1)
    throw ConfigError(cfg.location("initial.eta") + ": initial.eta must lie in [0,1]");

  if (cfg.has("t_end"))
    s.t_end = cfg.get_double("t_end", 0.0);
  else
    s.t_end = 2.0 * M_PI * cfg.get_double("t_end_over_2pi", 1500.0);
  if (s.t_end <= 0) throw ConfigError(cfg.location("t_end") + ": t_end must be positive");
  s.dt = cfg.get_double("dt", 0.0);
  s.record_stride = cfg.get_long("record_stride", 0);
  s.out = cfg.get_string("out", "");

  s.noise_channel = static_cast<int>(cfg.get_long("noise.channel", 0));
  s.noise_eta = cfg.get_double("noise.eta", 0.0);
  s.trajectories = cfg.get_long("noise.trajectories", 2000);
  s.seed = static_cast<std::uint64_t>(cfg.get_long("noise.seed", 1));
  if (s.kind == ScenarioKind::noise_mc) {
    if (s.noise_channel < 1 || s.noise_channel > 4)
      throw ConfigError(cfg.location("noise.channel") +
                        ": kind=noise requires noise.channel in 1..4");
    if (s.trajectories < 1)
      throw ConfigError(cfg.location("noise.trajectories") +
                        ": need at least one trajectory");
  }

  if (s.kind == ScenarioKind::sweep) {
    s.axis1 = detail::parse_axis(cfg.require_string("sweep.axis1"), "sweep.axis1");
    if (cfg.has("sweep.axis2"))
      s.axis2 = detail::parse_axis(cfg.require_string("sweep.axis2"), "sweep.axis2");
    const std::string obs = cfg.get_string("sweep.observable", "F");
    if (obs == "F") s.observable = SweepObservable::fidelity;
    else if (obs == "P_D") s.observable = SweepObservable::pd;
    else throw ConfigError(cfg.location("sweep.observable") +
                           ": unknown observable '" + obs + "'");
    s.observe_at = 2.0 * M_PI * cfg.get_double("sweep.at_over_2pi", 0.0);
    const long n2 = s.axis2 ? s.axis2->points : 1;
    if (s.axis1.points * n2 > 10000)
      throw ConfigError("sweep grid exceeds the 10000-point bound (" +
                        std::to_string(s.axis1.points * n2) + " points)");
  }

  if (cfg.has("units.omega_r_mhz")) s.omega_r_mhz = cfg.get_double("units.omega_r_mhz", 4.0);

  cfg.reject_unknown_keys();
  return s;
}

inline Scenario load_scenario_file(const std::string& path) {
  return load_scenario(Config::parse_file(path));
}

// ---------------------------------------------------------------------
// pipeline assembly

// Concrete operators and initial state of a scenario's master equation.
struct Pipeline {
  int dim = 9;
  ModelKind basis_tag = ModelKind::full;
  Mat h;
  std::vector<Mat> collapse;
  DensityMatrix rho0;
};

namespace detail {

inline DensityMatrix build_initial(const InitialSpec& spec, int dim, ModelKind tag) {
  auto ket_of = [&](const std::string& label) -> Ket {
    if (label == "uniform") {
      Ket v =
          0.5 * (named_ket("00", dim) + named_ket("01", dim) + named_ket("10", dim) +
                 named_ket("11", dim));
      return v;
    }
    return named_ket(label, dim);
  };
  switch (spec.kind) {
    case InitialSpec::Kind::named:
      return DensityMatrix::from_ket(ket_of(spec.label), tag);
    case InitialSpec::Kind::superposition: {
      Ket v(dim);
      for (const auto& [a, label] : spec.amplitudes) {
        const Ket k = ket_of(label);
        for (int i = 0; i < dim; ++i) v[i] += a * k[i];
      }
      if (std::abs(v.norm() - 1.0) > 1e-12)
        throw ConfigError("initial.superposition: amplitudes are not normalized (norm " +
                          std::to_string(v.norm()) + ")");
      return DensityMatrix::from_ket(v, tag);
    }
    case InitialSpec::Kind::mixture: {
      Mat rho(dim);
      for (const auto& [w, label] : spec.weights) {
        const Ket k = ket_of(label);
        rho += w * Mat::outer(k, k);
      }
      return {rho, tag};
    }
    case InitialSpec::Kind::mix13: {
      const Ket a = ket_of("00"), b = ket_of("10");
      return {(1.0 - spec.eta) * Mat::outer(a, a) + spec.eta * Mat::outer(b, b), tag};
    }
    case InitialSpec::Kind::mix14: {
      const Ket a = ket_of("10"), b = ket_of("01");
      return {(1.0 - spec.eta) * Mat::outer(a, a) + spec.eta * Mat::outer(b, b), tag};
    }
  }
  throw std::logic_error("build_initial: unreachable");
}

}  // namespace detail

inline Pipeline build_pipeline(const Scenario& s) {
  Pipeline p;
  if (s.model == ModelKind::full) {
    p.dim = kFullDim;
    p.basis_tag = ModelKind::full;
    p.h = build_full_hamiltonian(s.params);
    p.collapse = build_collapse_ops(s.params, ModelKind::full);
  } else if (s.dissipator == EffectiveDissipator::literal) {
    // Effective Hamiltonian hosted in the 9-dim product basis with the
    // four physical collapse operators.
    p.dim = kFullDim;
    p.basis_tag = ModelKind::full;
    p.h = embed_effective(build_effective_hamiltonian(s.params));
    p.collapse = build_collapse_ops(s.params, ModelKind::full);
  } else {
    p.dim = kEffDim;
    p.basis_tag = ModelKind::effective;
    p.h = build_effective_hamiltonian(s.params);
    p.collapse = build_collapse_ops(s.params, ModelKind::effective);
  }
  p.rho0 = detail::build_initial(s.initial, p.dim, p.basis_tag);
  return p;
}

// Active averaged-noise channels (eta > 0), restricted to the 9-dim basis.
inline std::vector<NoiseChannel> active_noise_channels(const Scenario& s) {
  std::vector<NoiseChannel> out;
  bool any = false;
  for (double e : s.params.eta) any = any || e > 0;
  if (!any) return out;
  detail::require(s.model == ModelKind::full ||
                      s.dissipator == EffectiveDissipator::literal,
                  "noise channels require the 9-dim basis (full model or "
                  "effective.dissipator = literal)");
  for (const NoiseChannel& ch : build_noise_hamiltonians(s.params))
    if (ch.eta > 0) out.push_back(ch);
  return out;
}

// Step-size rule: dt <= 0.05/omega_max from the fastest coherent frequency
// (full model: max(|delta_r|, u_rr)); the slow effective model uses 0.1.
// Averaged noise adds a stiffness cap 0.5/rate with rate = 2 eta^2 lam_max^2.
inline double default_dt(const Scenario& s) {
  double dt = 0.1;
  if (s.model == ModelKind::full) {
    const double omega_max =
        std::max({std::abs(s.params.delta_r), std::abs(s.params.u_rr), 1.0});
    dt = 0.05 / omega_max;
  }
  bool any_noise = false;
  for (double e : s.params.eta) any_noise = any_noise || e > 0;
  if (any_noise) {
    for (const NoiseChannel& ch : build_noise_hamiltonians(s.params)) {
      if (ch.eta <= 0) continue;
      const EigenDecomposition es = hermitian_eigen(ch.h_s);
      const double lam_max =
          std::max(std::abs(es.value(0)), std::abs(es.value(es.dim - 1)));
      const double rate = 2.0 * ch.eta * ch.eta * lam_max * lam_max;
      if (rate > 0) dt = std::min(dt, 0.5 / rate);
    }
  }
  return dt;
}

// ---------------------------------------------------------------------
// execution

struct RunResult {
  Trajectory trajectory;
  double dt = 0;
  bool replayed_control = false;
};

// Noiseless closed-loop run recording the control values for replay.
inline Trajectory record_control(const Scenario& s, const Pipeline& p, double dt,
                                 double t_end) {
  Scenario clean = s;
  clean.params.eta = {0, 0, 0, 0};
  const LindbladGenerator gen =
      controlled_generator(p.h, p.collapse, clean.control, clean.model);
  IntegrationOptions opt;
  opt.t_end = t_end;
  opt.dt = dt;
  opt.record_stride = s.record_stride;
  return integrate(p.rho0, gen, opt);
}

inline RunResult run_scenario_core(const Scenario& s) {
  detail::require(s.kind == ScenarioKind::run, "run_scenario_core: kind must be run");
  const Pipeline p = build_pipeline(s);
  const std::vector<NoiseChannel> channels = active_noise_channels(s);
  const double dt = s.dt > 0 ? s.dt : default_dt(s);

  IntegrationOptions opt;
  opt.t_end = s.t_end;
  opt.dt = dt;
  opt.record_stride = s.record_stride;

  RunResult out;
  out.dt = dt;
  if (channels.empty()) {
    const LindbladGenerator gen =
        controlled_generator(p.h, p.collapse, s.control, s.model);
    out.trajectory = integrate(p.rho0, gen, opt);
  } else if (s.control.mode == ControlMode::off) {
    LindbladGenerator gen(p.h, p.collapse);
    for (const NoiseChannel& ch : channels) gen.add_noise_channel(ch.eta, ch.h_s);
    out.trajectory = integrate(p.rho0, gen, opt);
  } else {
    // Noisy controlled run: open-loop replay of the control values from
    // the noiseless closed-loop run.
    Scenario clean = s;
    clean.dt = 0;
    clean.params.eta = {0, 0, 0, 0};
    const double base_dt = default_dt(clean);
    const ReplayTable replay =
        ReplayTable::from_trajectory(record_control(s, p, base_dt, s.t_end));
    const LindbladGenerator gen = noisy_controlled_generator(
        p.h, p.collapse, s.control, s.model, replay, channels);
    out.trajectory = integrate(p.rho0, gen, opt);
    out.replayed_control = true;
  }
  return out;
}

// ---------------------------------------------------------------------
// CSV

namespace detail {

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << "t_dimensionless,t_over_2pi,P_D,F,purity,f1,f2,A1,A2,trace_err,min_eig\n";
  for (const Sample& s : traj.samples) {
    out << detail::fmt17(s.t) << ',' << detail::fmt17(s.t / (2.0 * M_PI)) << ','
        << detail::fmt17(s.pd) << ',' << detail::fmt17(s.f) << ','
        << detail::fmt17(s.purity) << ',' << detail::fmt17(s.f1) << ','
        << detail::fmt17(s.f2) << ',' << detail::fmt17(s.a1) << ','
        << detail::fmt17(s.a2) << ',' << detail::fmt17(s.trace_err) << ','
        << detail::fmt17(s.min_eig) << '\n';
  }
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

inline RunResult run_scenario(const Scenario& s, const std::string& out_override = "") {
  RunResult r = run_scenario_core(s);
  const std::string path = out_override.empty() ? s.out : out_override;
  if (!path.empty()) write_file(path, trajectory_csv(r.trajectory));
  return r;
}

// ---------------------------------------------------------------------
// sweeps

struct SweepResult {
  std::vector<std::string> header;            // column names
  std::vector<std::vector<double>> rows;      // axis1 [, axis2], observable
};

namespace detail {

inline void apply_axis(Scenario& s, const std::string& name, double value) {
  if (name == "omega_m") s.params.omega_m = value;
  else if (name == "gamma") s.params.gamma = value;
  else if (name == "delta_m") s.params.delta_m = value;
  else if (name == "lambda1") { s.params.lambda1 = value; s.control.lambda1 = value; }
  else if (name == "lambda2") { s.params.lambda2 = value; s.control.lambda2 = value; }
  else if (name == "eta1") s.params.eta[0] = value;
  else if (name == "eta2") s.params.eta[1] = value;
  else if (name == "eta3") s.params.eta[2] = value;
  else if (name == "eta4") s.params.eta[3] = value;
  else if (name == "mix_eta") s.initial.eta = value;
  else if (name == "noise_eta") s.noise_eta = value;
  else if (name == "channel") s.noise_channel = static_cast<int>(std::lround(value));
  else throw ConfigError("sweep: unknown parameter '" + name + "'");
}

inline double read_observable(const Trajectory& traj, SweepObservable obs, double at) {
  const Sample& s = traj.at_time(at);
  return obs == SweepObservable::fidelity ? s.f : s.pd;
}

}  // namespace detail

inline SweepResult run_sweep(const Scenario& s, int jobs,
                             const std::string& out_override = "") {
  detail::require(s.kind == ScenarioKind::sweep, "run_sweep: kind must be sweep");
  const bool time_axis = s.axis2 && s.axis2->name == "time";
  detail::require(s.axis1.name != "time", "run_sweep: 'time' is only valid as axis2");

  // Noise axes share one control-replay record: the noiseless closed-loop
  // run does not depend on the swept noise parameters.
  const bool noise_sweep = s.axis1.name == "channel" || s.axis1.name == "noise_eta" ||
                           s.axis1.name.rfind("eta", 0) == 0 ||
                           (s.axis2 && (s.axis2->name == "channel" ||
                                        s.axis2->name == "noise_eta" ||
                                        s.axis2->name.rfind("eta", 0) == 0));
  std::shared_ptr<const ReplayTable> shared_replay;
  if (noise_sweep && s.control.mode != ControlMode::off) {
    Scenario clean = s;
    clean.params.eta = {0, 0, 0, 0};
    const Pipeline p = build_pipeline(clean);
    const double dt = clean.dt > 0 ? clean.dt : default_dt(clean);
    shared_replay = std::make_shared<const ReplayTable>(
        ReplayTable::from_trajectory(record_control(clean, p, dt, s.t_end)));
  }

  const long n1 = s.axis1.points;
  const long n2 = s.axis2 ? s.axis2->points : 1;
  const long n_runs = time_axis ? n1 : n1 * n2;

  struct Row { double a1, a2, v; };
  std::vector<std::vector<Row>> results(static_cast<size_t>(n_runs));

  parallel_for(n_runs, jobs, [&](long idx) {
    Scenario point = s;
    point.kind = ScenarioKind::run;
    point.out.clear();
    const long i1 = time_axis ? idx : idx / n2;
    const long i2 = time_axis ? 0 : idx % n2;
    detail::apply_axis(point, s.axis1.name, s.axis1.value(i1));
    if (s.axis2 && !time_axis) detail::apply_axis(point, s.axis2->name, s.axis2->value(i2));
    if (point.noise_channel >= 1 && point.noise_channel <= 4)
      point.params.eta[static_cast<size_t>(point.noise_channel - 1)] = point.noise_eta;

    std::vector<Row>& rows = results[static_cast<size_t>(idx)];
    const Pipeline p = build_pipeline(point);
    const std::vector<NoiseChannel> channels = active_noise_channels(point);
    const double dt = point.dt > 0 ? point.dt : default_dt(point);
    IntegrationOptions opt;
    opt.t_end = point.t_end;
    opt.dt = dt;
    opt.record_stride = point.record_stride;

    Trajectory traj;
    if (channels.empty()) {
      const LindbladGenerator gen =
          controlled_generator(p.h, p.collapse, point.control, point.model);
      traj = integrate(p.rho0, gen, opt);
    } else if (point.control.mode == ControlMode::off || !shared_replay) {
      LindbladGenerator gen(p.h, p.collapse);
      for (const NoiseChannel& ch : channels) gen.add_noise_channel(ch.eta, ch.h_s);
      traj = integrate(p.rho0, gen, opt);
    } else {
      const LindbladGenerator gen = noisy_controlled_generator(
          p.h, p.collapse, point.control, point.model, *shared_replay, channels);
      traj = integrate(p.rho0, gen, opt);
    }

    if (time_axis) {
      for (long i2t = 0; i2t < s.axis2->points; ++i2t) {
        const double t = 2.0 * M_PI * s.axis2->value(i2t);
        rows.push_back({s.axis1.value(i1), s.axis2->value(i2t),
                        detail::read_observable(traj, s.observable, t)});
      }
    } else {
      const double at = s.observe_at > 0 ? s.observe_at : s.t_end;
      rows.push_back({s.axis1.value(i1), s.axis2 ? s.axis2->value(i2) : 0.0,
                      detail::read_observable(traj, s.observable, at)});
    }
  });

  SweepResult out;
  out.header.push_back(s.axis1.name);
  if (s.axis2) out.header.push_back(s.axis2->name);
  out.header.push_back(s.observable == SweepObservable::fidelity ? "F" : "P_D");
  for (const auto& rows : results)
    for (const Row& r : rows) {
      if (s.axis2) out.rows.push_back({r.a1, r.a2, r.v});
      else out.rows.push_back({r.a1, r.v});
    }

  const std::string path = out_override.empty() ? s.out : out_override;
  if (!path.empty()) {
    std::ostringstream csv;
    for (size_t i = 0; i < out.header.size(); ++i)
      csv << (i ? "," : "") << out.header[i];
    csv << '\n';
    for (const auto& row : out.rows) {
      for (size_t i = 0; i < row.size(); ++i)
        csv << (i ? "," : "") << detail::fmt17(row[i]);
      csv << '\n';
    }
    write_file(path, csv.str());
  }
  return out;
}

// ---------------------------------------------------------------------
// Monte Carlo noise runs (kind = noise)

struct NoiseMcResult {
  EnsembleResult ensemble;
  double dt = 0;
};

inline NoiseMcResult run_noise_mc(const Scenario& s, int jobs,
                                  const std::string& out_override = "") {
  detail::require(s.kind == ScenarioKind::noise_mc, "run_noise_mc: kind must be noise");
  detail::require(s.noise_channel >= 1 && s.noise_channel <= 4,
                  "run_noise_mc: noise.channel must be 1..4");
  Scenario det = s;
  det.params.eta = {0, 0, 0, 0};  // kick handled stochastically, not averaged
  const Pipeline p = build_pipeline(det);
  detail::require(p.dim == kFullDim,
                  "run_noise_mc: stochastic kicks require the 9-dim basis");

  NoiseChannel channel =
      build_noise_hamiltonians(s.params)[static_cast<size_t>(s.noise_channel - 1)];
  channel.eta = s.noise_eta;

  const double dt = s.dt > 0 ? s.dt : default_dt(det);
  IntegrationOptions opt;
  opt.t_end = s.t_end;
  opt.dt = dt;
  opt.record_stride = s.record_stride;

  LindbladGenerator gen(p.h, p.collapse);
  if (s.control.mode != ControlMode::off) {
    const ReplayTable replay =
        ReplayTable::from_trajectory(record_control(det, p, dt, s.t_end));
    gen = noisy_controlled_generator(p.h, p.collapse, s.control, s.model, replay, {});
  }

  NoiseMcResult out;
  out.dt = dt;
  out.ensemble =
      ensemble_average(p.rho0, gen, channel, s.seed, s.trajectories, opt, jobs);

  const std::string path = out_override.empty() ? s.out : out_override;
  if (!path.empty()) write_file(path, trajectory_csv(out.ensemble.mean_trajectory));
  return out;
}

// ---------------------------------------------------------------------
// physical units

struct PhysicalTime {
  double t_ms = 0;                  // wall-clock time in milliseconds
  double implied_gamma_ratio = 0;   // gamma/Omega_r implied by the Cs 6P decay
};

// omega_r_physical is the angular frequency in rad/s (Omega_r/2pi = 4 MHz
// corresponds to 2*pi*4e6). The gamma ratio is reported for the cesium
// 6P_{3/2} linewidth gamma = 2*pi*0.007 MHz.
inline PhysicalTime to_physical_units(double t_dimensionless, const SystemParams&,
                                      double omega_r_physical) {
  detail::require(omega_r_physical > 0,
                  "to_physical_units: omega_r_physical must be positive");
  PhysicalTime out;
  out.t_ms = t_dimensionless / omega_r_physical * 1e3;
  constexpr double kCsGammaHz = 2.0 * M_PI * 0.007e6;
  out.implied_gamma_ratio = kCsGammaHz / omega_r_physical;
  return out;
}

inline double omega_r_from_mhz(double mhz) { return 2.0 * M_PI * mhz * 1e6; }

// ---------------------------------------------------------------------
// presets

struct Preset {
  std::string name;
  std::string description;
  std::string config;
};

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"fig2a",
       "uncontrolled convergence to the singlet, uniform superposition start",
       "kind = run\n"
       "model = effective\n"
       "delta_r = 50\n"
       "gamma = 0.002\n"
       "omega_m = 0.01\n"
       "delta_m = 0.005\n"
       "initial = uniform\n"
       "control.mode = off\n"
       "t_end_over_2pi = 1500\n"},
      {"fig2a_full",
       "same scenario integrated with the full 9-level model",
       "kind = run\n"
       "model = full\n"
       "delta_r = 50\n"
       "gamma = 0.002\n"
       "omega_m = 0.01\n"
       "delta_m = 0.005\n"
       "initial = uniform\n"
       "control.mode = off\n"
       "t_end_over_2pi = 1500\n"},
      {"fig2a_resonant",
       "resonant microwave driving (delta_m = 0) comparison curve",
       "kind = run\n"
       "model = effective\n"
       "delta_r = 50\n"
       "gamma = 0.002\n"
       "omega_m = 0.01\n"
       "delta_m = 0\n"
       "initial = uniform\n"
       "control.mode = off\n"
       "t_end_over_2pi = 1500\n"},
      {"fig2b",
       "P_D at t/2pi = 1500 over the (omega_m, gamma) plane",
       "kind = sweep\n"
       "model = effective\n"
       "delta_r = 50\n"
       "delta_m = 0.005\n"
       "initial = uniform\n"
       "control.mode = off\n"
       "t_end_over_2pi = 1500\n"
       "sweep.axis1 = omega_m:0.0005:0.03:60\n"
       "sweep.axis2 = gamma:0.0005:0.005:19\n"
       "sweep.observable = P_D\n"},
      {"fig3a",
       "Lyapunov control from |00>, both channels, lambda = 0.08",
       "kind = run\n"
       "model = effective\n"
       "delta_r = 50\n"
       "gamma = 0.002\n"
       "omega_m = 0.01\n"
       "delta_m = 0.005\n"
       "initial = 00\n"
       "control.mode = both\n"
       "control.lambda1 = 0.08\n"
       "control.lambda2 = 0.08\n"
       "t_end_over_2pi = 1500\n"
       "units.omega_r_mhz = 4\n"},
      {"fig3e",
       "Lyapunov control from |10>, both channels, lambda = 0.08",
       "kind = run\n"
       "model = effective\n"
       "delta_r = 50\n"
       "gamma = 0.002\n"
       "omega_m = 0.01\n"
       "delta_m = 0.005\n"
       "initial = 10\n"
       "control.mode = both\n"
       "control.lambda1 = 0.08\n"
       "control.lambda2 = 0.08\n"
       "t_end_over_2pi = 1500\n"
       "units.omega_r_mhz = 4\n"},
      {"fig3i",
       "Lyapunov control from |11>, both channels, lambda = 0.08",
       "kind = run\n"
       "model = effective\n"
       "delta_r = 50\n"
       "gamma = 0.002\n"
       "omega_m = 0.01\n"
       "delta_m = 0.005\n"
       "initial = 11\n"
       "control.mode = both\n"
       "control.lambda1 = 0.08\n"
       "control.lambda2 = 0.08\n"
       "t_end_over_2pi = 1500\n"
       "units.omega_r_mhz = 4\n"},
      {"fig4a",
       "mixed start (1-eta)|00><00| + eta|10><10|, F versus eta and time",
       "kind = sweep\n"
       "model = effective\n"
       "delta_r = 50\n"
       "gamma = 0.002\n"
       "omega_m = 0.01\n"
       "delta_m = 0.005\n"
       "initial = mix13\n"
       "control.mode = only_h1\n"
       "control.lambda1 = 0.08\n"
       "t_end_over_2pi = 800\n"
       "sweep.axis1 = mix_eta:0:1:11\n"
       "sweep.axis2 = time:0:800:81\n"
       "sweep.observable = F\n"},
      {"fig4b",
       "mixed start (1-eta)|10><10| + eta|01><01|, F versus eta and time",
       "kind = sweep\n"
       "model = effective\n"
       "delta_r = 50\n"
       "gamma = 0.002\n"
       "omega_m = 0.01\n"
       "delta_m = 0.005\n"
       "initial = mix14\n"
       "control.mode = only_h1\n"
       "control.lambda1 = 0.08\n"
       "t_end_over_2pi = 800\n"
       "sweep.axis1 = mix_eta:0:1:11\n"
       "sweep.axis2 = time:0:800:81\n"
       "sweep.observable = F\n"},
      {"fig5a",
       "F at t/2pi = 1500 from |01> over the (lambda1, lambda2) plane "
       "(lambda range read as [0, 0.8]; see README note)",
       "kind = sweep\n"
       "model = effective\n"
       "delta_r = 50\n"
       "gamma = 0.002\n"
       "omega_m = 0.01\n"
       "delta_m = 0.005\n"
       "initial = 01\n"
       "control.mode = both\n"
       "t_end_over_2pi = 1500\n"
       "sweep.axis1 = lambda1:0:0.8:17\n"
       "sweep.axis2 = lambda2:0:0.8:17\n"
       "sweep.observable = F\n"},
      {"fig5b",
       "F at t/2pi = 1500 from |10> over the (lambda1, lambda2) plane",
       "kind = sweep\n"
       "model = effective\n"
       "delta_r = 50\n"
       "gamma = 0.002\n"
       "omega_m = 0.01\n"
       "delta_m = 0.005\n"
       "initial = 10\n"
       "control.mode = both\n"
       "t_end_over_2pi = 1500\n"
       "sweep.axis1 = lambda1:0:0.8:17\n"
       "sweep.axis2 = lambda2:0:0.8:17\n"
       "sweep.observable = F\n"},
      {"fig5c",
       "controlled F from |10> versus gamma and time",
       "kind = sweep\n"
       "model = effective\n"
       "delta_r = 50\n"
       "omega_m = 0.01\n"
       "delta_m = 0.005\n"
       "initial = 10\n"
       "control.mode = both\n"
       "control.lambda1 = 0.08\n"
       "control.lambda2 = 0.08\n"
       "t_end_over_2pi = 1500\n"
       "sweep.axis1 = gamma:0.0005:0.005:19\n"
       "sweep.axis2 = time:0:1500:76\n"
       "sweep.observable = F\n"},
      {"fig6",
       "noise robustness: F at t/2pi = 2500 versus channel and amplitude, "
       "replayed control",
       "kind = sweep\n"
       "model = effective\n"
       "delta_r = 50\n"
       "gamma = 0.002\n"
       "omega_m = 0.01\n"
       "delta_m = 0.005\n"
       "initial = 10\n"
       "control.mode = only_h1\n"
       "control.lambda1 = 0.08\n"
       "t_end_over_2pi = 2500\n"
       "sweep.axis1 = channel:1:4:4\n"
       "sweep.axis2 = noise_eta:0:0.1:11\n"
       "sweep.observable = F\n"
       "units.omega_r_mhz = 4\n"},
      {"fig6mc",
       "Monte Carlo cross-check of the averaged noise equation, channel 1",
       "kind = noise\n"
       "model = effective\n"
       "delta_r = 50\n"
       "gamma = 0.002\n"
       "omega_m = 0.01\n"
       "delta_m = 0.005\n"
       "initial = 10\n"
       "control.mode = only_h1\n"
       "control.lambda1 = 0.08\n"
       "t_end_over_2pi = 100\n"
       "noise.channel = 1\n"
       "noise.eta = 0.05\n"
       "noise.trajectories = 2000\n"
       "noise.seed = 1\n"},
  };
  return all;
}

inline Scenario load_preset(const std::string& name) {
  for (const Preset& p : presets())
    if (p.name == name)
      return load_scenario(Config::parse_string(p.config, "preset:" + name));
  throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace ryd
