#pragma once

// Amplitude-noise machinery: the four stochastic Hamiltonians, the
// Novikov-averaged double-commutator dissipator, open-loop control replay,
// and seeded Monte Carlo trajectories whose ensemble mean reproduces the
// averaged equation.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ryd/control.hpp"
#include "ryd/dynamics.hpp"
#include "ryd/eigen.hpp"
#include "ryd/matrix.hpp"
#include "ryd/model.hpp"
#include "ryd/parallel.hpp"
#include "ryd/params.hpp"

namespace ryd {

struct NoiseChannel {
  int index = 0;   // 1..4
  double eta = 0;  // amplitude
  Mat h_s;         // Hermitian noise operator, 9-dim full basis
};

// The four noise operators in the full basis, with the H.c. convention
// doubling diagonal terms (net Delta_m sum_j |0>_j<0| and U_rr |rr><rr|):
//   H_s1 = (Omega_m/2) sum_j |0>_j<1| + H.c.
//   H_s2 = (Delta_m/2) sum_j |0>_j<0| + H.c.
//   H_s3 = (Omega_r/2) sum_j |1>_j<r| + H.c.
//   H_s4 = (U_rr/2) |rr><rr| + H.c.
inline std::array<NoiseChannel, 4> build_noise_hamiltonians(const SystemParams& p) {
  p.validate();
  std::array<NoiseChannel, 4> out;
  Mat h1 = 0.5 * p.omega_m * detail::two_atom(detail::atom_op(0, 1));
  h1 += h1.dagger();
  Mat h2 = 0.5 * p.delta_m * detail::two_atom(detail::atom_op(0, 0));
  h2 += h2.dagger();
  Mat h3 = 0.5 * p.omega_r * detail::two_atom(detail::atom_op(1, 2));
  h3 += h3.dagger();
  const Ket rr = named_ket("rr", kFullDim);
  Mat h4 = 0.5 * p.u_rr * Mat::outer(rr, rr);
  h4 += h4.dagger();
  const Mat hs[4] = {h1, h2, h3, h4};
  for (int k = 0; k < 4; ++k)
    out[static_cast<size_t>(k)] = {k + 1, p.eta[static_cast<size_t>(k)], hs[k]};
  return out;
}

// Sum over active channels of the Novikov dissipator
// D[rho] = -(eta^2/2) [H_s, [H_s, rho]].
inline Mat averaged_dissipator(const DensityMatrix& rho,
                               const std::vector<NoiseChannel>& channels) {
  Mat out(rho.mat.dim());
  for (const NoiseChannel& ch : channels) {
    detail::require(ch.h_s.dim() == rho.mat.dim(), "averaged_dissipator: dim mismatch");
    if (ch.eta == 0) continue;
    out += (-ch.eta * ch.eta / 2.0) * commutator(ch.h_s, commutator(ch.h_s, rho.mat));
  }
  return out;
}

// Recorded control values from a noiseless closed-loop run, with linear
// interpolation between samples. Querying beyond the recorded horizon
// is an error (the replay record must cover the whole noisy run).
class ReplayTable {
 public:
  static ReplayTable from_trajectory(const Trajectory& traj) {
    ReplayTable r;
    for (const Sample& s : traj.samples) {
      r.t_.push_back(s.t);
      r.f1_.push_back(s.f1);
      r.f2_.push_back(s.f2);
    }
    detail::require(r.t_.size() >= 2, "ReplayTable: need at least two samples");
    return r;
  }

  double t_max() const { return t_.back(); }

  std::pair<double, double> operator()(double t) const {
    if (t > t_.back() + 1e-9)
      throw std::runtime_error("ReplayTable: replay record shorter than requested time");
    if (t <= t_.front()) return {f1_.front(), f2_.front()};
    if (t >= t_.back()) return {f1_.back(), f2_.back()};
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    const size_t i = static_cast<size_t>(it - t_.begin()) - 1;
    const double w = (t - t_[i]) / (t_[i + 1] - t_[i]);
    return {f1_[i] * (1 - w) + f1_[i + 1] * w, f2_[i] * (1 - w) + f2_[i + 1] * w};
  }

 private:
  std::vector<double> t_, f1_, f2_;
};

// Generator of the noisy run with open-loop control replay:
//   rho_dot = -i[H + H_c(t), rho] + L[rho] + D[rho]
// with H_c(t) built from the replayed f_j(t).
inline LindbladGenerator noisy_controlled_generator(
    const Mat& h, const std::vector<Mat>& collapse, const ControlConfig& cfg,
    ModelKind kind, const ReplayTable& replay,
    const std::vector<NoiseChannel>& channels) {
  LindbladGenerator gen(h, collapse);
  auto [h1, h2] = control_hamiltonians(cfg, kind);
  if (h1.dim() != gen.dim()) {
    detail::require(kind == ModelKind::effective && gen.dim() == kFullDim,
                    "noisy_controlled_generator: basis mismatch");
    std::tie(h1, h2) = control_hamiltonians(cfg, ModelKind::full);
  }
  if (cfg.mode != ControlMode::off)
    gen.set_control_replay(h1, h2, [replay, cfg](double t) {
      auto [f1, f2] = replay(t);
      return std::pair<double, double>{cfg.channel1() ? f1 : 0.0,
                                       cfg.channel2() ? f2 : 0.0};
    });
  for (const NoiseChannel& ch : channels) {
    detail::require(ch.h_s.dim() == gen.dim(), "noisy_controlled_generator: dim mismatch");
    gen.add_noise_channel(ch.eta, ch.h_s);
  }
  return gen;
}

// Deterministic seeded RNG (splitmix64) with a documented contract:
// trajectory i of a run uses stream seed = base_seed + i; each step draws
// one standard normal via the Box-Muller transform of two uniforms.
class NoiseRng {
 public:
  explicit NoiseRng(std::uint64_t seed) : state_(seed) {}

  double uniform() {  // in (0, 1]
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return (static_cast<double>(z >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t state_;
};

// One stochastic realization: the deterministic part advances by RK4 under
// `gen` and each step is followed by the exact unitary noise kick
// exp(-i eta H_s dW), dW = sqrt(dt) N(0,1) (Stratonovich-consistent: its
// ensemble mean reproduces the double-commutator dissipator to O(dt^2)).
inline Trajectory stochastic_trajectory(const DensityMatrix& rho0,
                                        const LindbladGenerator& gen,
                                        const NoiseChannel& channel,
                                        std::uint64_t seed,
                                        const IntegrationOptions& opt,
                                        std::vector<Mat>* states_out = nullptr) {
  detail::require(opt.t_end > 0 && opt.dt > 0,
                  "stochastic_trajectory: t_end and dt must be positive");
  rho0.validate();
  const int n = rho0.mat.dim();
  detail::require(channel.h_s.dim() == n, "stochastic_trajectory: dim mismatch");
  const long nsteps = std::lround(opt.t_end / opt.dt);
  const long stride = opt.record_stride > 0
                          ? opt.record_stride
                          : std::max(1L, std::lround(2.0 * M_PI / opt.dt));
  const EigenDecomposition es = hermitian_eigen(channel.h_s);
  const Mat vdag = es.vectors.dagger();
  NoiseRng rng(seed);

  Trajectory traj;
  Mat rho = rho0.mat;
  Mat k1, k2, k3, k4, tmp, u, ud;
  auto record = [&](long step) {
    Sample s = observables({rho, rho0.basis_tag});
    s.t = step * opt.dt;
    const auto [f1, f2] = gen.control_values(rho, s.t);
    s.f1 = f1;
    s.f2 = f2;
    traj.samples.push_back(s);
    if (states_out) states_out->push_back(rho);
  };

  record(0);
  const double sq_dt = std::sqrt(opt.dt);
  for (long i = 0; i < nsteps; ++i) {
    const double t = i * opt.dt;
    gen.rhs(rho, t, k1);
    tmp = rho; tmp += 0.5 * opt.dt * k1;
    gen.rhs(tmp, t + 0.5 * opt.dt, k2);
    tmp = rho; tmp += 0.5 * opt.dt * k2;
    gen.rhs(tmp, t + 0.5 * opt.dt, k3);
    tmp = rho; tmp += opt.dt * k3;
    gen.rhs(tmp, t + opt.dt, k4);
    k2 += k3;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        rho(r, c) += (opt.dt / 6.0) * (k1(r, c) + 2.0 * k2(r, c) + k4(r, c));

    // Unitary kick in the noise eigenbasis: U = V exp(-i eta lam dW) V^dag.
    const double dw = sq_dt * rng.normal();
    Mat phase(n);
    for (int k = 0; k < n; ++k)
      phase(k, k) = std::exp(cplx(0.0, -channel.eta * es.value(k) * dw));
    mul_into(tmp, es.vectors, phase);
    mul_into(u, tmp, vdag);
    ud = u.dagger();
    mul_into(tmp, u, rho);
    mul_into(rho, tmp, ud);

    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-10) {
      rho *= cplx(1.0 / tr, 0.0);
      ++traj.renorm_events;
    }
    if ((i + 1) % stride == 0 || i + 1 == nsteps) record(i + 1);
  }
  return traj;
}

// Ensemble statistics of seeded stochastic trajectories. The mean state
// is accumulated over fixed-size index chunks and the chunk partials are
// reduced in index order, so the result is bit-identical for any worker
// count. Trajectory i uses seed base_seed + i.
struct EnsembleResult {
  std::vector<double> times;
  std::vector<Mat> mean_states;     // ensemble-averaged rho at each record time
  Trajectory mean_trajectory;       // observables of the mean states
  std::vector<double> final_fidelity;  // per-trajectory F(t_end)

  double mean_final_fidelity() const {
    double s = 0;
    for (double f : final_fidelity) s += f;
    return s / static_cast<double>(final_fidelity.size());
  }
  double stderr_final_fidelity() const {
    const double m = mean_final_fidelity();
    double s = 0;
    for (double f : final_fidelity) s += (f - m) * (f - m);
    const auto n = static_cast<double>(final_fidelity.size());
    return std::sqrt(s / (n - 1.0) / n);
  }
};

inline EnsembleResult ensemble_average(const DensityMatrix& rho0,
                                       const LindbladGenerator& gen,
                                       const NoiseChannel& channel,
                                       std::uint64_t base_seed, long n_traj,
                                       const IntegrationOptions& opt, int jobs) {
  detail::require(n_traj >= 1, "ensemble_average: need at least one trajectory");
  constexpr long kChunk = 64;
  const long n_chunks = (n_traj + kChunk - 1) / kChunk;

  std::vector<std::vector<Mat>> chunk_sums(static_cast<size_t>(n_chunks));
  std::vector<double> finals(static_cast<size_t>(n_traj), 0.0);
  std::vector<double> times;

  parallel_for(n_chunks, jobs, [&](long chunk) {
    const long lo = chunk * kChunk;
    const long hi = std::min(n_traj, lo + kChunk);
    std::vector<Mat>& acc = chunk_sums[static_cast<size_t>(chunk)];
    for (long i = lo; i < hi; ++i) {
      std::vector<Mat> states;
      const Trajectory traj = stochastic_trajectory(
          rho0, gen, channel, base_seed + static_cast<std::uint64_t>(i), opt, &states);
      finals[static_cast<size_t>(i)] = traj.back().f;
      if (acc.empty()) acc.resize(states.size(), Mat(rho0.mat.dim()));
      for (size_t k = 0; k < states.size(); ++k) acc[k] += states[k];
      if (chunk == 0 && i == 0) {
        times.clear();
        for (const Sample& s : traj.samples) times.push_back(s.t);
      }
    }
  });

  EnsembleResult out;
  out.times = times;
  out.final_fidelity = finals;
  const cplx inv_n(1.0 / static_cast<double>(n_traj), 0.0);
  for (size_t k = 0; k < chunk_sums[0].size(); ++k) {
    Mat m(rho0.mat.dim());
    for (long chunk = 0; chunk < n_chunks; ++chunk)
      if (k < chunk_sums[static_cast<size_t>(chunk)].size())
        m += chunk_sums[static_cast<size_t>(chunk)][k];
    m *= inv_n;
    out.mean_states.push_back(m);
    Sample s = observables({m, rho0.basis_tag});
    s.t = times[k];
    out.mean_trajectory.samples.push_back(s);
  }
  return out;
}

}  // namespace ryd
