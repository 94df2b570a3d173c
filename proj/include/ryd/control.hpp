#pragma once

// Lyapunov state-feedback control: H_j = lambda_j |0>_j<1| + h.c. on atom j,
// with the control law f_j = -i<D|[H_j, rho]|D> computed from the commutator
// (which guarantees V_a = -sum f_j^2 <= 0 by construction).

#include <string>
#include <utility>

#include "ryd/dynamics.hpp"
#include "ryd/matrix.hpp"
#include "ryd/model.hpp"
#include "ryd/params.hpp"
#include "ryd/states.hpp"

namespace ryd {

enum class ControlMode { off, both, only_h1, only_h2 };

struct ControlConfig {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  ControlMode mode = ControlMode::off;

  bool channel1() const { return mode == ControlMode::both || mode == ControlMode::only_h1; }
  bool channel2() const { return mode == ControlMode::both || mode == ControlMode::only_h2; }
  void validate() const {
    detail::require(lambda1 >= 0 && lambda2 >= 0, "ControlConfig: lambda must be non-negative");
  }
};

// The two control Hamiltonians, identity on the untouched atom. For the
// effective model they are projected onto the (|00>,|B>,|D>,|11>,|rr>)
// basis (the |rr> row and column vanish).
inline std::pair<Mat, Mat> control_hamiltonians(const ControlConfig& cfg, ModelKind kind) {
  cfg.validate();
  const Mat i3 = Mat::identity(3);
  Mat h1 = cfg.lambda1 * tensor(detail::atom_op(0, 1), i3);
  Mat h2 = cfg.lambda2 * tensor(i3, detail::atom_op(0, 1));
  h1 += h1.dagger();
  h2 += h2.dagger();
  if (kind == ModelKind::effective) return {project_effective(h1), project_effective(h2)};
  return {h1, h2};
}

// f_j = -i<D|[H_j, rho]|D>, gated by the control mode.
inline std::pair<double, double> control_law(const DensityMatrix& rho,
                                             const ControlConfig& cfg) {
  const int n = rho.mat.dim();
  const auto [h1, h2] =
      control_hamiltonians(cfg, n == kEffDim ? ModelKind::effective : ModelKind::full);
  const Ket d = named_ket("D", n);
  auto law = [&](const Mat& h) {
    return (cplx(0, -1) * sandwich(d, commutator(h, rho.mat), d)).real();
  };
  return {cfg.channel1() ? law(h1) : 0.0, cfg.channel2() ? law(h2) : 0.0};
}

// Generator of the controlled master equation:
//   rho_dot = -i[H + sum_j f_j(rho) H_j, rho] + L[rho],
// with f_j rebuilt from the instantaneous state at every evaluation.
// `h` and `collapse` define the uncontrolled part in the same basis
// dimension as the control Hamiltonians.
inline LindbladGenerator controlled_generator(const Mat& h, const std::vector<Mat>& collapse,
                                              const ControlConfig& cfg, ModelKind kind) {
  LindbladGenerator gen(h, collapse);
  if (cfg.mode != ControlMode::off) {
    auto [h1, h2] = control_hamiltonians(cfg, kind);
    if (h1.dim() != gen.dim()) {
      // Effective-model dynamics hosted in the 9-dim product space.
      detail::require(kind == ModelKind::effective && gen.dim() == kFullDim,
                      "controlled_generator: basis mismatch");
      std::tie(h1, h2) = control_hamiltonians(cfg, ModelKind::full);
    }
    gen.set_control(h1, h2, cfg.channel1(), cfg.channel2());
  }
  return gen;
}

struct LyapunovDiagnostics {
  double v = 0, va = 0, vb = 0;
};

// V(t) = -<D|rho_dot|D> split into the control part V_a = -sum_j f_j^2 and
// the dissipative part V_b = -sum_L <D| L rho L^dag |D> (<= 0 for PSD rho).
inline LyapunovDiagnostics lyapunov_diagnostics(const DensityMatrix& rho,
                                                const SystemParams& p,
                                                const ControlConfig& cfg) {
  const int n = rho.mat.dim();
  const ModelKind kind = n == kEffDim ? ModelKind::effective : ModelKind::full;
  const auto [f1, f2] = control_law(rho, cfg);
  LyapunovDiagnostics out;
  out.va = -(f1 * f1 + f2 * f2);
  const Ket d = named_ket("D", n);
  for (const Mat& l : build_collapse_ops(p, kind))
    out.vb -= sandwich(d, l * rho.mat * l.dagger(), d).real();
  out.v = out.va + out.vb;
  return out;
}

}  // namespace ryd
