#pragma once

// Master-equation right-hand sides and the fixed-step RK4 integrator.
//
// The generator is re-evaluated at every RK4 stage, so state-dependent
// (Lyapunov-controlled) terms enter each stage rather than being frozen
// per step. All RHS outputs are Hermitian by construction, so Hermiticity
// is preserved exactly along the integration.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ryd/eigen.hpp"
#include "ryd/matrix.hpp"
#include "ryd/model.hpp"
#include "ryd/states.hpp"

namespace ryd {

struct DensityMatrix {
  Mat mat;
  ModelKind basis_tag = ModelKind::full;

  static DensityMatrix from_ket(const Ket& psi, ModelKind tag) {
    detail::require(std::abs(psi.norm() - 1.0) <= 1e-12,
                    "DensityMatrix: ket must be normalized");
    return {Mat::outer(psi, psi), tag};
  }

  void validate() const {
    detail::require(std::abs(mat.trace().real() - 1.0) <= 1e-8 &&
                        std::abs(mat.trace().imag()) <= 1e-8,
                    "DensityMatrix: trace must be one");
    detail::require(hermiticity_defect(mat) <= 1e-10, "DensityMatrix: not Hermitian");
    detail::require(min_eigenvalue(mat) >= -1e-8, "DensityMatrix: not positive semidefinite");
  }
};

// Per-sample observable record; layout matches the CSV contract.
struct Sample {
  double t = 0;
  double pd = 0, f = 0, purity = 0;
  double f1 = 0, f2 = 0;
  double a1 = 0, a2 = 0;
  double trace_err = 0, min_eig = 0;
};

struct Trajectory {
  std::vector<Sample> samples;
  long renorm_events = 0;

  const Sample& back() const { return samples.back(); }
  // Sample closest to dimensionless time t.
  const Sample& at_time(double t) const {
    detail::require(!samples.empty(), "Trajectory: empty");
    size_t best = 0;
    for (size_t i = 1; i < samples.size(); ++i)
      if (std::abs(samples[i].t - t) < std::abs(samples[best].t - t)) best = i;
    return samples[best];
  }
};

// Plain Lindblad RHS: -i[H, rho] + sum_L (L rho L^dag - {L^dag L, rho}/2).
inline Mat lindblad_rhs(const DensityMatrix& rho, const Mat& h,
                        const std::vector<Mat>& collapse) {
  detail::require(h.dim() == rho.mat.dim(), "lindblad_rhs: dimension mismatch");
  Mat out = cplx(0, -1) * commutator(h, rho.mat);
  for (const Mat& l : collapse) {
    detail::require(l.dim() == h.dim(), "lindblad_rhs: dimension mismatch");
    const Mat ld = l.dagger();
    const Mat ldl = ld * l;
    out += l * rho.mat * ld - 0.5 * (ldl * rho.mat + rho.mat * ldl);
  }
  return out;
}

namespace detail {
// Collapse operator stored as its nonzero entries; the jump term
// (L rho L^dag)[ra, rb] = sum va rho[ca, cb] conj(vb) costs nnz^2 updates.
struct SparseOp {
  struct Entry { int r, c; cplx v; };
  std::vector<Entry> entries;
  static SparseOp from(const Mat& l) {
    SparseOp s;
    for (int r = 0; r < l.dim(); ++r)
      for (int c = 0; c < l.dim(); ++c)
        if (l(r, c) != cplx{}) s.entries.push_back({r, c, l(r, c)});
    return s;
  }
};
}  // namespace detail

// The master-equation generator used everywhere: Lindblad core plus
// optional state-feedback control, replayed control, and noise terms
// (either the averaged double-commutator dissipator or a stochastic
// Hamiltonian kick handled outside by the trajectory driver).
class LindbladGenerator {
 public:
  LindbladGenerator(const Mat& h, const std::vector<Mat>& collapse)
      : dim_(h.dim()) {
    detail::require(hermiticity_defect(h) <= 1e-10 * std::max(h.frobenius(), 1e-300),
                    "LindbladGenerator: Hamiltonian must be Hermitian");
    Mat ldl(dim_);
    for (const Mat& l : collapse) {
      detail::require(l.dim() == dim_, "LindbladGenerator: collapse dim mismatch");
      ldl += l.dagger() * l;
      jumps_.push_back(detail::SparseOp::from(l));
    }
    // K = H - (i/2) sum L^dag L: the RHS collapses to
    // -i(K rho - (K rho)^dag) + jump terms for Hermitian rho.
    k_base_ = h - cplx(0, 0.5) * ldl;
  }

  int dim() const { return dim_; }

  // Closed-loop control: H_j already scaled by lambda_j; f_j = -i<D|[H_j,rho]|D>.
  void set_control(const Mat& h1, const Mat& h2, bool use1, bool use2) {
    detail::require(h1.dim() == dim_ && h2.dim() == dim_, "set_control: dim mismatch");
    h1_ = h1; h2_ = h2;
    use1_ = use1; use2_ = use2;
    controlled_ = use1 || use2;
    const Ket d = dim_ == kEffDim ? named_ket("D", kEffDim) : named_ket("D", kFullDim);
    d_ = d;
    u1_ = h1_ * d;
    u2_ = h2_ * d;
    replay_ = nullptr;
  }

  // Open-loop replay of pre-recorded control values f_j(t).
  void set_control_replay(const Mat& h1, const Mat& h2,
                          std::function<std::pair<double, double>(double)> replay) {
    set_control(h1, h2, true, true);
    replay_ = std::move(replay);
  }

  // Averaged (Novikov) noise channel: adds -eta^2/2 [H_s,[H_s,rho]].
  void add_noise_channel(double eta, const Mat& h_s) {
    detail::require(h_s.dim() == dim_, "add_noise_channel: dim mismatch");
    if (eta > 0) noise_.emplace_back(eta, h_s);
  }

  // Instantaneous control values for the given state (or replay time).
  std::pair<double, double> control_values(const Mat& rho, double t) const {
    if (!controlled_) return {0.0, 0.0};
    if (replay_) return replay_(t);
    // f_j = -i<D|[H_j,rho]|D> = 2 Im( (H_j|D>)^dag rho |D> )
    auto law = [&](const Ket& u) {
      cplx z{};
      for (int r = 0; r < dim_; ++r) {
        cplx row{};
        for (int c = 0; c < dim_; ++c) row += rho(r, c) * d_[c];
        z += std::conj(u[r]) * row;
      }
      return 2.0 * z.imag();
    };
    return {use1_ ? law(u1_) : 0.0, use2_ ? law(u2_) : 0.0};
  }

  // out <- generator(rho, t). Requires Hermitian rho (true along RK4
  // trajectories started from a valid density matrix).
  void rhs(const Mat& rho, double t, Mat& out) const {
    Mat k = k_base_;
    if (controlled_) {
      const auto [f1, f2] = control_values(rho, t);
      if (f1 != 0.0) k += f1 * h1_;
      if (f2 != 0.0) k += f2 * h2_;
    }
    Mat m(dim_);
    mul_into(m, k, rho);
    // -i (M - M^dag)
    if (out.dim() != dim_) out = Mat(dim_);
    for (int r = 0; r < dim_; ++r)
      for (int c = 0; c < dim_; ++c) {
        const cplx x = m(r, c) - std::conj(m(c, r));
        out(r, c) = cplx(x.imag(), -x.real());
      }
    for (const auto& jump : jumps_)
      for (const auto& ea : jump.entries)
        for (const auto& eb : jump.entries)
          out(ea.r, eb.r) += ea.v * std::conj(eb.v) * rho(ea.c, eb.c);
    for (const auto& [eta, hs] : noise_) {
      Mat hr(dim_);
      mul_into(hr, hs, rho);
      Mat comm(dim_);  // C = [H_s, rho] = HR - (HR)^dag, anti-Hermitian
      for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c) comm(r, c) = hr(r, c) - std::conj(hr(c, r));
      Mat hc(dim_);
      mul_into(hc, hs, comm);
      // [H_s, C] = H_s C + (H_s C)^dag for anti-Hermitian C
      const double w = -eta * eta / 2.0;
      for (int r = 0; r < dim_; ++r)
        for (int c = 0; c < dim_; ++c)
          out(r, c) += w * (hc(r, c) + std::conj(hc(c, r)));
    }
  }

 private:
  int dim_;
  Mat k_base_;
  std::vector<detail::SparseOp> jumps_;
  bool controlled_ = false, use1_ = false, use2_ = false;
  Mat h1_, h2_;
  Ket d_, u1_, u2_;
  std::function<std::pair<double, double>(double)> replay_;
  std::vector<std::pair<double, Mat>> noise_;
};

// Observables of a state; f1/f2 are filled in by the integrator.
inline Sample observables(const DensityMatrix& rho) {
  const int n = rho.mat.dim();
  detail::require(n == kEffDim || n == kFullDim, "observables: expected dim 5 or 9");
  const Ket d = named_ket("D", n);
  const Ket s00 = named_ket("00", n);
  const Ket s11 = named_ket("11", n);
  Sample s;
  s.pd = sandwich(d, rho.mat, d).real();
  s.f = s.pd;
  double pur = 0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) pur += (rho.mat(r, c) * rho.mat(c, r)).real();
  s.purity = pur;
  s.a1 = sandwich(s11, rho.mat, d).imag();
  s.a2 = sandwich(d, rho.mat, s00).imag();
  s.trace_err = std::abs(rho.mat.trace() - cplx(1.0, 0.0));
  s.min_eig = min_eigenvalue(0.5 * (rho.mat + rho.mat.dagger()));
  return s;
}

struct IntegrationOptions {
  double t_end = 0;
  double dt = 0;
  long record_stride = 0;  // 0: default round(2*pi/dt), one sample per time unit
};

// Classical fixed-step RK4. Records observables every record_stride steps
// (plus the initial and final states). Trace is renormalized only when the
// per-step drift exceeds 1e-10, and every such event is counted. Breaching
// |trace-1| > 1e-6 or min eigenvalue < -1e-6 aborts with a diagnostic.
template <class Gen>
Trajectory integrate(const DensityMatrix& rho0, const Gen& gen,
                     const IntegrationOptions& opt) {
  detail::require(opt.t_end > 0 && opt.dt > 0, "integrate: t_end and dt must be positive");
  const long nsteps = std::lround(opt.t_end / opt.dt);
  const long stride = opt.record_stride > 0
                          ? opt.record_stride
                          : std::max(1L, std::lround(2.0 * M_PI / opt.dt));
  rho0.validate();

  Trajectory traj;
  Mat rho = rho0.mat;
  Mat k1, k2, k3, k4, tmp;
  const int n = rho.dim();

  auto record = [&](long step) {
    Sample s = observables({rho, rho0.basis_tag});
    s.t = step * opt.dt;
    const auto [f1, f2] = gen.control_values(rho, s.t);
    s.f1 = f1;
    s.f2 = f2;
    if (s.min_eig < -1e-6)
      throw std::runtime_error("integrate: positivity breached at t=" +
                               std::to_string(s.t) + " (min eig " +
                               std::to_string(s.min_eig) + ")");
    traj.samples.push_back(s);
  };

  record(0);
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

    const double tr = rho.trace().real();
    const double drift = std::abs(tr - 1.0);
    if (drift > 1e-6)
      throw std::runtime_error("integrate: trace drift " + std::to_string(drift) +
                               " at t=" + std::to_string((i + 1) * opt.dt));
    if (drift > 1e-10) {
      rho *= cplx(1.0 / tr, 0.0);
      ++traj.renorm_events;
    }
    if ((i + 1) % stride == 0 || i + 1 == nsteps) record(i + 1);
  }
  return traj;
}

}  // namespace ryd
