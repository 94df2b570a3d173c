#pragma once

// Hamiltonians, collapse operators, and the analytic eigensystem of the
// antiblockade effective model.

#include <cmath>
#include <string>
#include <vector>

#include "ryd/eigen.hpp"
#include "ryd/matrix.hpp"
#include "ryd/params.hpp"
#include "ryd/states.hpp"

namespace ryd {

enum class ModelKind { full, effective };

namespace detail {
// Single-atom operator |a><b| in the (|0>,|1>,|r>) basis.
inline Mat atom_op(int a, int b) {
  Mat m(3);
  m(a, b) = 1.0;
  return m;
}
// Sum over both atoms: s (x) I + I (x) s.
inline Mat two_atom(const Mat& s) {
  const Mat i3 = Mat::identity(3);
  return tensor(s, i3) + tensor(i3, s);
}
}  // namespace detail

// H = H_l + H_m in the 9-dim product basis. The Hermitian conjugate is
// applied to the whole single-atom sum, so diagonal coefficients double:
// the net |0>_j<0| coefficient is delta_m and the net |r>_j<r| one is
// -delta_r.
inline Mat build_full_hamiltonian(const SystemParams& p) {
  p.validate();
  Mat hl = 0.5 * detail::two_atom(-p.delta_r * detail::atom_op(2, 2) +
                                  p.omega_r * detail::atom_op(2, 1));
  hl += hl.dagger();
  const Ket rr = named_ket("rr", kFullDim);
  hl += p.u_rr * Mat::outer(rr, rr);

  Mat hm = 0.5 * detail::two_atom(p.delta_m * detail::atom_op(0, 0) +
                                  p.omega_m * detail::atom_op(1, 0));
  hm += hm.dagger();
  return hl + hm;
}

// Collapse operators of the Rydberg decay.
//  full:      L_{j,k} = sqrt(gamma/2)|k>_j<r| (x) I, j in {1,2}, k in {0,1}
//  effective: |rr> decays directly into {|00>,|B>,|D>,|11>} with equal
//             branching, four rank-one operators sqrt(gamma/2)|target><rr|
//             (the fast single-excitation transit is traced out)
inline std::vector<Mat> build_collapse_ops(const SystemParams& p, ModelKind kind) {
  detail::require(p.gamma >= 0, "build_collapse_ops: gamma must be non-negative");
  const double amp = std::sqrt(p.gamma / 2.0);
  std::vector<Mat> out;
  if (kind == ModelKind::full) {
    const Mat i3 = Mat::identity(3);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        const Mat s = detail::atom_op(k, 2);
        out.push_back(amp * (j == 0 ? tensor(s, i3) : tensor(i3, s)));
      }
  } else {
    for (int tgt : {basis::e00, basis::eB, basis::eD, basis::e11}) {
      Mat l(kEffDim);
      l(tgt, basis::err) = amp;
      out.push_back(l);
    }
  }
  return out;
}

// Effective Hamiltonian in the ordered basis (|00>,|B>,|D>,|11>,|rr>),
// in the frame rotating at the common Stark shift omega_r^2/(2 delta_r):
//   H_e = (omega_m/sqrt(2)) (|11>+|00>)<B| + (omega_e/2)|11><rr| + H.c.
// plus the detuning-mismatch diagonal
//   (2 delta_m - omega_e/2)|00><00| + (delta_m - omega_e/4)(|B><B|+|D><D|),
// which vanishes identically at the Stark-cancellation point
// delta_m = omega_r^2/(4 delta_r) and realizes resonant driving at
// delta_m = 0.
inline Mat build_effective_hamiltonian(const SystemParams& p) {
  detail::require(p.delta_r != 0.0, "build_effective_hamiltonian: delta_r must be nonzero");
  p.validate();
  const double oe = p.omega_e();
  Mat h(kEffDim);
  h(basis::e00, basis::eB) = p.omega_m / std::sqrt(2.0);
  h(basis::e11, basis::eB) = p.omega_m / std::sqrt(2.0);
  h(basis::e11, basis::err) = oe / 2.0;
  h += h.dagger();
  h(basis::e00, basis::e00) += 2.0 * p.delta_m - oe / 2.0;
  h(basis::eB, basis::eB) += p.delta_m - oe / 4.0;
  h(basis::eD, basis::eD) += p.delta_m - oe / 4.0;
  return h;
}

// Closed-form eigensystem of H_e at the Stark-cancellation point:
//   E1 = 0 (eigenvector |D>), E_{2..5} = {+,-} sqrt((a^2 {+,-} b^2)/2),
// with a, b^2, c from SystemParams. Eigenvalues are returned ascending.
// The degenerate case a^2 = b^2 (omega_m or omega_e vanishing) is rejected.
inline EigenDecomposition analytic_eigensystem(const SystemParams& p) {
  const double om = p.omega_m, oe = p.omega_e();
  const double a2 = p.a() * p.a(), b2 = p.b_sq(), c2 = p.c() * p.c();
  detail::require(std::abs(a2 - b2) > 1e-14 * std::max(a2, 1e-300),
                  "analytic_eigensystem: degenerate spectrum (omega_m or omega_e vanishes)");

  struct Entry { double e; Ket v; };
  std::vector<Entry> entries;
  entries.push_back({0.0, named_ket("D", kEffDim)});
  // Unnormalized eigenvector components in (|00>,|B>,|D>,|11>,|rr>),
  // parameterized by the branch signs of b^2 and of the eigenvalue.
  for (int sb : {+1, -1}) {
    const double s = a2 + sb * b2;
    const double e = std::sqrt(s / 2.0);
    for (int se : {+1, -1}) {
      Ket v(kEffDim);
      v[basis::e00] = se * (-2.0 * c2 * std::sqrt(s) + 2.0 * std::pow(s, 1.5));
      v[basis::eB] = 2.0 * om * s - om * oe * oe;
      v[basis::e11] = se * 2.0 * std::sqrt(s) * om * om;
      v[basis::err] = std::sqrt(2.0) * om * om * oe;
      entries.push_back({se * e, v.normalized()});
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& x, const Entry& y) { return x.e < y.e; });

  EigenDecomposition out;
  out.dim = kEffDim;
  out.vectors = Mat(kEffDim);
  for (int k = 0; k < kEffDim; ++k) {
    out.values[static_cast<size_t>(k)] = entries[static_cast<size_t>(k)].e;
    for (int r = 0; r < kEffDim; ++r) out.vectors(r, k) = entries[static_cast<size_t>(k)].v[r];
  }
  return out;
}

// Decay-free evolution in the eigenbasis: |psi(t)> = sum_k C_k e^{-i E_k t}|phi_k>.
inline Ket coherent_evolve_analytic(const Ket& psi0, const SystemParams& p, double t) {
  detail::require(psi0.dim() == kEffDim, "coherent_evolve_analytic: expected dim 5");
  detail::require(std::abs(psi0.norm() - 1.0) <= 1e-12,
                  "coherent_evolve_analytic: psi0 must be normalized");
  const EigenDecomposition es = analytic_eigensystem(p);
  Ket out(kEffDim);
  for (int k = 0; k < kEffDim; ++k) {
    const Ket phi = es.vector(k);
    const cplx ck = inner(phi, psi0);
    const cplx ph = std::exp(cplx(0.0, -es.value(k) * t));
    for (int i = 0; i < kEffDim; ++i) out[i] += ck * ph * phi[i];
  }
  return out;
}

}  // namespace ryd
