#pragma once

// Hermitian eigensolver: cyclic complex Jacobi with phase-rotated 2x2
// sweeps. Plenty for dim <= 9; no external dependency required.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ryd/matrix.hpp"

namespace ryd {

struct EigenDecomposition {
  int dim = 0;
  std::array<double, kMaxDim> values{};  // ascending
  Mat vectors;                           // column k is the k-th eigenvector

  double value(int k) const { return values[static_cast<size_t>(k)]; }
  Ket vector(int k) const {
    Ket v(dim);
    for (int i = 0; i < dim; ++i) v[i] = vectors(i, k);
    return v;
  }
};

// Diagonalizes a Hermitian matrix. Throws if `h` is not Hermitian to
// within 1e-10 relative Frobenius norm.
inline EigenDecomposition hermitian_eigen(const Mat& h) {
  const int n = h.dim();
  const double scale = std::max(h.frobenius(), 1e-300);
  if (hermiticity_defect(h) > 1e-10 * scale)
    throw std::invalid_argument("hermitian_eigen: matrix is not Hermitian");

  Mat a = h;
  Mat v = Mat::identity(n);

  auto off_norm = [&]() {
    double s = 0;
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        if (r != c) s += std::norm(a(r, c));
    return std::sqrt(s);
  };

  const double tol = 1e-13 * scale;
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps && off_norm() > tol; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cplx g = a(p, q);
        const double ag = std::abs(g);
        if (ag <= 1e-300) continue;
        // Phase-align so the 2x2 block is real, then rotate it away.
        const cplx ph = g / ag;            // a(p,q) = ag * ph
        const double alpha = a(p, p).real();
        const double beta = a(q, q).real();
        const double tau = (beta - alpha) / (2.0 * ag);
        const double t = (tau >= 0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx w = std::conj(ph);  // maps e_q -> phase-aligned partner
        // Column update: new_p = c*col_p - s*w*col_q ; new_q = s*col_p + c*w*col_q
        for (int r = 0; r < n; ++r) {
          const cplx ap = a(r, p), aq = a(r, q);
          a(r, p) = c * ap - s * (w * aq);
          a(r, q) = s * ap + c * (w * aq);
          const cplx vp = v(r, p), vq = v(r, q);
          v(r, p) = c * vp - s * (w * vq);
          v(r, q) = s * vp + c * (w * vq);
        }
        // Row update with conjugated coefficients (A <- U^dag A U).
        for (int col = 0; col < n; ++col) {
          const cplx ap = a(p, col), aq = a(q, col);
          a(p, col) = c * ap - s * (std::conj(w) * aq);
          a(q, col) = s * ap + c * (std::conj(w) * aq);
        }
      }
    }
  }

  EigenDecomposition out;
  out.dim = n;
  std::array<int, kMaxDim> order{};
  std::iota(order.begin(), order.begin() + n, 0);
  std::sort(order.begin(), order.begin() + n,
            [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });
  out.vectors = Mat(n);
  for (int k = 0; k < n; ++k) {
    out.values[static_cast<size_t>(k)] = a(order[static_cast<size_t>(k)], order[static_cast<size_t>(k)]).real();
    for (int r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[static_cast<size_t>(k)]);
  }
  return out;
}

// Smallest eigenvalue of a Hermitian matrix (used for positivity checks).
inline double min_eigenvalue(const Mat& h) { return hermitian_eigen(h).value(0); }

}  // namespace ryd
