#pragma once

// Named basis states of the two-atom system.
//
// Full basis (dim 9): single-atom levels ordered (|0>, |1>, |r>), two-atom
// index = 3*i1 + i2 (atom-1 major).
// Effective basis (dim 5): ordered (|00>, |B>, |D>, |11>, |rr>) with
// |B> = (|01>+|10>)/sqrt(2) and |D> = (|10>-|01>)/sqrt(2).

#include <string>

#include "ryd/matrix.hpp"

namespace ryd {

inline constexpr int kFullDim = 9;
inline constexpr int kEffDim = 5;

inline int full_index(int i1, int i2) { return 3 * i1 + i2; }

namespace basis {
// Effective-basis slot numbers.
inline constexpr int e00 = 0, eB = 1, eD = 2, e11 = 3, err = 4;
}  // namespace basis

// The five effective-basis kets expressed in the 9-dim product basis,
// row k = effective state k. Used to embed/project between the models.
inline Ket effective_row(int k) {
  Ket v(kFullDim);
  const double r = 1.0 / std::sqrt(2.0);
  switch (k) {
    case basis::e00: v[full_index(0, 0)] = 1.0; break;
    case basis::eB:  v[full_index(0, 1)] = r; v[full_index(1, 0)] = r; break;
    case basis::eD:  v[full_index(1, 0)] = r; v[full_index(0, 1)] = -r; break;
    case basis::e11: v[full_index(1, 1)] = 1.0; break;
    case basis::err: v[full_index(2, 2)] = 1.0; break;
    default: detail::require(false, "effective_row: index out of range");
  }
  return v;
}

// A labelled pure state in either basis. Valid labels:
// 00, 01, 10, 11, B, D, rr.
inline Ket named_ket(const std::string& label, int dim) {
  detail::require(dim == kFullDim || dim == kEffDim, "named_ket: dim must be 5 or 9");
  const double r = 1.0 / std::sqrt(2.0);
  if (dim == kFullDim) {
    if (label == "00") return Ket::basis(9, full_index(0, 0));
    if (label == "01") return Ket::basis(9, full_index(0, 1));
    if (label == "10") return Ket::basis(9, full_index(1, 0));
    if (label == "11") return Ket::basis(9, full_index(1, 1));
    if (label == "rr") return Ket::basis(9, full_index(2, 2));
    if (label == "B") return effective_row(basis::eB);
    if (label == "D") return effective_row(basis::eD);
  } else {
    if (label == "00") return Ket::basis(5, basis::e00);
    if (label == "B") return Ket::basis(5, basis::eB);
    if (label == "D") return Ket::basis(5, basis::eD);
    if (label == "11") return Ket::basis(5, basis::e11);
    if (label == "rr") return Ket::basis(5, basis::err);
    if (label == "10") {  // |10> = (|B>+|D>)/sqrt(2)
      Ket v(5); v[basis::eB] = r; v[basis::eD] = r; return v;
    }
    if (label == "01") {  // |01> = (|B>-|D>)/sqrt(2)
      Ket v(5); v[basis::eB] = r; v[basis::eD] = -r; return v;
    }
  }
  detail::require(false, "named_ket: unknown state label '" + label + "'");
  return Ket(dim);  // unreachable
}

// Lift a 5-dim effective-basis ket into the 9-dim product basis.
inline Ket embed_effective(const Ket& v5) {
  detail::require(v5.dim() == kEffDim, "embed_effective: expected dim 5");
  Ket out(kFullDim);
  for (int k = 0; k < kEffDim; ++k) {
    const Ket row = effective_row(k);
    for (int i = 0; i < kFullDim; ++i) out[i] += v5[k] * row[i];
  }
  return out;
}

// Lift a 5-dim effective-basis operator into the 9-dim product basis.
inline Mat embed_effective(const Mat& m5) {
  detail::require(m5.dim() == kEffDim, "embed_effective: expected dim 5");
  Mat out(kFullDim);
  for (int k = 0; k < kEffDim; ++k) {
    const Ket rk = effective_row(k);
    for (int l = 0; l < kEffDim; ++l) {
      const cplx v = m5(k, l);
      if (v == cplx{}) continue;
      const Ket rl = effective_row(l);
      for (int i = 0; i < kFullDim; ++i)
        for (int j = 0; j < kFullDim; ++j)
          out(i, j) += v * rk[i] * std::conj(rl[j]);
    }
  }
  return out;
}

// Project a 9-dim ket / operator onto the 5-dim effective basis.
inline Ket project_effective(const Ket& v9) {
  detail::require(v9.dim() == kFullDim, "project_effective: expected dim 9");
  Ket out(kEffDim);
  for (int k = 0; k < kEffDim; ++k) out[k] = inner(effective_row(k), v9);
  return out;
}

inline Mat project_effective(const Mat& m9) {
  detail::require(m9.dim() == kFullDim, "project_effective: expected dim 9");
  Mat out(kEffDim);
  for (int k = 0; k < kEffDim; ++k) {
    const Ket rk = effective_row(k);
    for (int l = 0; l < kEffDim; ++l) out(k, l) = sandwich(rk, m9, effective_row(l));
  }
  return out;
}

}  // namespace ryd
