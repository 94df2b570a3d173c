#pragma once

// Dense complex vectors and matrices for Hilbert-space dimensions <= 9.
// Storage is inline (no heap), values are immutable by convention once
// built; all operations are pure functions safe for concurrent use.

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace ryd {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 9;

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}
}  // namespace detail

class Ket {
 public:
  Ket() : n_(0) { a_.fill(cplx{}); }
  explicit Ket(int dim) : n_(dim) {
    detail::require(dim >= 1 && dim <= kMaxDim, "Ket: dim out of range");
    a_.fill(cplx{});
  }

  int dim() const { return n_; }
  cplx& operator[](int i) { return a_[static_cast<size_t>(i)]; }
  const cplx& operator[](int i) const { return a_[static_cast<size_t>(i)]; }

  static Ket basis(int dim, int i) {
    Ket k(dim);
    k[i] = 1.0;
    return k;
  }

  double norm() const {
    double s = 0;
    for (int i = 0; i < n_; ++i) s += std::norm(a_[static_cast<size_t>(i)]);
    return std::sqrt(s);
  }

  Ket normalized() const {
    double nv = norm();
    detail::require(nv > 0, "Ket: cannot normalize zero vector");
    Ket out(n_);
    for (int i = 0; i < n_; ++i) out[i] = a_[static_cast<size_t>(i)] / nv;
    return out;
  }

 private:
  int n_;
  std::array<cplx, kMaxDim> a_;
};

inline cplx inner(const Ket& a, const Ket& b) {
  detail::require(a.dim() == b.dim(), "inner: dimension mismatch");
  cplx s{};
  for (int i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline Ket operator+(const Ket& a, const Ket& b) {
  detail::require(a.dim() == b.dim(), "Ket+: dimension mismatch");
  Ket out(a.dim());
  for (int i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
  return out;
}

inline Ket operator-(const Ket& a, const Ket& b) {
  detail::require(a.dim() == b.dim(), "Ket-: dimension mismatch");
  Ket out(a.dim());
  for (int i = 0; i < a.dim(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Ket operator*(cplx s, const Ket& a) {
  Ket out(a.dim());
  for (int i = 0; i < a.dim(); ++i) out[i] = s * a[i];
  return out;
}

// Dense square complex matrix, row-major, dim <= 9.
class Mat {
 public:
  Mat() : n_(0) { a_.fill(cplx{}); }
  explicit Mat(int dim) : n_(dim) {
    detail::require(dim >= 1 && dim <= kMaxDim, "Mat: dim out of range");
    a_.fill(cplx{});
  }

  int dim() const { return n_; }

  cplx& operator()(int r, int c) { return a_[static_cast<size_t>(r * n_ + c)]; }
  const cplx& operator()(int r, int c) const {
    return a_[static_cast<size_t>(r * n_ + c)];
  }

  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }

  static Mat identity(int dim) {
    Mat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static Mat outer(const Ket& u, const Ket& v) {
    detail::require(u.dim() == v.dim(), "outer: dimension mismatch");
    Mat m(u.dim());
    for (int r = 0; r < u.dim(); ++r)
      for (int c = 0; c < u.dim(); ++c) m(r, c) = u[r] * std::conj(v[c]);
    return m;
  }

  Mat dagger() const {
    Mat out(n_);
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c) out(r, c) = std::conj((*this)(c, r));
    return out;
  }

  cplx trace() const {
    cplx s{};
    for (int i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
  }

  double frobenius() const {
    double s = 0;
    for (int i = 0; i < n_ * n_; ++i) s += std::norm(a_[static_cast<size_t>(i)]);
    return std::sqrt(s);
  }

  Mat& operator+=(const Mat& o) {
    detail::require(n_ == o.n_, "Mat+=: dimension mismatch");
    for (int i = 0; i < n_ * n_; ++i) a_[static_cast<size_t>(i)] += o.a_[static_cast<size_t>(i)];
    return *this;
  }
  Mat& operator-=(const Mat& o) {
    detail::require(n_ == o.n_, "Mat-=: dimension mismatch");
    for (int i = 0; i < n_ * n_; ++i) a_[static_cast<size_t>(i)] -= o.a_[static_cast<size_t>(i)];
    return *this;
  }
  Mat& operator*=(cplx s) {
    for (int i = 0; i < n_ * n_; ++i) a_[static_cast<size_t>(i)] *= s;
    return *this;
  }

 private:
  int n_;
  std::array<cplx, kMaxDim * kMaxDim> a_;
};

inline Mat operator+(Mat a, const Mat& b) { return a += b; }
inline Mat operator-(Mat a, const Mat& b) { return a -= b; }
inline Mat operator*(cplx s, Mat a) { return a *= s; }
inline Mat operator*(double s, Mat a) { return a *= cplx(s, 0); }

// out = a * b. Skips zero rows of `a` cheaply; `out` must not alias inputs.
inline void mul_into(Mat& out, const Mat& a, const Mat& b) {
  const int n = a.dim();
  detail::require(n == b.dim(), "mul: dimension mismatch");
  if (out.dim() != n) out = Mat(n);
  cplx* o = out.data();
  const cplx* bp = b.data();
  for (int i = 0; i < n; ++i) {
    cplx* orow = o + i * n;
    for (int j = 0; j < n; ++j) orow[j] = cplx{};
    const cplx* arow = a.data() + i * n;
    for (int k = 0; k < n; ++k) {
      const cplx s = arow[k];
      if (s.real() == 0.0 && s.imag() == 0.0) continue;
      const cplx* brow = bp + k * n;
      for (int j = 0; j < n; ++j) orow[j] += s * brow[j];
    }
  }
}

inline Mat operator*(const Mat& a, const Mat& b) {
  Mat out(a.dim());
  mul_into(out, a, b);
  return out;
}

inline Ket operator*(const Mat& m, const Ket& v) {
  detail::require(m.dim() == v.dim(), "Mat*Ket: dimension mismatch");
  Ket out(m.dim());
  for (int r = 0; r < m.dim(); ++r) {
    cplx s{};
    for (int c = 0; c < m.dim(); ++c) s += m(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

// <u| m |v>
inline cplx sandwich(const Ket& u, const Mat& m, const Ket& v) {
  return inner(u, m * v);
}

// Kronecker product; basis order is (first-factor index) major.
inline Mat tensor(const Mat& a, const Mat& b) {
  const int na = a.dim(), nb = b.dim();
  detail::require(na * nb <= kMaxDim, "tensor: product dimension exceeds 9");
  Mat out(na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      for (int k = 0; k < nb; ++k)
        for (int l = 0; l < nb; ++l)
          out(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
  return out;
}

inline Ket tensor(const Ket& a, const Ket& b) {
  detail::require(a.dim() * b.dim() <= kMaxDim, "tensor: product dimension exceeds 9");
  Ket out(a.dim() * b.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int k = 0; k < b.dim(); ++k) out[i * b.dim() + k] = a[i] * b[k];
  return out;
}

inline Mat commutator(const Mat& a, const Mat& b) {
  detail::require(a.dim() == b.dim(), "commutator: dimension mismatch");
  return a * b - b * a;
}

inline double hermiticity_defect(const Mat& m) {
  double s = 0;
  for (int r = 0; r < m.dim(); ++r)
    for (int c = 0; c < m.dim(); ++c) s += std::norm(m(r, c) - std::conj(m(c, r)));
  return std::sqrt(s);
}

}  // namespace ryd
