// Linear-algebra primitives: tensor products, commutators, Jacobi eigensolver.

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "ryd/eigen.hpp"
#include "ryd/matrix.hpp"
#include "ryd/model.hpp"

using namespace ryd;

namespace {

Mat random_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Mat m(n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m(r, c) = cplx(nd(rng), nd(rng));
  return m;
}

Mat random_hermitian(int n, std::mt19937_64& rng) {
  const Mat m = random_matrix(n, rng);
  return 0.5 * (m + m.dagger());
}

}  // namespace

TEST_CASE("tensor of identities is the identity") {
  const Mat i2 = Mat::identity(2);
  const Mat t = tensor(i2, i2);
  REQUIRE(t.dim() == 4);
  REQUIRE((t - Mat::identity(4)).frobenius() == 0.0);
}

TEST_CASE("tensor ordering: atom-1 major") {
  // (|0><1| (x) I3) |1r> = |0r>
  Mat s01(3);
  s01(0, 1) = 1.0;
  const Mat op = tensor(s01, Mat::identity(3));
  const Ket in = Ket::basis(9, 3 * 1 + 2);   // |1r>
  const Ket expect = Ket::basis(9, 3 * 0 + 2);  // |0r>
  const Ket out = op * in;
  REQUIRE((out - expect).norm() == 0.0);
}

TEST_CASE("tensor entries match the index-by-index definition") {
  std::mt19937_64 rng(7);
  const Mat a = random_matrix(3, rng);
  const Mat b = random_matrix(3, rng);
  const Mat t = tensor(a, b);
  REQUIRE(t(2, 5) == a(0, 1) * b(2, 2));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          REQUIRE(t(3 * i + k, 3 * j + l) == a(i, j) * b(k, l));
}

TEST_CASE("tensor dimension is multiplicative and bounded") {
  REQUIRE(tensor(Mat::identity(3), Mat::identity(3)).dim() == 9);
  REQUIRE_THROWS(tensor(Mat::identity(5), Mat::identity(2)));
}

TEST_CASE("commutator of a matrix with itself vanishes") {
  std::mt19937_64 rng(11);
  const Mat a = random_matrix(4, rng);
  REQUIRE(commutator(a, a).frobenius() <= 1e-14);
}

TEST_CASE("Pauli commutator [sx, sy] = 2i sz") {
  Mat sx(2), sy(2), sz(2);
  sx(0, 1) = sx(1, 0) = 1.0;
  sy(0, 1) = cplx(0, -1);
  sy(1, 0) = cplx(0, 1);
  sz(0, 0) = 1.0;
  sz(1, 1) = -1.0;
  REQUIRE((commutator(sx, sy) - cplx(0, 2) * sz).frobenius() <= 1e-15);
}

TEST_CASE("commutator of Hermitian matrices is anti-Hermitian and traceless") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat a = random_hermitian(5, rng);
    const Mat b = random_hermitian(5, rng);
    const Mat x = commutator(a, b);
    REQUIRE((x + x.dagger()).frobenius() <= 1e-12);
    REQUIRE(std::abs(x.trace()) <= 1e-12);
  }
  REQUIRE_THROWS(commutator(Mat::identity(3), Mat::identity(4)));
}

TEST_CASE("eigen: diagonal input sorted ascending") {
  Mat d(3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = 2.0;
  const auto es = hermitian_eigen(d);
  REQUIRE(es.value(0) == Catch::Approx(1.0).margin(1e-14));
  REQUIRE(es.value(1) == Catch::Approx(2.0).margin(1e-14));
  REQUIRE(es.value(2) == Catch::Approx(3.0).margin(1e-14));
}

TEST_CASE("eigen: effective Hamiltonian at omega_m = omega_e/2") {
  SystemParams p;
  p.delta_r = 50.0;      // omega_e = 0.02
  p.omega_m = 0.01;      // = omega_e / 2
  p.delta_m = p.omega_e() / 4.0;
  // a = sqrt(2) om, b^2 = sqrt(2) om^2, c = sqrt(3) om
  const double om = p.omega_m;
  REQUIRE(p.a() == Catch::Approx(std::sqrt(2.0) * om).epsilon(1e-14));
  REQUIRE(p.b_sq() == Catch::Approx(std::sqrt(2.0) * om * om).epsilon(1e-14));
  REQUIRE(p.c() == Catch::Approx(std::sqrt(3.0) * om).epsilon(1e-14));
  const double a2 = p.a() * p.a(), b2 = p.b_sq();
  const auto es = hermitian_eigen(build_effective_hamiltonian(p));
  const double e2 = std::sqrt((a2 + b2) / 2.0);
  const double e3 = std::sqrt((a2 - b2) / 2.0);
  REQUIRE(es.value(0) == Catch::Approx(-e2).margin(1e-12));
  REQUIRE(es.value(1) == Catch::Approx(-e3).margin(1e-12));
  REQUIRE(es.value(2) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(es.value(3) == Catch::Approx(e3).margin(1e-12));
  REQUIRE(es.value(4) == Catch::Approx(e2).margin(1e-12));
}

TEST_CASE("eigen: random 9x9 reconstruction and orthonormality") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat h = random_hermitian(9, rng);
    const auto es = hermitian_eigen(h);
    Mat rec(9);
    for (int k = 0; k < 9; ++k) {
      const Ket v = es.vector(k);
      rec += es.value(k) * Mat::outer(v, v);
      REQUIRE((h * v - cplx(es.value(k), 0) * v).norm() <= 1e-10 * h.frobenius());
      for (int j = 0; j < k; ++j)
        REQUIRE(std::abs(inner(es.vector(j), v)) <= 1e-10);
    }
    REQUIRE((rec - h).frobenius() <= 1e-9);
  }
}

TEST_CASE("eigen: eigenvalues invariant under unitary conjugation") {
  std::mt19937_64 rng(23);
  const Mat h = random_hermitian(7, rng);
  const auto es = hermitian_eigen(h);
  // Unitary from another decomposition.
  const Mat u = hermitian_eigen(random_hermitian(7, rng)).vectors;
  const Mat conj = u.dagger() * h * u;
  const auto es2 = hermitian_eigen(conj);
  for (int k = 0; k < 7; ++k)
    REQUIRE(std::abs(es.value(k) - es2.value(k)) <= 1e-10);
}

TEST_CASE("eigen: non-Hermitian input rejected") {
  std::mt19937_64 rng(29);
  const Mat m = random_matrix(4, rng);
  REQUIRE_THROWS(hermitian_eigen(m));
}
