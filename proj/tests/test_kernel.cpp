#include "doctest.h"

#include <numbers>

#include <random>

#include "support/dense_reference.hpp"
#include "tebd/kernel.hpp"

using namespace tebd;
using testsup::random_hermitian;

namespace {

CMatrix random_complex(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
  return m;
}

Tensor3 random_tensor(int left, int phys, int right, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Tensor3 t(left, phys, right);
  for (int a = 0; a < left; ++a)
    for (int i = 0; i < phys; ++i)
      for (int b = 0; b < right; ++b) t(a, i, b) = Complex(gauss(rng), gauss(rng));
  return t;
}

RVector random_positive(int size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  RVector v(size);
  for (int i = 0; i < size; ++i) v[i] = uni(rng);
  return v;
}

// Index-by-index contraction, the reference for contract_bond_gate.
CMatrix naive_bond_contraction(const RVector& ll, const Tensor3& gl, const RVector& lm,
                               const Tensor3& gr, const RVector& lr, const CMatrix& gate) {
  const int chi_l = gl.left(), chi_m = gl.right(), chi_r = gr.right(), d = gl.phys();
  CMatrix theta = CMatrix::Zero(chi_l * d, d * chi_r);
  for (int a = 0; a < chi_l; ++a)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int c = 0; c < chi_r; ++c) {
          Complex acc(0, 0);
          for (int ip = 0; ip < d; ++ip)
            for (int jp = 0; jp < d; ++jp)
              for (int b = 0; b < chi_m; ++b)
                acc += gate(i * d + j, ip * d + jp) * ll[a] * gl(a, ip, b) * lm[b] *
                       gr(b, jp, c) * lr[c];
          theta(a * d + i, j * chi_r + c) = acc;
        }
  return theta;
}

CMatrix taylor_expm(const CMatrix& h, Complex scale) {
  CMatrix term = CMatrix::Identity(h.rows(), h.cols());
  CMatrix sum = term;
  for (int k = 1; k < 80; ++k) {
    term = (scale / static_cast<double>(k)) * (h * term);
    sum += term;
    if (max_abs(term) < 1e-18) break;
  }
  return sum;
}

}  // namespace

TEST_CASE("svd of the identity") {
  SvdResult f = svd(CMatrix::Identity(3, 3));
  REQUIRE(f.s.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(f.s[i] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("svd of the rank-1 symmetric matrix") {
  CMatrix m(2, 2);
  m << 1, 1, 1, 1;
  SvdResult f = svd(m);
  CHECK(f.s[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.s[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("svd reconstruction and Gram spectrum on random input") {
  std::mt19937_64 rng(7);
  CMatrix m = random_complex(6, 4, rng);
  SvdResult f = svd(m);

  CMatrix rebuilt = f.u * f.s.asDiagonal() * f.vh;
  CHECK(max_abs(rebuilt - m) < 1e-12 * f.s[0]);
  CHECK(unitarity_defect(f.u) < 1e-12);
  CHECK(unitarity_defect(f.vh.adjoint()) < 1e-12);

  for (int i = 1; i < f.s.size(); ++i) CHECK(f.s[i] <= f.s[i - 1]);

  // Independent route: squared singular values are the eigenvalues of m†m.
  Eigen::SelfAdjointEigenSolver<CMatrix> gram(m.adjoint() * m);
  Eigen::VectorXd expected = gram.eigenvalues().reverse();
  for (int i = 0; i < f.s.size(); ++i)
    CHECK(f.s[i] * f.s[i] == doctest::Approx(expected[i]).scale(1.0).epsilon(1e-10));
}

TEST_CASE("svd rejects non-finite input") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = Complex(std::numeric_limits<double>::quiet_NaN(), 0);
  CHECK_THROWS_AS(svd(m), std::invalid_argument);
}

TEST_CASE("expm_hermitian of zero is the identity") {
  for (int dim : {1, 2, 4}) {
    CMatrix e = expm_hermitian(CMatrix::Zero(dim, dim), Complex(0, -0.7));
    CHECK(max_abs(e - CMatrix::Identity(dim, dim)) < 1e-14);
  }
}

TEST_CASE("expm_hermitian diagonal analytic case") {
  CMatrix sz(2, 2);
  sz << 1, 0, 0, -1;
  CMatrix e = expm_hermitian(sz, Complex(0, -std::numbers::pi / 2));
  CHECK(std::abs(e(0, 0) - std::exp(Complex(0, -std::numbers::pi / 2))) < 1e-14);
  CHECK(std::abs(e(1, 1) - std::exp(Complex(0, std::numbers::pi / 2))) < 1e-14);
  CHECK(std::abs(e(0, 1)) < 1e-14);
  CHECK(std::abs(e(1, 0)) < 1e-14);
}

TEST_CASE("expm_hermitian matches a power-series evaluation") {
  CMatrix sx(2, 2);
  sx << 0, 1, 1, 0;
  const Complex scale(0, -0.3);
  CHECK(max_abs(expm_hermitian(sx, scale) - taylor_expm(sx, scale)) < 1e-12);
}

TEST_CASE("expm_hermitian rejects non-Hermitian input") {
  CMatrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS(expm_hermitian(m, Complex(0, -1)), std::invalid_argument);
}

TEST_CASE("expm_hermitian unitarity and additivity on random Hermitian input") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 5; ++rep) {
    CMatrix h = random_hermitian(4, rng);
    CMatrix u = expm_hermitian(h, Complex(0, -0.37));
    CHECK(unitarity_defect(u) < 1e-12);

    const Complex s1(0, -0.2), s2(0, -0.55);
    CMatrix lhs = expm_hermitian(h, s1) * expm_hermitian(h, s2);
    CMatrix rhs = expm_hermitian(h, s1 + s2);
    CHECK(max_abs(lhs - rhs) < 1e-11);
  }
}

TEST_CASE("contract_bond_gate with bond dimension 1 is an outer product") {
  const int d = 2;
  Tensor3 gl(1, d, 1), gr(1, d, 1);
  for (int i = 0; i < d; ++i) {
    gl(0, i, 0) = 1.0;
    gr(0, i, 0) = 1.0;
  }
  RVector one = RVector::Ones(1);
  CMatrix theta =
      contract_bond_gate(one, gl, one, gr, one, CMatrix::Identity(d * d, d * d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) CHECK(std::abs(theta(i, j) - Complex(1, 0)) < 1e-15);
}

TEST_CASE("contract_bond_gate matches the naive loop oracle") {
  std::mt19937_64 rng(23);
  const int d = 2, chi = 3;
  Tensor3 gl = random_tensor(chi, d, chi, rng);
  Tensor3 gr = random_tensor(chi, d, chi, rng);
  RVector ll = random_positive(chi, rng), lm = random_positive(chi, rng),
          lr = random_positive(chi, rng);
  CMatrix gate = testsup::random_unitary(d * d, rng);

  CMatrix got = contract_bond_gate(ll, gl, lm, gr, lr, gate);
  CMatrix expected = naive_bond_contraction(ll, gl, lm, gr, lr, gate);
  CHECK(max_abs(got - expected) < 1e-12);
}

TEST_CASE("contract_bond_gate with identity gate equals the bare contraction") {
  std::mt19937_64 rng(31);
  const int d = 3;
  Tensor3 gl = random_tensor(2, d, 4, rng);
  Tensor3 gr = random_tensor(4, d, 2, rng);
  RVector ll = random_positive(2, rng), lm = random_positive(4, rng),
          lr = random_positive(2, rng);

  const CMatrix id = CMatrix::Identity(d * d, d * d);
  CMatrix with_gate = contract_bond_gate(ll, gl, lm, gr, lr, id);
  CMatrix bare = naive_bond_contraction(ll, gl, lm, gr, lr, id);
  CHECK(max_abs(with_gate - bare) < 1e-12);
}

TEST_CASE("contract_bond_gate equals the oracle for all small shapes") {
  std::mt19937_64 rng(41);
  for (int d : {2, 3}) {
    for (int chi_l : {1, 2, 4})
      for (int chi_m : {1, 3, 4})
        for (int chi_r : {1, 2, 4}) {
          Tensor3 gl = random_tensor(chi_l, d, chi_m, rng);
          Tensor3 gr = random_tensor(chi_m, d, chi_r, rng);
          RVector ll = random_positive(chi_l, rng), lm = random_positive(chi_m, rng),
                  lr = random_positive(chi_r, rng);
          CMatrix gate = random_complex(d * d, d * d, rng);
          CMatrix got = contract_bond_gate(ll, gl, lm, gr, lr, gate);
          CMatrix expected = naive_bond_contraction(ll, gl, lm, gr, lr, gate);
          CHECK(max_abs(got - expected) < 1e-12);
        }
  }
}

TEST_CASE("contract_bond_gate rejects mismatched dimensions") {
  std::mt19937_64 rng(5);
  Tensor3 gl = random_tensor(2, 2, 3, rng);
  Tensor3 gr = random_tensor(4, 2, 2, rng);  // 3 != 4 breaks the chain
  RVector ll = random_positive(2, rng), lm = random_positive(3, rng),
          lr = random_positive(2, rng);
  CHECK_THROWS_AS(contract_bond_gate(ll, gl, lm, gr, lr, CMatrix::Identity(4, 4)),
                  std::invalid_argument);
}
