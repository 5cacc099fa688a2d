#include "doctest.h"

#include <random>

#include "support/chain_helpers.hpp"
#include "support/dense_reference.hpp"
#include "tebd/oracle.hpp"

using namespace tebd;
using testsup::basis_locals;

namespace {

DenseState normalized_random_dense(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  DenseState s;
  s.n = n;
  s.d = 2;
  s.amplitudes = CVector(1L << n);
  for (long i = 0; i < s.amplitudes.size(); ++i)
    s.amplitudes[i] = Complex(gauss(rng), gauss(rng));
  s.amplitudes /= s.amplitudes.norm();
  return s;
}

}  // namespace

TEST_CASE("dense_from_mps on product and Bell states") {
  VidalMps up = VidalMps::product_state(basis_locals(3, 2, {0, 0, 0}));
  DenseState d1 = dense_from_mps(up);
  CHECK(std::abs(d1.amplitudes[0] - Complex(1, 0)) < 1e-14);
  CHECK(d1.amplitudes.tail(7).norm() < 1e-14);

  VidalMps bell = VidalMps::product_state(basis_locals(2, 2, {0, 0}));
  CMatrix u(4, 4);
  const double r = 1.0 / std::sqrt(2.0);
  u << r, 0, 0, r, 0, r, r, 0, 0, r, -r, 0, r, 0, 0, -r;
  bell.apply_two_site_gate(0, u, TruncationPolicy{});
  DenseState d2 = dense_from_mps(bell);
  CHECK(std::abs(d2.amplitudes[0] - Complex(r, 0)) < 1e-14);
  CHECK(std::abs(d2.amplitudes[3] - Complex(r, 0)) < 1e-14);
  CHECK(std::abs(d2.amplitudes[1]) < 1e-14);
  CHECK(std::abs(d2.amplitudes[2]) < 1e-14);
}

TEST_CASE("dense_from_mps preserves inner products") {
  std::mt19937_64 rng(7);
  VidalMps a = testsup::random_circuit_mps(6, 2, 30, rng);
  VidalMps b = testsup::random_circuit_mps(6, 2, 30, rng);
  const Complex direct = inner_product(a, b);
  const Complex densified = dense_overlap(dense_from_mps(a), dense_from_mps(b));
  CHECK(std::abs(direct - densified) < 1e-10);
}

TEST_CASE("dense_from_mps honors the cap") {
  VidalMps psi = VidalMps::product_state(basis_locals(6, 2, {0, 0, 0, 0, 0, 0}));
  CHECK_THROWS_AS(dense_from_mps(psi, 32), std::invalid_argument);
}

TEST_CASE("dense_evolve basics") {
  std::mt19937_64 rng(11);
  LocalHamiltonian h = heisenberg_ferromagnet(6, 0.7, 1.3);
  DenseState psi = normalized_random_dense(6, rng);

  DenseState frozen = dense_evolve(psi, h, 0.0);
  CHECK((frozen.amplitudes - psi.amplitudes).norm() < 1e-12);

  DenseState later = dense_evolve(psi, h, 1.7);
  CHECK(std::abs(later.amplitudes.norm() - 1.0) < 1e-10);

  // Composition: evolve(t1) then evolve(t2) equals evolve(t1 + t2).
  DenseState two_leg = dense_evolve(dense_evolve(psi, h, 0.9), h, 0.8);
  CHECK((two_leg.amplitudes - later.amplitudes).norm() < 1e-10);
}

TEST_CASE("dense_evolve on an eigenstate is a pure phase") {
  LocalHamiltonian h = heisenberg_ferromagnet(5, 1.0, 1.0);
  DenseState gs;
  gs.n = 5;
  gs.d = 2;
  gs.amplitudes = CVector::Zero(32);
  gs.amplitudes[0] = 1.0;  // the polarized product state
  DenseState evolved = dense_evolve(gs, h, 2.3);
  CHECK(std::abs(std::abs(dense_overlap(gs, evolved)) - 1.0) < 1e-12);
  // Energy -Bn - J(n-1) = -9 fixes the phase itself.
  CHECK(std::abs(evolved.amplitudes[0] - std::exp(Complex(0, 9.0 * 2.3))) < 1e-10);
}

TEST_CASE("dense evolution conserves total magnetization") {
  std::mt19937_64 rng(13);
  LocalHamiltonian h = heisenberg_ferromagnet(6, 1.0, 1.0);
  DenseState psi = normalized_random_dense(6, rng);
  DenseState evolved = dense_evolve(psi, h, 1.1);

  auto total_sz = [](const DenseState& s) {
    double acc = 0.0;
    for (long idx = 0; idx < s.amplitudes.size(); ++idx) {
      const int flips = __builtin_popcountll(static_cast<unsigned long long>(idx));
      acc += (s.n - 2 * flips) * std::norm(s.amplitudes[idx]);
    }
    return acc;
  };
  CHECK(std::abs(total_sz(evolved) - total_sz(psi)) < 1e-9);
}

TEST_CASE("two-magnon basis indexing is lexicographic") {
  TwoMagnonBasis basis(5);
  CHECK(basis.dimension() == 10);
  int p = 0;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      CHECK(basis.index(i, j) == p);
      CHECK(basis.sites(p) == std::make_pair(i, j));
      ++p;
    }
}

TEST_CASE("two-magnon propagator: initial condition and unitarity") {
  TwoMagnonPropagator prop(8, 1.0, 1.0);
  TwoMagnonState t0 = prop.evolve({0, 1}, 0.0);
  CHECK(std::abs(t0.amplitudes[prop.basis().index(0, 1)] - Complex(1, 0)) < 1e-12);
  CHECK(std::abs(t0.amplitudes.norm() - 1.0) < 1e-12);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uni(0.0, 10.0);
  for (int rep = 0; rep < 3; ++rep) {
    TwoMagnonState t = prop.evolve({0, 1}, uni(rng));
    CHECK(std::abs(t.amplitudes.norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("two-magnon propagator matches the dense oracle") {
  LocalHamiltonian h = heisenberg_ferromagnet(8, 1.0, 1.0);
  DenseState init;
  init.n = 8;
  init.d = 2;
  init.amplitudes = CVector::Zero(256);
  init.amplitudes[0b11000000] = 1.0;  // flips at sites 0 and 1

  const double t = 3.0;
  DenseState exact = dense_evolve(init, h, t);
  DenseState embedded = embed_two_magnon(two_magnon_evolve(8, 1.0, 1.0, {0, 1}, t));
  CHECK((exact.amplitudes - embedded.amplitudes).norm() < 1e-9);
}

TEST_CASE("two-magnon propagator matches dense across sizes and couplings") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> uni(0.2, 2.0);
  for (int n = 4; n <= 10; n += 2) {
    const double b = uni(rng), j = uni(rng), t = uni(rng) * 3;
    LocalHamiltonian h = heisenberg_ferromagnet(n, b, j);
    DenseState init;
    init.n = n;
    init.d = 2;
    init.amplitudes = CVector::Zero(1L << n);
    init.amplitudes[(1L << (n - 1)) + (1L << (n - 3))] = 1.0;  // flips at 0 and 2
    DenseState exact = dense_evolve(init, h, t);
    DenseState embedded = embed_two_magnon(two_magnon_evolve(n, b, j, {0, 2}, t));
    CHECK((exact.amplitudes - embedded.amplitudes).norm() < 1e-9);
  }
}

TEST_CASE("two-magnon overlap against an MPS equals the densified route") {
  std::mt19937_64 rng(23);
  for (int n : {6, 10}) {
    VidalMps psi = testsup::random_circuit_mps(n, 2, 40, rng);
    TwoMagnonState tm = two_magnon_evolve(n, 1.0, 1.0, {0, 1}, 1.4);
    const Complex direct = two_magnon_overlap(tm, psi);
    const Complex densified = dense_overlap(embed_two_magnon(tm), dense_from_mps(psi));
    CHECK(std::abs(direct - densified) < 1e-10);
  }
}

TEST_CASE("fidelity_error endpoints, symmetry and phase invariance") {
  std::mt19937_64 rng(29);
  DenseState a = normalized_random_dense(5, rng);
  CHECK(fidelity_error(a, a) < 1e-12);

  DenseState b = a;
  b.amplitudes = CVector::Zero(32);
  // Orthogonal by construction: swap support to a configuration a misses.
  a.amplitudes = CVector::Zero(32);
  a.amplitudes[3] = 1.0;
  b.amplitudes[5] = 1.0;
  CHECK(fidelity_error(a, b) == doctest::Approx(1.0));

  DenseState x = normalized_random_dense(5, rng);
  DenseState y = normalized_random_dense(5, rng);
  CHECK(fidelity_error(x, y) == doctest::Approx(fidelity_error(y, x)).epsilon(1e-12));

  std::uniform_real_distribution<double> angle(0.0, 6.28);
  DenseState y_phase = y;
  y_phase.amplitudes *= std::exp(Complex(0, angle(rng)));
  CHECK(fidelity_error(x, y_phase) == doctest::Approx(fidelity_error(x, y)).epsilon(1e-12));
}

TEST_CASE("fidelity_error bridges representations") {
  std::mt19937_64 rng(31);
  const int n = 8;
  TwoMagnonState tm = two_magnon_evolve(n, 1.0, 1.0, {0, 1}, 2.0);
  DenseState dense_tm = embed_two_magnon(tm);

  VidalMps psi = VidalMps::product_state(basis_locals(n, 2, {1, 1, 0, 0, 0, 0, 0, 0}));
  const double direct = fidelity_error(tm, psi);
  const double densified = fidelity_error(dense_tm, psi);
  CHECK(direct == doctest::Approx(densified).epsilon(1e-10));
  CHECK(direct >= -1e-12);
  CHECK(direct <= 1.0);
}
