#pragma once

#include <utility>
#include <vector>

#include "tebd/hamiltonian.hpp"
#include "tebd/mps.hpp"

namespace tebd {

/// Guard against accidentally materializing huge product spaces.
inline constexpr long kDenseCap = 16384;

/// Flat product-basis representation, configuration index
/// sum_l i_l d^(n-1-l), so site 0 is the most significant digit.
struct DenseState {
  int n = 0;
  int d = 0;
  CVector amplitudes;
};

long dense_dimension(int n, int d, long cap = kDenseCap);

/// Evaluates every configuration amplitude of the chain state.
DenseState dense_from_mps(const VidalMps& state, long cap = kDenseCap);

/// Full d^n x d^n matrix of a local Hamiltonian.
CMatrix dense_hamiltonian(const LocalHamiltonian& h, long cap = kDenseCap);

/// Exact evolution exp(-i H t)|psi> by full eigendecomposition.
DenseState dense_evolve(const DenseState& state, const LocalHamiltonian& h, double t,
                        long cap = kDenseCap);

Complex dense_overlap(const DenseState& a, const DenseState& b);

/// Ordered two-flip configurations (i, j), 0 <= i < j < n, lexicographic.
class TwoMagnonBasis {
public:
  explicit TwoMagnonBasis(int n);
  int dimension() const { return n_ * (n_ - 1) / 2; }
  int chain_length() const { return n_; }
  int index(int i, int j) const;
  std::pair<int, int> sites(int p) const { return pairs_.at(p); }

private:
  int n_;
  std::vector<std::pair<int, int>> pairs_;
};

/// Amplitudes over a TwoMagnonBasis; the represented state is
/// sum_p amplitudes[p] |flips at sites(p)>.
struct TwoMagnonState {
  int n = 0;
  CVector amplitudes;
};

/// Exact propagator of the ferromagnetic chain restricted to the two-flip
/// sector, which total-sigma_z conservation keeps closed. One
/// eigendecomposition of the n(n-1)/2 sector matrix at construction,
/// O(n^2) state size afterwards.
class TwoMagnonPropagator {
public:
  TwoMagnonPropagator(int n, double b_field, double j_coupling);

  const TwoMagnonBasis& basis() const { return basis_; }

  /// State at time t starting from the single configuration init_pair.
  TwoMagnonState evolve(std::pair<int, int> init_pair, double t) const;

private:
  TwoMagnonBasis basis_;
  Eigen::MatrixXd vectors_;
  RVector values_;
};

TwoMagnonState two_magnon_evolve(int n, double b_field, double j_coupling,
                                 std::pair<int, int> init_pair, double t);

/// Canonical embedding of a two-flip sector state into the full basis.
DenseState embed_two_magnon(const TwoMagnonState& state, long cap = kDenseCap);

/// <two-magnon|psi> as a sum of n(n-1)/2 chain amplitudes; never builds a
/// d^n vector, so it works at any chain length.
Complex two_magnon_overlap(const TwoMagnonState& a, const VidalMps& b);

/// Fidelity error 1 - |<a|b>|^2 between an exact reference and a simulated
/// state. Symmetric and insensitive to global phases.
double fidelity_error(const DenseState& a, const DenseState& b);
double fidelity_error(const DenseState& a, const VidalMps& b);
double fidelity_error(const TwoMagnonState& a, const VidalMps& b);
double fidelity_error(const TwoMagnonState& a, const DenseState& b);

}  // namespace tebd
