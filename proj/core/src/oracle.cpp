#include "tebd/oracle.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace tebd {

long dense_dimension(int n, int d, long cap) {
  long dim = 1;
  for (int l = 0; l < n; ++l) {
    dim *= d;
    if (dim > cap)
      throw std::invalid_argument("dense oracle: d^n exceeds the configured cap");
  }
  return dim;
}

DenseState dense_from_mps(const VidalMps& state, long cap) {
  const int n = state.size(), d = state.phys_dim();
  const long dim = dense_dimension(n, d, cap);

  // Fold sites in from the left; row r enumerates the prefix configuration.
  CMatrix v = CMatrix::Ones(1, 1);
  for (int l = 0; l < n; ++l) {
    const Tensor3& g = state.gamma(l);
    const RVector& lam = state.lambda(l + 1);
    CMatrix next(v.rows() * d, g.right());
    for (int i = 0; i < d; ++i) {
      CMatrix gi(g.left(), g.right());
      for (int a = 0; a < g.left(); ++a)
        for (int b = 0; b < g.right(); ++b) gi(a, b) = g(a, i, b) * lam[b];
      const CMatrix block = v * gi;
      for (Eigen::Index r = 0; r < v.rows(); ++r) next.row(r * d + i) = block.row(r);
    }
    v = std::move(next);
  }

  DenseState out;
  out.n = n;
  out.d = d;
  out.amplitudes = v.col(0);
  if (out.amplitudes.size() != dim)
    throw std::runtime_error("dense_from_mps: dimension bookkeeping failed");
  return out;
}

CMatrix dense_hamiltonian(const LocalHamiltonian& h, long cap) {
  h.validate();
  const long dim = dense_dimension(h.n, h.d, cap);
  auto embed = [&](const CMatrix& term, int first_site, int span) {
    long left = 1, right = 1;
    for (int l = 0; l < first_site; ++l) left *= h.d;
    for (int l = first_site + span; l < h.n; ++l) right *= h.d;
    return kron(kron(CMatrix::Identity(left, left), term),
                CMatrix::Identity(right, right));
  };
  CMatrix full = CMatrix::Zero(dim, dim);
  for (int l = 0; l < h.n; ++l) full += embed(h.k1[l], l, 1);
  for (int b = 0; b < h.n - 1; ++b) full += embed(h.k2[b], b, 2);
  return full;
}

DenseState dense_evolve(const DenseState& state, const LocalHamiltonian& h, double t,
                        long cap) {
  const long dim = dense_dimension(h.n, h.d, cap);
  if (state.amplitudes.size() != dim || state.n != h.n || state.d != h.d)
    throw std::invalid_argument("dense_evolve: state and Hamiltonian shapes differ");

  const CMatrix full = dense_hamiltonian(h, cap);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(full);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("dense_evolve: eigendecomposition failed");

  CVector modal = eig.eigenvectors().adjoint() * state.amplitudes;
  for (Eigen::Index k = 0; k < modal.size(); ++k)
    modal[k] *= std::exp(Complex(0, -eig.eigenvalues()[k] * t));

  DenseState out = state;
  out.amplitudes = eig.eigenvectors() * modal;
  return out;
}

Complex dense_overlap(const DenseState& a, const DenseState& b) {
  if (a.n != b.n || a.d != b.d)
    throw std::invalid_argument("dense_overlap: shape mismatch");
  return a.amplitudes.dot(b.amplitudes);  // Eigen's dot conjugates the left side
}

TwoMagnonBasis::TwoMagnonBasis(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("TwoMagnonBasis: need at least two sites");
  pairs_.reserve(dimension());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs_.emplace_back(i, j);
}

int TwoMagnonBasis::index(int i, int j) const {
  if (i < 0 || j <= i || j >= n_)
    throw std::invalid_argument("TwoMagnonBasis: pair out of range");
  // Pairs with first site < i come first, then (i, i+1) .. (i, j).
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

TwoMagnonPropagator::TwoMagnonPropagator(int n, double b_field, double j_coupling)
    : basis_(n) {
  const int m = basis_.dimension();
  Eigen::MatrixXd sector = Eigen::MatrixXd::Zero(m, m);

  for (int p = 0; p < m; ++p) {
    const auto [i, j] = basis_.sites(p);
    double zz_sum = 0.0;
    for (int a = 0; a < n - 1; ++a) {
      const int touched = (a == i || a == j ? 1 : 0) + (a + 1 == i || a + 1 == j ? 1 : 0);
      zz_sum += touched == 1 ? -1.0 : 1.0;
      if (touched == 1) {
        // The flip on this bond hops to the unflipped neighbor with the
        // exchange amplitude 2 of sigma.sigma.
        const int from = (a == i || a == j) ? a : a + 1;
        const int to = (a == i || a == j) ? a + 1 : a;
        const int other = (from == i) ? j : i;  // the flip that stays put
        const int lo = std::min(other, to), hi = std::max(other, to);
        sector(basis_.index(lo, hi), p) += -2.0 * j_coupling;
      }
    }
    sector(p, p) += -b_field * static_cast<double>(n - 4) - j_coupling * zz_sum;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sector);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("TwoMagnonPropagator: eigendecomposition failed");
  vectors_ = eig.eigenvectors();
  values_ = eig.eigenvalues();
}

TwoMagnonState TwoMagnonPropagator::evolve(std::pair<int, int> init_pair, double t) const {
  const int m = basis_.dimension();
  Eigen::VectorXd init = Eigen::VectorXd::Zero(m);
  init[basis_.index(init_pair.first, init_pair.second)] = 1.0;

  Eigen::VectorXd modal = vectors_.transpose() * init;
  CVector out(m);
  for (int k = 0; k < m; ++k)
    out[k] = modal[k] * std::exp(Complex(0, -values_[k] * t));

  TwoMagnonState state;
  state.n = basis_.chain_length();
  state.amplitudes = vectors_ * out;
  return state;
}

TwoMagnonState two_magnon_evolve(int n, double b_field, double j_coupling,
                                 std::pair<int, int> init_pair, double t) {
  return TwoMagnonPropagator(n, b_field, j_coupling).evolve(init_pair, t);
}

DenseState embed_two_magnon(const TwoMagnonState& state, long cap) {
  const TwoMagnonBasis basis(state.n);
  const long dim = dense_dimension(state.n, 2, cap);
  DenseState out;
  out.n = state.n;
  out.d = 2;
  out.amplitudes = CVector::Zero(dim);
  for (int p = 0; p < basis.dimension(); ++p) {
    const auto [i, j] = basis.sites(p);
    const long config = (1L << (state.n - 1 - i)) + (1L << (state.n - 1 - j));
    out.amplitudes[config] = state.amplitudes[p];
  }
  return out;
}

Complex two_magnon_overlap(const TwoMagnonState& a, const VidalMps& b) {
  if (a.n != b.size() || b.phys_dim() != 2)
    throw std::invalid_argument("two_magnon_overlap: shape mismatch");
  const TwoMagnonBasis basis(a.n);
  std::vector<int> config(a.n, 0);
  Complex acc(0, 0);
  for (int p = 0; p < basis.dimension(); ++p) {
    const auto [i, j] = basis.sites(p);
    config[i] = 1;
    config[j] = 1;
    acc += std::conj(a.amplitudes[p]) * b.amplitude(config);
    config[i] = 0;
    config[j] = 0;
  }
  return acc;
}

double fidelity_error(const DenseState& a, const DenseState& b) {
  return 1.0 - std::norm(dense_overlap(a, b));
}

double fidelity_error(const DenseState& a, const VidalMps& b) {
  return fidelity_error(a, dense_from_mps(b));
}

double fidelity_error(const TwoMagnonState& a, const VidalMps& b) {
  return 1.0 - std::norm(two_magnon_overlap(a, b));
}

double fidelity_error(const TwoMagnonState& a, const DenseState& b) {
  return 1.0 - std::norm(dense_overlap(embed_two_magnon(a), b));
}

}  // namespace tebd
