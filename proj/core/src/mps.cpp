#include "tebd/mps.hpp"

#include <cmath>

namespace tebd {

namespace {
constexpr double kNoiseFloor = 1e-14;   // relative cutoff for SVD noise
constexpr double kDivisorFloor = 1e-12; // lambda entries below this never divide
}  // namespace

VidalMps VidalMps::product_state(const std::vector<CVector>& locals) {
  if (locals.size() < 2)
    throw std::invalid_argument("product_state: need at least two sites");
  const int n = static_cast<int>(locals.size());
  const int d = static_cast<int>(locals[0].size());
  if (d < 2) throw std::invalid_argument("product_state: local dimension must be >= 2");

  VidalMps psi;
  psi.n_ = n;
  psi.d_ = d;
  psi.gammas_.reserve(n);
  for (int l = 0; l < n; ++l) {
    if (locals[l].size() != d)
      throw std::invalid_argument("product_state: local dimensions are not uniform");
    if (std::abs(locals[l].norm() - 1.0) > 1e-12)
      throw std::invalid_argument("product_state: local vector is not normalized");
    Tensor3 g(1, d, 1);
    for (int i = 0; i < d; ++i) g(0, i, 0) = locals[l][i];
    psi.gammas_.push_back(std::move(g));
  }
  psi.lambdas_.assign(n + 1, RVector::Ones(1));
  return psi;
}

void VidalMps::check_site(int site) const {
  if (site < 0 || site >= n_)
    throw std::invalid_argument("site index out of range");
}

const RVector& VidalMps::schmidt_spectrum(int bond) const {
  if (bond < 0 || bond >= n_ - 1)
    throw std::invalid_argument("schmidt_spectrum: bond index out of range");
  return lambdas_[bond + 1];
}

std::vector<int> VidalMps::bond_ranks() const {
  std::vector<int> ranks(n_ - 1);
  for (int b = 0; b < n_ - 1; ++b) ranks[b] = static_cast<int>(lambdas_[b + 1].size());
  return ranks;
}

int VidalMps::max_rank() const {
  int chi = 1;
  for (int b = 0; b < n_ - 1; ++b) chi = std::max(chi, static_cast<int>(lambdas_[b + 1].size()));
  return chi;
}

void VidalMps::apply_single_site_gate(int site, const CMatrix& u, bool allow_nonunitary) {
  check_site(site);
  if (u.rows() != d_ || u.cols() != d_)
    throw std::invalid_argument("apply_single_site_gate: operator must be d x d");
  if (!allow_nonunitary && unitarity_defect(u) > 1e-10)
    throw std::invalid_argument("apply_single_site_gate: operator is not unitary");

  Tensor3& g = gammas_[site];
  const int chi_l = g.left(), chi_r = g.right();
  std::vector<Complex> col(d_);
  for (int a = 0; a < chi_l; ++a)
    for (int b = 0; b < chi_r; ++b) {
      for (int i = 0; i < d_; ++i) col[i] = g(a, i, b);
      for (int i = 0; i < d_; ++i) {
        Complex acc(0, 0);
        for (int j = 0; j < d_; ++j) acc += u(i, j) * col[j];
        g(a, i, b) = acc;
      }
    }
}

double VidalMps::apply_two_site_gate(int bond, const CMatrix& gate,
                                     const TruncationPolicy& policy) {
  if (bond < 0 || bond >= n_ - 1)
    throw std::invalid_argument("apply_two_site_gate: bond index out of range");
  if (gate.rows() != d_ * d_ || gate.cols() != d_ * d_)
    throw std::invalid_argument("apply_two_site_gate: gate must be d^2 x d^2");
  if (policy.chi_max < 1)
    throw std::invalid_argument("apply_two_site_gate: chi_max must be positive");

  const RVector& l_left = lambdas_[bond];
  const RVector& l_right = lambdas_[bond + 2];
  const Tensor3& g_left = gammas_[bond];
  const Tensor3& g_right = gammas_[bond + 1];
  const int chi_l = g_left.left();
  const int chi_r = g_right.right();

  CMatrix theta = contract_bond_gate(l_left, g_left, lambdas_[bond + 1], g_right, l_right, gate);
  SvdResult f = svd(theta);

  const int full = static_cast<int>(f.s.size());
  const double s0 = f.s[0];
  if (!(s0 > 0))
    throw std::runtime_error("apply_two_site_gate: update annihilated the state");

  // Suffix weights, accumulated from the smallest singular value upward
  // (descending index) so the reported discard is reproducible exactly.
  std::vector<double> suffix(full + 1, 0.0);
  for (int i = full - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + f.s[i] * f.s[i];

  int keep = full;
  while (keep > 1 && f.s[keep - 1] < kNoiseFloor * s0) --keep;
  // Smallest rank whose discard stays within tolerance, then the hard cap.
  while (keep > 1 && suffix[keep - 1] <= policy.weight_tol) --keep;
  keep = std::min(keep, policy.chi_max);

  const double discarded = suffix[keep];

  RVector s_new = f.s.head(keep);
  if (policy.renormalize) {
    double retained = 0.0;
    for (int i = 0; i < keep; ++i) retained += f.s[i] * f.s[i];
    s_new /= std::sqrt(retained);
  }

  Tensor3 new_left(chi_l, d_, keep);
  for (int a = 0; a < chi_l; ++a) {
    const bool dead = l_left[a] < kDivisorFloor;
    for (int i = 0; i < d_; ++i)
      for (int b = 0; b < keep; ++b)
        new_left(a, i, b) = dead ? Complex(0, 0) : f.u(a * d_ + i, b) / l_left[a];
  }
  Tensor3 new_right(keep, d_, chi_r);
  for (int b = 0; b < keep; ++b)
    for (int j = 0; j < d_; ++j)
      for (int c = 0; c < chi_r; ++c)
        new_right(b, j, c) =
            l_right[c] < kDivisorFloor ? Complex(0, 0) : f.vh(b, j * chi_r + c) / l_right[c];

  gammas_[bond] = std::move(new_left);
  gammas_[bond + 1] = std::move(new_right);
  lambdas_[bond + 1] = std::move(s_new);
  return discarded;
}

Complex VidalMps::amplitude(const std::vector<int>& config) const {
  if (static_cast<int>(config.size()) != n_)
    throw std::invalid_argument("amplitude: configuration length mismatch");
  CVector v = CVector::Ones(1);
  for (int l = 0; l < n_; ++l) {
    const int i = config[l];
    if (i < 0 || i >= d_)
      throw std::invalid_argument("amplitude: physical index out of range");
    const Tensor3& g = gammas_[l];
    const RVector& lam = lambdas_[l + 1];
    CVector w = CVector::Zero(g.right());
    for (int b = 0; b < g.right(); ++b) {
      Complex acc(0, 0);
      for (int a = 0; a < g.left(); ++a) acc += v[a] * g(a, i, b);
      w[b] = acc * lam[b];
    }
    v = std::move(w);
  }
  return v[0];
}

void VidalMps::normalize() {
  double norm2 = inner_product(*this, *this).real();
  if (!(norm2 > 0))
    throw std::runtime_error("normalize: state has zero norm");
  for (int c = 1; c < n_; ++c) {
    const double s = lambdas_[c].norm();
    if (!(s > 0)) throw std::runtime_error("normalize: zero Schmidt vector");
    lambdas_[c] /= s;
  }
  norm2 = inner_product(*this, *this).real();
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& z : gammas_[0].data()) z *= scale;
}

bool VidalMps::all_finite() const {
  for (const auto& g : gammas_)
    if (!g.all_finite()) return false;
  for (const auto& l : lambdas_)
    if (!tebd::all_finite(l)) return false;
  return true;
}

namespace {

// Site matrix for fixed physical index i with the right-cut lambda folded in.
CMatrix site_matrix(const VidalMps& psi, int l, int i) {
  const Tensor3& g = psi.gamma(l);
  const RVector& lam = psi.lambda(l + 1);
  CMatrix m(g.left(), g.right());
  for (int a = 0; a < g.left(); ++a)
    for (int b = 0; b < g.right(); ++b) m(a, b) = g(a, i, b) * lam[b];
  return m;
}

}  // namespace

Complex inner_product(const VidalMps& a, const VidalMps& b) {
  if (a.size() != b.size() || a.phys_dim() != b.phys_dim())
    throw std::invalid_argument("inner_product: shape mismatch");
  const int n = a.size(), d = a.phys_dim();
  CMatrix t = CMatrix::Ones(1, 1);
  for (int l = 0; l < n; ++l) {
    CMatrix next = CMatrix::Zero(a.gamma(l).right(), b.gamma(l).right());
    for (int i = 0; i < d; ++i) {
      CMatrix ma = site_matrix(a, l, i);
      CMatrix mb = site_matrix(b, l, i);
      next.noalias() += ma.adjoint() * t * mb;
    }
    t = std::move(next);
  }
  return t(0, 0);
}

Complex expect_local(const VidalMps& state, int site, const CMatrix& op) {
  if (site < 0 || site >= state.size())
    throw std::invalid_argument("expect_local: site index out of range");
  const int d = state.phys_dim();
  if (op.rows() != d || op.cols() != d)
    throw std::invalid_argument("expect_local: operator must be d x d");

  const Tensor3& g = state.gamma(site);
  const RVector& ll = state.lambda(site);
  const RVector& lr = state.lambda(site + 1);
  Complex acc(0, 0);
  for (int a = 0; a < g.left(); ++a)
    for (int b = 0; b < g.right(); ++b) {
      const double w = ll[a] * ll[a] * lr[b] * lr[b];
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          acc += w * std::conj(g(a, i, b)) * op(i, j) * g(a, j, b);
    }
  return acc;
}

Complex expect_bond(const VidalMps& state, int bond, const CMatrix& op2) {
  if (bond < 0 || bond >= state.size() - 1)
    throw std::invalid_argument("expect_bond: bond index out of range");
  const int d = state.phys_dim();
  if (op2.rows() != d * d || op2.cols() != d * d)
    throw std::invalid_argument("expect_bond: operator must be d^2 x d^2");

  const CMatrix id = CMatrix::Identity(d * d, d * d);
  CMatrix theta = contract_bond_gate(state.lambda(bond), state.gamma(bond),
                                     state.lambda(bond + 1), state.gamma(bond + 1),
                                     state.lambda(bond + 2), id);
  const int chi_l = state.gamma(bond).left();
  const int chi_r = state.gamma(bond + 1).right();
  CMatrix m0(d * d, chi_l * chi_r);
  for (int a = 0; a < chi_l; ++a)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int c = 0; c < chi_r; ++c)
          m0(i * d + j, a * chi_r + c) = theta(a * d + i, j * chi_r + c);
  return (m0.conjugate().cwiseProduct(op2 * m0)).sum();
}

double regauge(VidalMps& state, double target, int max_sweeps, double weight_floor) {
  const int n = state.size(), d = state.phys_dim();
  const CMatrix id = CMatrix::Identity(d * d, d * d);
  TruncationPolicy policy;  // identity updates cannot raise any rank
  policy.weight_tol = weight_floor;
  double defect = canonical_form_defect(state);
  for (int sweep = 0; sweep < max_sweeps && defect > target; ++sweep) {
    for (int b = 1; b < n - 1; b += 2) state.apply_two_site_gate(b, id, policy);
    for (int b = 0; b < n - 1; b += 2) state.apply_two_site_gate(b, id, policy);
    state.normalize();
    defect = canonical_form_defect(state);
  }
  return defect;
}

double canonical_form_defect(const VidalMps& state) {
  const int n = state.size(), d = state.phys_dim();
  double worst = 0.0;

  CMatrix left = CMatrix::Ones(1, 1);
  for (int l = 0; l < n; ++l) {
    const Tensor3& g = state.gamma(l);
    const RVector& lam = state.lambda(l);
    CMatrix next = CMatrix::Zero(g.right(), g.right());
    for (int i = 0; i < d; ++i) {
      CMatrix gi(g.left(), g.right());
      for (int a = 0; a < g.left(); ++a)
        for (int b = 0; b < g.right(); ++b) gi(a, b) = g(a, i, b);
      CMatrix weighted = lam.asDiagonal() * left * lam.asDiagonal();
      next.noalias() += gi.adjoint() * weighted * gi;
    }
    worst = std::max(worst, max_abs(next - CMatrix::Identity(next.rows(), next.cols())));
    left = std::move(next);
  }

  CMatrix right = CMatrix::Ones(1, 1);
  for (int l = n - 1; l >= 0; --l) {
    const Tensor3& g = state.gamma(l);
    const RVector& lam = state.lambda(l + 1);
    CMatrix next = CMatrix::Zero(g.left(), g.left());
    for (int i = 0; i < d; ++i) {
      CMatrix gi(g.left(), g.right());
      for (int a = 0; a < g.left(); ++a)
        for (int b = 0; b < g.right(); ++b) gi(a, b) = g(a, i, b);
      CMatrix weighted = lam.asDiagonal() * right * lam.asDiagonal();
      next.noalias() += gi * weighted * gi.adjoint();
    }
    worst = std::max(worst, max_abs(next - CMatrix::Identity(next.rows(), next.cols())));
    right = std::move(next);
  }
  return worst;
}

}  // namespace tebd
