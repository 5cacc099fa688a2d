#include "tebd/hamiltonian.hpp"

namespace tebd {

void LocalHamiltonian::validate() const {
  if (n < 2) throw std::invalid_argument("LocalHamiltonian: need at least two sites");
  if (d < 2) throw std::invalid_argument("LocalHamiltonian: local dimension must be >= 2");
  if (static_cast<int>(k1.size()) != n)
    throw std::invalid_argument("LocalHamiltonian: expected n single-site terms");
  if (static_cast<int>(k2.size()) != n - 1)
    throw std::invalid_argument("LocalHamiltonian: expected n-1 bond terms");
  for (const auto& m : k1) {
    if (m.rows() != d || m.cols() != d)
      throw std::invalid_argument("LocalHamiltonian: k1 term has wrong shape");
    if (max_abs(m - m.adjoint()) > 1e-12 * std::max(1.0, max_abs(m)))
      throw std::invalid_argument("LocalHamiltonian: k1 term is not Hermitian");
  }
  for (const auto& m : k2) {
    if (m.rows() != d * d || m.cols() != d * d)
      throw std::invalid_argument("LocalHamiltonian: k2 term has wrong shape");
    if (max_abs(m - m.adjoint()) > 1e-12 * std::max(1.0, max_abs(m)))
      throw std::invalid_argument("LocalHamiltonian: k2 term is not Hermitian");
  }
}

SplitTerms even_odd_split(const LocalHamiltonian& h) {
  h.validate();
  SplitTerms out;
  const CMatrix id = identity_matrix(h.d);
  for (int a = 0; a < h.n; ++a) {
    const bool in_f = (a % 2 == 1);  // 1-based even sites
    if (a < h.n - 1) {
      CMatrix term = kron(h.k1[a], id) + h.k2[a];
      (in_f ? out.f_bond : out.g_bond).emplace(a, std::move(term));
    } else {
      (in_f ? out.f_site : out.g_site).emplace(a, h.k1[a]);
    }
  }
  return out;
}

namespace {

GateLayer exponentiate_group(const std::map<int, CMatrix>& bonds,
                             const std::map<int, CMatrix>& sites, double slice,
                             TimeAxis axis) {
  const Complex scale = axis == TimeAxis::real_time ? Complex(0, -slice) : Complex(-slice, 0);
  GateLayer layer;
  layer.slice = slice;
  layer.bond_gates.reserve(bonds.size());
  for (const auto& [b, term] : bonds) layer.bond_gates.emplace_back(b, expm_hermitian(term, scale));
  for (const auto& [s, term] : sites) layer.site_gates.emplace_back(s, expm_hermitian(term, scale));
  return layer;
}

}  // namespace

GateSchedule make_schedule(const LocalHamiltonian& h, double delta, int order, TimeAxis axis) {
  if (!(delta > 0)) throw std::invalid_argument("make_schedule: delta must be positive");
  if (order != 1 && order != 2)
    throw std::invalid_argument("make_schedule: only Trotter orders 1 and 2 are supported");

  SplitTerms split = even_odd_split(h);
  GateSchedule sched;
  sched.delta = delta;
  sched.order = order;
  sched.axis = axis;
  if (order == 1) {
    sched.layers.push_back(exponentiate_group(split.f_bond, split.f_site, delta, axis));
    sched.layers.push_back(exponentiate_group(split.g_bond, split.g_site, delta, axis));
  } else {
    GateLayer f_half = exponentiate_group(split.f_bond, split.f_site, delta / 2, axis);
    sched.layers.push_back(f_half);
    sched.layers.push_back(exponentiate_group(split.g_bond, split.g_site, delta, axis));
    sched.layers.push_back(std::move(f_half));
  }
  return sched;
}

LocalHamiltonian heisenberg_ferromagnet(int n, double b_field, double j_coupling) {
  if (n < 2) throw std::invalid_argument("heisenberg_ferromagnet: need at least two sites");
  LocalHamiltonian h;
  h.n = n;
  h.d = 2;
  h.k1.assign(n, -b_field * pauli_z());
  const CMatrix exchange =
      kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) + kron(pauli_z(), pauli_z());
  h.k2.assign(n - 1, -j_coupling * exchange);
  return h;
}

LocalHamiltonian transverse_field_chain(int n, double field, double coupling) {
  if (n < 2) throw std::invalid_argument("transverse_field_chain: need at least two sites");
  LocalHamiltonian h;
  h.n = n;
  h.d = 2;
  h.k1.assign(n, -field * pauli_x());
  h.k2.assign(n - 1, -coupling * kron(pauli_z(), pauli_z()));
  return h;
}

LocalHamiltonian interpolate(const LocalHamiltonian& a, const LocalHamiltonian& b, double s) {
  if (a.n != b.n || a.d != b.d)
    throw std::invalid_argument("interpolate: Hamiltonians have different shapes");
  if (s < 0.0 || s > 1.0) throw std::invalid_argument("interpolate: s must lie in [0, 1]");
  LocalHamiltonian out;
  out.n = a.n;
  out.d = a.d;
  out.k1.reserve(a.n);
  out.k2.reserve(a.n - 1);
  for (int l = 0; l < a.n; ++l) out.k1.push_back((1.0 - s) * a.k1[l] + s * b.k1[l]);
  for (int c = 0; c < a.n - 1; ++c) out.k2.push_back((1.0 - s) * a.k2[c] + s * b.k2[c]);
  return out;
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMatrix sigma_plus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}

CMatrix sigma_minus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(1, 0) = 1;
  return m;
}

CMatrix identity_matrix(int d) { return CMatrix::Identity(d, d); }

}  // namespace tebd
