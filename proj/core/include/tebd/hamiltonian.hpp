#pragma once

#include <map>
#include <vector>

#include "tebd/kernel.hpp"

namespace tebd {

/// Nearest-neighbor chain Hamiltonian: one Hermitian d x d term per site
/// and one Hermitian d^2 x d^2 term per bond,
///   H = sum_l k1[l] + sum_b k2[b].
/// Sites and bonds are 0-based; bond b couples sites b and b+1.
struct LocalHamiltonian {
  int n = 0;
  int d = 0;
  std::vector<CMatrix> k1;  // n terms
  std::vector<CMatrix> k2;  // n-1 terms

  /// Shape and Hermiticity (1e-12) validation; throws on violation.
  void validate() const;
};

/// Even/odd partition of the chain. A term anchored at 0-based site a
/// carries k1[a] (embedded as k1 ⊗ I) plus k2[a] when bond a exists; odd
/// anchors form the F group, even anchors the G group (sites 2, 4, ... and
/// 1, 3, ... in 1-based counting). The last site has no bond of its own, so
/// its k1 stays a bare single-site term in its parity group.
struct SplitTerms {
  std::map<int, CMatrix> f_bond;  // bond -> k1|site ⊗ I + k2|bond
  std::map<int, CMatrix> g_bond;
  std::map<int, CMatrix> f_site;  // leftover single-site terms
  std::map<int, CMatrix> g_site;

  /// Every k1 and k2 term appears in exactly one entry.
};

SplitTerms even_odd_split(const LocalHamiltonian& h);

enum class TimeAxis { real_time, imaginary_time };

/// One commuting layer of exponentiated terms. No two gates in a layer
/// touch the same site.
struct GateLayer {
  double slice = 0.0;  // time covered by this layer (delta or delta/2)
  std::vector<std::pair<int, CMatrix>> bond_gates;  // bond index, d^2 x d^2
  std::vector<std::pair<int, CMatrix>> site_gates;  // site index, d x d
};

/// Gate layers for one Trotter step, applied first to last.
/// order 1: [F(delta), G(delta)]; order 2: [F(delta/2), G(delta), F(delta/2)].
/// Real-time gates are exp(-i term delta), imaginary-time exp(-term delta).
struct GateSchedule {
  double delta = 0.0;
  int order = 0;
  TimeAxis axis = TimeAxis::real_time;
  std::vector<GateLayer> layers;
};

GateSchedule make_schedule(const LocalHamiltonian& h, double delta, int order, TimeAxis axis);

/// Spin-1/2 ferromagnetic chain H = -B sum sigma_z - J sum sigma.sigma.
LocalHamiltonian heisenberg_ferromagnet(int n, double b_field, double j_coupling);

/// Transverse-field chain H = -g sum sigma_x - J sum sigma_z sigma_z.
LocalHamiltonian transverse_field_chain(int n, double field, double coupling);

/// Term-wise convex combination (1-s) a + s b for ramp schedules.
LocalHamiltonian interpolate(const LocalHamiltonian& a, const LocalHamiltonian& b, double s);

// Spin-1/2 operator basis.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix sigma_plus();   // |0><1|, raises toward the spin-up state |0>
CMatrix sigma_minus();  // |1><0|
CMatrix identity_matrix(int d);

}  // namespace tebd
