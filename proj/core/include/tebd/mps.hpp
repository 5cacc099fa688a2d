#pragma once

#include <limits>
#include <vector>

#include "tebd/kernel.hpp"

namespace tebd {

/// Truncation rule for two-site updates. The retained rank is the smallest
/// one whose discarded weight (sum of squared dropped Schmidt values) stays
/// within weight_tol, then capped at chi_max; chi_max wins conflicts.
/// Singular values below 1e-14 * s_max are treated as numerical zeros and
/// dropped unconditionally.
struct TruncationPolicy {
  int chi_max = std::numeric_limits<int>::max();
  double weight_tol = 0.0;
  bool renormalize = true;
};

/// Chain decomposition of an n-site pure state into per-site Gamma tensors
/// and per-cut Schmidt vectors. Cut c (0..n) separates sites [0,c) from
/// [c,n); cuts 0 and n hold the dummy vector (1). Site l has tensor
/// dimensions chi_{l} x d x chi_{l+1} where chi_c = lambda(c).size().
///
/// Sites are 0-based. Bond b connects sites b and b+1 and its Schmidt
/// spectrum lives at cut b+1.
class VidalMps {
public:
  VidalMps() = default;

  /// Unentangled chain from per-site unit vectors (all bond dimensions 1).
  static VidalMps product_state(const std::vector<CVector>& locals);

  int size() const { return n_; }
  int phys_dim() const { return d_; }

  const Tensor3& gamma(int site) const { return gammas_.at(site); }
  const RVector& lambda(int cut) const { return lambdas_.at(cut); }

  /// Schmidt coefficients across bond b, sorted non-increasing.
  const RVector& schmidt_spectrum(int bond) const;

  /// Retained rank at every bond (n-1 entries).
  std::vector<int> bond_ranks() const;
  /// Largest rank over all bonds.
  int max_rank() const;

  /// Rotates the physical index of one site: gamma[l] <- u gamma[l].
  /// Lambda vectors are untouched, so canonical form survives unitary u.
  /// Non-unitary maps must be requested explicitly.
  void apply_single_site_gate(int site, const CMatrix& u, bool allow_nonunitary = false);

  /// Two-site update at bond b: contract, apply gate, SVD, truncate per
  /// policy, divide the boundary lambdas back out. Returns the discarded
  /// weight of the pre-renormalization spectrum, accumulated from the
  /// smallest retained-plus-one singular value downward in descending
  /// index order. Only gamma(b), gamma(b+1) and the bond spectrum change.
  double apply_two_site_gate(int bond, const CMatrix& gate, const TruncationPolicy& policy);

  /// Coefficient of one basis configuration (n physical indices), O(n chi^2).
  Complex amplitude(const std::vector<int>& config) const;

  /// Rescales so that <psi|psi> = 1 and every interior Schmidt vector has
  /// unit square-sum. Throws on zero-norm states.
  void normalize();

  bool all_finite() const;

  // Mutable access for oracles and IO; invariants are the caller's burden.
  Tensor3& mutable_gamma(int site) { return gammas_.at(site); }
  RVector& mutable_lambda(int cut) { return lambdas_.at(cut); }

private:
  void check_site(int site) const;

  int n_ = 0, d_ = 0;
  std::vector<Tensor3> gammas_;   // n entries
  std::vector<RVector> lambdas_;  // n+1 entries, [0] and [n] are dummies
};

/// <a|b> by left-to-right transfer contraction. States must share n and d.
Complex inner_product(const VidalMps& a, const VidalMps& b);

/// Single-site expectation <psi|op[l]|psi>; exploits canonical form, so the
/// result is only meaningful on canonical states.
Complex expect_local(const VidalMps& state, int site, const CMatrix& op);

/// Two-site expectation of a d^2 x d^2 operator on bond b.
Complex expect_bond(const VidalMps& state, int bond, const CMatrix& op2);

/// Largest deviation from identity over all left and right environment
/// contractions; zero (to tolerance) exactly when the state is canonical.
double canonical_form_defect(const VidalMps& state);

/// Restores canonical form by sweeping identity two-site updates, which
/// re-gauge the decomposition without moving the physical state. Sweeps
/// until the canonical defect drops below `target` or `max_sweeps` is
/// exhausted; returns the defect achieved. Useful after non-unitary
/// (imaginary-time) updates.
///
/// The achievable defect is limited to roughly eps / lambda_min by the
/// divisions in the update, so Schmidt channels of negligible weight pin the
/// gauge quality. A nonzero `weight_floor` lets the sweeps drop tail weight
/// up to that amount per update, trading an immaterial state change for a
/// well-conditioned gauge.
double regauge(VidalMps& state, double target = 1e-10, int max_sweeps = 16,
               double weight_floor = 0.0);

}  // namespace tebd
