#include "tebd/kernel.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace tebd {

bool Tensor3::all_finite() const {
  for (const auto& z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

bool all_finite(const CMatrix& m) {
  return m.array().isFinite().all();
}

bool all_finite(const RVector& v) {
  return v.array().isFinite().all();
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double unitarity_defect(const CMatrix& u) {
  CMatrix g = u.adjoint() * u;
  g -= CMatrix::Identity(g.rows(), g.cols());
  return max_abs(g);
}

SvdResult svd(const CMatrix& m) {
  if (!all_finite(m))
    throw std::invalid_argument("svd: input has non-finite entries");

  // Two-sided Jacobi: slower than divide-and-conquer asymptotically, but the
  // factored matrices here are small (d*chi square) and it computes the tiny
  // singular values near the truncation floor to full relative accuracy.
  Eigen::JacobiSVD<CMatrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    throw std::runtime_error("svd: factorization did not converge");

  SvdResult out;
  out.u = dec.matrixU();
  out.s = dec.singularValues();
  out.vh = dec.matrixV().adjoint();
  if (!all_finite(out.s))
    throw std::runtime_error("svd: non-finite singular values");
  return out;
}

CMatrix expm_hermitian(const CMatrix& h, Complex scale) {
  if (h.rows() != h.cols())
    throw std::invalid_argument("expm_hermitian: matrix must be square");
  const double tol = 1e-12 * std::max(1.0, max_abs(h));
  if (max_abs(h - h.adjoint()) > tol)
    throw std::invalid_argument("expm_hermitian: matrix is not Hermitian within tolerance");

  // Symmetrize to remove sub-tolerance asymmetry before the solver sees it.
  CMatrix hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hs);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("expm_hermitian: eigendecomposition failed");

  const RVector& e = eig.eigenvalues();
  CVector phase(e.size());
  for (Eigen::Index k = 0; k < e.size(); ++k) phase[k] = std::exp(scale * e[k]);
  return eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix contract_bond_gate(const RVector& lambda_left, const Tensor3& gamma_left,
                           const RVector& lambda_mid, const Tensor3& gamma_right,
                           const RVector& lambda_right, const CMatrix& gate) {
  const int chi_l = gamma_left.left();
  const int chi_m = gamma_left.right();
  const int chi_r = gamma_right.right();
  const int d = gamma_left.phys();

  if (gamma_right.phys() != d)
    throw std::invalid_argument("contract_bond_gate: physical dimensions differ");
  if (lambda_left.size() != chi_l || lambda_mid.size() != chi_m ||
      gamma_right.left() != chi_m || lambda_right.size() != chi_r)
    throw std::invalid_argument("contract_bond_gate: bond dimensions do not chain");
  if (gate.rows() != d * d || gate.cols() != d * d)
    throw std::invalid_argument("contract_bond_gate: gate must be d^2 x d^2");

  // A[(a i), b] = lL[a] gL(a,i,b) lM[b];  B[b, (j c)] = gR(b,j,c) lR[c]
  CMatrix a(chi_l * d, chi_m);
  for (int al = 0; al < chi_l; ++al)
    for (int i = 0; i < d; ++i)
      for (int b = 0; b < chi_m; ++b)
        a(al * d + i, b) = lambda_left[al] * gamma_left(al, i, b) * lambda_mid[b];

  CMatrix bm(chi_m, d * chi_r);
  for (int b = 0; b < chi_m; ++b)
    for (int j = 0; j < d; ++j)
      for (int c = 0; c < chi_r; ++c)
        bm(b, j * chi_r + c) = gamma_right(b, j, c) * lambda_right[c];

  CMatrix theta0 = a * bm;  // (chi_l d) x (d chi_r)

  // Regroup so the joint physical index is the row, apply the gate, regroup back.
  CMatrix m0(d * d, chi_l * chi_r);
  for (int al = 0; al < chi_l; ++al)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int c = 0; c < chi_r; ++c)
          m0(i * d + j, al * chi_r + c) = theta0(al * d + i, j * chi_r + c);

  CMatrix m1 = gate * m0;

  CMatrix theta(chi_l * d, d * chi_r);
  for (int al = 0; al < chi_l; ++al)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int c = 0; c < chi_r; ++c)
          theta(al * d + i, j * chi_r + c) = m1(i * d + j, al * chi_r + c);

  return theta;
}

}  // namespace tebd
