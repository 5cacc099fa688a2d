#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace tebd {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Rank-3 complex tensor with dimensions (left bond, physical, right bond).
/// Entries are stored row-major in that index order, i.e. the flat offset of
/// (a, i, b) is (a * phys + i) * right + b.
class Tensor3 {
public:
  Tensor3() = default;
  Tensor3(int left, int phys, int right)
      : left_(left), phys_(phys), right_(right),
        data_(static_cast<size_t>(left) * phys * right, Complex(0, 0)) {
    if (left < 1 || phys < 1 || right < 1)
      throw std::invalid_argument("Tensor3: dimensions must be positive");
  }

  int left() const { return left_; }
  int phys() const { return phys_; }
  int right() const { return right_; }

  Complex& operator()(int a, int i, int b) {
    return data_[(static_cast<size_t>(a) * phys_ + i) * right_ + b];
  }
  const Complex& operator()(int a, int i, int b) const {
    return data_[(static_cast<size_t>(a) * phys_ + i) * right_ + b];
  }

  const std::vector<Complex>& data() const { return data_; }
  std::vector<Complex>& data() { return data_; }

  bool all_finite() const;

private:
  int left_ = 0, phys_ = 0, right_ = 0;
  std::vector<Complex> data_;
};

struct SvdResult {
  CMatrix u;   // columns orthonormal
  RVector s;   // non-negative, sorted non-increasing
  CMatrix vh;  // rows orthonormal
};

/// Thin singular value decomposition m = u * diag(s) * vh.
/// Singular values are reported as computed; values below 1e-14 * s[0] are
/// not clamped here, truncation belongs to callers.
/// Throws std::invalid_argument on non-finite input and std::runtime_error
/// if the factorization does not converge.
SvdResult svd(const CMatrix& m);

/// exp(scale * h) for Hermitian h, via eigendecomposition h = V diag(e) V†.
/// scale = -i*delta gives the real-time gate, scale = -delta_tau the
/// imaginary-time one. Rejects inputs that are not Hermitian within
/// 1e-12 (relative to the largest entry magnitude).
CMatrix expm_hermitian(const CMatrix& h, Complex scale);

/// Builds the two-site bond matrix
///   theta[(a i), (j c)] = sum_b  lL[a] gL(a,i,b) lM[b] gR(b,j,c) lR[c]
/// and applies the d^2 x d^2 gate to the joint physical indices (i j).
/// Row index is a*d + i, column index is j*chiR + c.
CMatrix contract_bond_gate(const RVector& lambda_left, const Tensor3& gamma_left,
                           const RVector& lambda_mid, const Tensor3& gamma_right,
                           const RVector& lambda_right, const CMatrix& gate);

/// Kronecker product, row-major pairing: (a ⊗ b)[(i1 i2),(j1 j2)] = a(i1,j1) b(i2,j2).
CMatrix kron(const CMatrix& a, const CMatrix& b);

bool all_finite(const CMatrix& m);
bool all_finite(const RVector& v);

double max_abs(const CMatrix& m);

/// Max entry-wise deviation of u†u from the identity.
double unitarity_defect(const CMatrix& u);

}  // namespace tebd
