#pragma once

#include <Eigen/Dense>
#include <complex>

#include "twr/errors.hpp"

namespace twr {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Complex = std::complex<double>;

/// Relative rank tolerance (against the largest singular value).
inline constexpr double kRankTol = 1e-12;

/// Orthonormal basis of span(A) for a tall full-column-rank A, via
/// Householder QR with the diagonal of the triangular factor made real
/// and positive. Throws RankDeficient if the smallest singular value of
/// A is <= kRankTol times the largest.
CMatrix orthonormalize(const CMatrix& a);

struct HermEig {
  RVector values;   // descending
  CMatrix vectors;  // unitary, column i pairs with values(i)
};

/// Eigendecomposition of a Hermitian matrix. Eigenvalues are sorted
/// descending; each eigenvector is rotated so its largest-magnitude
/// entry is real and positive. Throws NotHermitian when
/// ||A - A^H||_F >= 1e-10 ||A||_F.
HermEig hermitian_eig(const CMatrix& a);

/// Orthonormal basis of the orthogonal complement of span(V) for an
/// orthonormal M x d input (M > d). Deterministic for fixed input.
CMatrix null_basis(const CMatrix& v);

/// Hermitian inverse square root of a Hermitian PSD matrix. With
/// on_support = true, eigenvalues below the rank tolerance map to zero
/// (pseudo-inverse on the support); otherwise a rank-deficient input
/// throws Singular.
CMatrix inv_sqrt_psd(const CMatrix& a, bool on_support = false);

/// Sum of singular values, tr((B^H B)^{1/2}).
double nuclear_norm(const CMatrix& b);

}  // namespace twr
