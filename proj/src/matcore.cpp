#include "twr/matcore.hpp"

#include <algorithm>
#include <cmath>

namespace twr {

namespace {

// Rotates column j of q so that entry r_jj of the matching triangular
// factor becomes real and positive; returns nothing for zero pivots.
void apply_qr_phase(CMatrix& q, const CMatrix& qr_packed) {
  const Eigen::Index n = std::min(qr_packed.rows(), qr_packed.cols());
  for (Eigen::Index j = 0; j < n && j < q.cols(); ++j) {
    const Complex rjj = qr_packed(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0.0) q.col(j) *= rjj / mag;
  }
}

}  // namespace

CMatrix orthonormalize(const CMatrix& a) {
  if (a.rows() < a.cols())
    throw RankDeficient("orthonormalize: input has more columns than rows");
  Eigen::JacobiSVD<CMatrix> svd(a);
  const RVector& sv = svd.singularValues();
  const double smax = sv(0);
  if (!(smax > 0.0) || sv(sv.size() - 1) <= kRankTol * smax)
    throw RankDeficient("orthonormalize: rank-deficient input");

  Eigen::HouseholderQR<CMatrix> qr(a);
  CMatrix q = qr.householderQ() * CMatrix::Identity(a.rows(), a.cols());
  apply_qr_phase(q, qr.matrixQR());
  return q;
}

HermEig hermitian_eig(const CMatrix& a) {
  if (a.rows() != a.cols())
    throw NotHermitian("hermitian_eig: matrix is not square");
  const double scale = a.norm();
  if ((a - a.adjoint()).norm() >= 1e-10 * std::max(scale, 1e-300))
    throw NotHermitian("hermitian_eig: matrix is not Hermitian");

  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  const Eigen::Index m = a.rows();

  HermEig out;
  out.values = RVector(m);
  out.vectors = CMatrix(m, m);
  // Eigen returns ascending order.
  for (Eigen::Index i = 0; i < m; ++i) {
    out.values(i) = es.eigenvalues()(m - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(m - 1 - i);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::Index imax = 0;
    out.vectors.col(i).cwiseAbs().maxCoeff(&imax);
    const Complex pivot = out.vectors(imax, i);
    const double mag = std::abs(pivot);
    if (mag > 0.0) out.vectors.col(i) *= std::conj(pivot) / mag;
  }
  return out;
}

CMatrix null_basis(const CMatrix& v) {
  const Eigen::Index m = v.rows();
  const Eigen::Index d = v.cols();
  if (m <= d) throw NotOrthonormal("null_basis: no left null space (M <= d)");
  if ((v.adjoint() * v - CMatrix::Identity(d, d)).norm() >= 1e-10)
    throw NotOrthonormal("null_basis: input columns are not orthonormal");

  Eigen::HouseholderQR<CMatrix> qr(v);
  CMatrix q = qr.householderQ() * CMatrix::Identity(m, m);
  apply_qr_phase(q, qr.matrixQR());
  return q.rightCols(m - d);
}

CMatrix inv_sqrt_psd(const CMatrix& a, bool on_support) {
  const HermEig eig = hermitian_eig(a);
  const Eigen::Index m = a.rows();
  const double lmax = std::max(eig.values(0), 0.0);
  const double tol = kRankTol * std::max(lmax, 1e-300);

  RVector w(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (eig.values(i) > tol) {
      w(i) = 1.0 / std::sqrt(eig.values(i));
    } else if (on_support) {
      w(i) = 0.0;
    } else {
      throw Singular("inv_sqrt_psd: rank-deficient input");
    }
  }
  CMatrix b = eig.vectors * w.asDiagonal() * eig.vectors.adjoint();
  return 0.5 * (b + b.adjoint());
}

double nuclear_norm(const CMatrix& b) {
  Eigen::JacobiSVD<CMatrix> svd(b);
  return svd.singularValues().sum();
}

}  // namespace twr
