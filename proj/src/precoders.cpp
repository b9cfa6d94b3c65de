#include "twr/precoders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace twr {

namespace {

constexpr double kOrthoTol = 1e-9;

void require_orthonormal(const CMatrix& v, const char* what) {
  const CMatrix gram = v.adjoint() * v;
  if ((gram - CMatrix::Identity(v.cols(), v.cols())).norm() >= kOrthoTol)
    throw NotOrthonormal(std::string(what) + ": columns are not orthonormal");
}

// QR with the diagonal of R rotated real and non-negative. Tolerates
// rank-deficient input (zero pivots keep their column unchanged).
std::pair<CMatrix, CMatrix> qr_positive(const CMatrix& a) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  Eigen::HouseholderQR<CMatrix> qr(a);
  CMatrix q = qr.householderQ() * CMatrix::Identity(m, n);
  CMatrix r = CMatrix(qr.matrixQR().topRows(n).triangularView<Eigen::Upper>());
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex rjj = r(j, j);
    const double mag = std::abs(rjj);
    if (mag > 0.0) {
      q.col(j) *= rjj / mag;
      r.row(j) *= std::conj(rjj) / mag;
    }
  }
  return {std::move(q), std::move(r)};
}

// Unitary factor of the polar decomposition; maximizes Re tr(X^H B) over
// unitary X, attaining the nuclear norm of B.
CMatrix unitary_polar_factor(const CMatrix& b) {
  if (b.norm() == 0.0) return CMatrix::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<CMatrix> svd(b, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

EigenBasis channel_eigenbasis(const CMatrix& h, int d) {
  const HermEig eig = hermitian_eig(h.adjoint() * h);
  const Eigen::Index m = eig.vectors.rows();
  EigenBasis basis;
  basis.W1 = eig.vectors.leftCols(d);
  basis.W2 = eig.vectors.rightCols(m - d);
  basis.lambda = eig.values;
  return basis;
}

double chordal_distance_sq(const CMatrix& v, const CMatrix& vhat) {
  if (v.rows() != vhat.rows() || v.cols() != vhat.cols())
    throw NotOrthonormal("chordal_distance_sq: shape mismatch");
  require_orthonormal(v, "chordal_distance_sq");
  require_orthonormal(vhat, "chordal_distance_sq");
  const double d = static_cast<double>(v.cols());
  const double val = d - (v.adjoint() * vhat).squaredNorm();
  return std::clamp(val, 0.0, d);
}

CdDecomposition cd_decompose(const CMatrix& v, const CMatrix& vhat) {
  if (v.rows() != vhat.rows() || v.cols() != vhat.cols())
    throw NotOrthonormal("cd_decompose: shape mismatch");
  if (v.rows() < 2 * v.cols())
    throw OutOfRange("cd_decompose: M >= 2d required");
  require_orthonormal(v, "cd_decompose");
  require_orthonormal(vhat, "cd_decompose");

  const CMatrix vnull = null_basis(vhat);
  CdDecomposition out;
  std::tie(out.X, out.Y) = qr_positive(vhat.adjoint() * v);
  std::tie(out.S, out.Z) = qr_positive(vnull.adjoint() * v);
  return out;
}

CMatrix eh_max_precoder(const CMatrix& h, int d) {
  if (d < 1 || d > std::min(h.rows(), h.cols()))
    throw RankDeficient("eh_max_precoder: d exceeds matrix rank bound");
  Eigen::JacobiSVD<CMatrix> svd(h);
  const RVector& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(d - 1) <= kRankTol * sv(0))
    throw RankDeficient("eh_max_precoder: channel rank below d");
  return channel_eigenbasis(h, d).W1;
}

double z_eh(const CMatrix& v_ia, const CMatrix& v_eh) {
  return chordal_distance_sq(v_ia, v_eh);
}

SFactor compute_S(const CMatrix& h, const CMatrix& v, const CMatrix& vnull) {
  const CMatrix a = vnull.adjoint() * (h.adjoint() * (h * v));
  SFactor out;
  try {
    out.S = orthonormalize(a);
    out.degenerate = false;
  } catch (const RankDeficient&) {
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU);
    out.S = svd.matrixU().leftCols(a.cols());
    out.degenerate = true;
  }
  return out;
}

CMatrix solve_X(const CMatrix& h, const CMatrix& v, const CMatrix& vnull,
                const CMatrix& s, const RVector& z, const RVector& y) {
  const CMatrix gram = h.adjoint() * h;
  const RVector zy = z.cwiseProduct(y);
  const CMatrix b = v.adjoint() * gram * vnull * s * zy.asDiagonal();
  return unitary_polar_factor(b);
}

RVector solve_Z(const RVector& c, double z_budget) {
  const Eigen::Index d = c.size();
  if (z_budget < 0.0 || z_budget > static_cast<double>(d))
    throw BudgetRange("solve_Z: z_budget must lie in [0, d]");
  RVector w(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (c(i) < -1e-9)
      throw EntryRange("solve_Z: negative objective coefficient");
    w(i) = std::max(c(i), 0.0);
  }

  RVector z = RVector::Zero(d);
  if (z_budget == 0.0) return z;
  if (w.sum() == 0.0)
    return RVector::Constant(d, std::sqrt(z_budget / static_cast<double>(d)));

  std::vector<Eigen::Index> open(static_cast<std::size_t>(d));
  std::iota(open.begin(), open.end(), 0);
  double remaining = z_budget;
  while (!open.empty()) {
    double norm2 = 0.0;
    for (Eigen::Index i : open) norm2 += w(i) * w(i);
    if (norm2 == 0.0) {
      // Objective-neutral directions share the leftover budget equally.
      const double fill =
          std::sqrt(remaining / static_cast<double>(open.size()));
      for (Eigen::Index i : open) z(i) = std::min(fill, 1.0);
      break;
    }
    const double scale = std::sqrt(remaining / norm2);
    bool clipped = false;
    for (Eigen::Index i : open) z(i) = scale * w(i);
    std::vector<Eigen::Index> next;
    for (Eigen::Index i : open) {
      if (z(i) >= 1.0) {
        z(i) = 1.0;
        remaining -= 1.0;
        clipped = true;
      } else {
        next.push_back(i);
      }
    }
    if (!clipped) break;
    open = std::move(next);
    if (remaining <= 0.0) {
      for (Eigen::Index i : open) z(i) = 0.0;
      break;
    }
  }
  return z;
}

RVector y_from_z(const RVector& z) {
  RVector y(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z(i) < -1e-12 || z(i) > 1.0 + 1e-12)
      throw EntryRange("y_from_z: z entries must lie in [0,1]");
    const double zi = std::clamp(z(i), 0.0, 1.0);
    y(i) = std::sqrt(1.0 - zi * zi);
  }
  return y;
}

CMatrix balanced_precoder(const CMatrix& h, const CMatrix& v_ia,
                          double z_budget, int n_iter,
                          std::vector<double>* objective_trace,
                          CdFactors* factors) {
  const Eigen::Index d = v_ia.cols();
  if (v_ia.rows() < 2 * d)
    throw OutOfRange("balanced_precoder: M >= 2d required");
  if (z_budget < 0.0 || z_budget > static_cast<double>(d))
    throw BudgetRange("balanced_precoder: z_budget must lie in [0, d]");
  require_orthonormal(v_ia, "balanced_precoder");

  const CMatrix v_eh = eh_max_precoder(h, static_cast<int>(d));
  if (z_budget > z_eh(v_ia, v_eh)) return v_eh;

  const CMatrix vnull = null_basis(v_ia);
  const CMatrix s = compute_S(h, v_ia, vnull).S;
  const CMatrix p = v_ia.adjoint() * (h.adjoint() * h) * vnull * s;

  RVector z =
      RVector::Constant(d, std::sqrt(z_budget / static_cast<double>(d)));
  RVector y = y_from_z(z);
  CMatrix x = CMatrix::Identity(d, d);
  for (int it = 0; it < n_iter; ++it) {
    x = solve_X(h, v_ia, vnull, s, z, y);
    const CMatrix xp = x.adjoint() * p;
    RVector c(d);
    for (Eigen::Index i = 0; i < d; ++i)
      c(i) = std::max(y(i) * std::real(xp(i, i)), 0.0);
    z = solve_Z(c, z_budget);
    y = y_from_z(z);
    if (objective_trace) {
      double obj = 0.0;
      for (Eigen::Index i = 0; i < d; ++i)
        obj += y(i) * std::real(xp(i, i)) * z(i);
      objective_trace->push_back(obj);
    }
  }
  if (factors) {
    factors->X = x;
    factors->y = y;
    factors->S = s;
    factors->z = z;
    factors->z_target = z_budget;
  }
  return v_ia * x * y.asDiagonal() + vnull * s * z.asDiagonal();
}

}  // namespace twr
