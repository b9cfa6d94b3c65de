#pragma once

#include <vector>

#include "twr/matcore.hpp"

namespace twr {

/// Eigenbasis of a channel Gram matrix, split at the stream count.
struct EigenBasis {
  CMatrix W1;      // M x d dominant eigenvectors
  CMatrix W2;      // M x (M-d) remaining eigenvectors
  RVector lambda;  // all M eigenvalues, descending
};

EigenBasis channel_eigenbasis(const CMatrix& h, int d);

/// Factors of one chordal-distance displacement with diagonal Y and Z
/// (stored as their diagonals).
struct CdFactors {
  CMatrix X;        // unitary d x d
  RVector y;        // diag(Y), entries in [0,1]
  CMatrix S;        // orthonormal (M-d) x d
  RVector z;        // diag(Z), entries in [0,1]
  double z_target = 0.0;
};

/// Dense chordal-distance decomposition factors (Y and Z upper
/// triangular), V = Vhat X Y + Vhat_null S Z.
struct CdDecomposition {
  CMatrix X;  // unitary d x d
  CMatrix Y;  // upper triangular d x d, non-negative diagonal
  CMatrix S;  // orthonormal (M-d) x d
  CMatrix Z;  // upper triangular d x d, non-negative diagonal
};

/// Squared chordal distance d - ||V^H Vhat||_F^2 between two orthonormal
/// M x d matrices. Throws NotOrthonormal when either input fails the
/// orthonormality check.
double chordal_distance_sq(const CMatrix& v, const CMatrix& vhat);

/// Exact decomposition of V against the reference Vhat: XY is the QR of
/// Vhat^H V, SZ the QR of Vhat_null^H V. Requires M >= 2d.
CdDecomposition cd_decompose(const CMatrix& v, const CMatrix& vhat);

/// Harvested-energy maximizing precoder: the d dominant eigenvectors of
/// H^H H. Throws RankDeficient when rank(H) < d.
CMatrix eh_max_precoder(const CMatrix& h, int d);

/// CD between an IA precoder and the energy-optimal one.
double z_eh(const CMatrix& v_ia, const CMatrix& v_eh);

struct SFactor {
  CMatrix S;  // orthonormal (M-d) x d
  bool degenerate = false;
};

/// Null-space mixing matrix aligned with the energy-dominant directions,
/// S = O[Vnull^H H^H H V]. A rank-deficient argument is completed with an
/// arbitrary orthonormal basis and flagged.
SFactor compute_S(const CMatrix& h, const CMatrix& v, const CMatrix& vnull);

/// Unitary maximizer of Re tr(Y^H X^H V^H H^H H Vnull S Z); the attained
/// value equals the nuclear norm of V^H H^H H Vnull S Z Y^H. Returns the
/// identity when the argument vanishes (z = 0).
CMatrix solve_X(const CMatrix& h, const CMatrix& v, const CMatrix& vnull,
                const CMatrix& s, const RVector& z, const RVector& y);

/// Maximizer of sum_i c_i z_i subject to sum_i z_i^2 <= z_budget and
/// 0 <= z_i <= 1 (scale to the budget, clip at one, rescale the rest).
RVector solve_Z(const RVector& c, double z_budget);

/// y_i = sqrt(1 - z_i^2). Throws EntryRange for entries outside [0,1].
RVector y_from_z(const RVector& z);

/// Iterative balanced precoder for one user: start from the IA precoder
/// and displace it by at most z_budget of squared chordal distance toward
/// the energy-dominant subspace. Returns the EH-max precoder outright
/// when the budget exceeds the IA-to-EH distance. objective_trace, when
/// given, receives the cross-term objective after every alternation;
/// factors, when given, receives the converged displacement factors
/// (untouched on the EH-max early return).
CMatrix balanced_precoder(const CMatrix& h, const CMatrix& v_ia,
                          double z_budget, int n_iter = 6,
                          std::vector<double>* objective_trace = nullptr,
                          CdFactors* factors = nullptr);

}  // namespace twr
