#pragma once

#include <string>
#include <vector>

#include "twr/twria.hpp"

namespace twr {

/// One (sum rate, harvested energy) sample.
struct RateEnergyPoint {
  double rho = 0.0;
  double z = 0.0;
  double sum_rate = 0.0;  // bits/s/Hz
  double energy = 0.0;    // harvested energy Q_r
  std::string method;     // twria | eh_max | balanced
};

/// Effective noise covariance at receiver k,
/// C_k = rb sigma_ID^2 alpha^2 H_kr H_kr^H + sigma^2 I_M.
CMatrix noise_cov(const SystemConfig& cfg, const ChannelSet& ch, double alpha,
                  int k);

/// Achievable rate of receiver k (0-based) under the state's combiner,
/// with the half-duplex 1/2 factor.
double user_rate(const SystemConfig& cfg, const ChannelSet& ch,
                 const TransceiverState& state, int k);

/// Rate of receiver k with the co-channel interference term removed.
double perfect_rate(const SystemConfig& cfg, const ChannelSet& ch,
                    const TransceiverState& state, int k);

double sum_rate(const SystemConfig& cfg, const ChannelSet& ch,
                const TransceiverState& state);

/// Average harvested energy at the relay,
/// Q_r = zeta rho sum_j (P_j/d) ||H_rj V_j||_F^2.
double harvested_energy(const SystemConfig& cfg, const ChannelSet& ch,
                        const std::vector<CMatrix>& V);

/// Closed-form upper bound on the expected per-user rate loss induced by
/// per-user CD displacements z (vector of squared chordal distances).
double rate_loss_bound(const SystemConfig& cfg, const std::vector<double>& z,
                       int k);

/// CD budget keeping the rate-loss bound at (d/2) log2 c for user j.
double cd_budget(const SystemConfig& cfg, double c, int j);

struct EnergyBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Per-realization harvested-energy bounds for balanced precoding: the
/// convex split over (V_j, V_j^n) below, the spectral cap above. V_n
/// holds one orthonormal M x d null-space slice per user.
EnergyBounds energy_bounds(const SystemConfig& cfg, const ChannelSet& ch,
                           const std::vector<CMatrix>& V_ia,
                           const std::vector<double>& z,
                           const std::vector<CMatrix>& V_n);

struct ExpectedEnergyBounds {
  double approx = 0.0;
  double upper = 0.0;
};

/// Closed forms 2KP zeta rho R and 2KP zeta rho Rd((R+d)/(Rd+1))^{2/3}.
/// Requires uniform powers and unit path-loss variances.
ExpectedEnergyBounds expected_energy_bounds(const SystemConfig& cfg);

/// Rate-energy samples along a grid of splitting ratios. Combiners and
/// relay gain are re-derived at every rho; precoders come from the state.
std::vector<RateEnergyPoint> rate_energy_region(
    const SystemConfig& cfg, const ChannelSet& ch,
    const TransceiverState& state, double z, const std::vector<double>& rho_grid,
    const std::string& method = "twria", bool parallel = false);

}  // namespace twr
