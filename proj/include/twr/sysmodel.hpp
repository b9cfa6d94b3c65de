#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twr/matcore.hpp"

namespace twr {

/// All scalar system parameters of the two-way relay link.
struct SystemConfig {
  int M = 6;  // antennas per user
  int R = 6;  // relay antennas
  int d = 2;  // streams per user
  int K = 3;  // user pairs (2K users total)

  std::vector<double> P;  // transmit power per user, length 2K
  double P_r = 1.0;       // relay transmit power
  double sigma2 = 1.0;    // receiver noise variance
  double sigmaR2 = 1.0;   // relay noise variance
  double delta2 = 0.1;    // splitter circuit-noise variance
  double rho = 0.5;       // power-splitting ratio in [0,1]
  double zeta = 0.5;      // RF-to-electrical conversion efficiency

  std::vector<double> beta_up;    // uplink variances, length 2K
  std::vector<double> beta_down;  // downlink variances, length 2K

  int users() const { return 2 * K; }
  double rho_bar() const { return 1.0 - rho; }

  /// Throws ConfigError if any structural or feasibility invariant fails
  /// (M >= 2d, M >= Kd, Kd <= R, parameter ranges, vector lengths).
  void validate() const;

  /// Uniform power assignment P_j = P_r = p for all users.
  void set_uniform_power(double p);
};

/// Paper-style (M,R,d)^{2K} defaults with unit path-loss variances.
SystemConfig default_config();

/// Parses the flat `key = value` config format. Vector-valued keys take
/// comma-separated lists; a single value broadcasts to all 2K users.
SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::string& path);

/// One realization of all uplink and downlink MIMO channels.
struct ChannelSet {
  std::vector<CMatrix> H_up;    // 2K matrices, R x M (user j -> relay)
  std::vector<CMatrix> H_down;  // 2K matrices, M x R (relay -> user k)
};

/// Partner of user k (1-based, k in 1..2K): k' = ((k + K - 1) mod 2K) + 1.
int pair_index(int k, int K);

/// 0-based partner index used internally.
inline int partner0(int k, int K) { return (k + K) % (2 * K); }

/// i.i.d. circularly symmetric complex Gaussian channels with per-entry
/// variance beta. Each matrix draws from its own substream, so matrices
/// are independent and stable under changes of K.
ChannelSet draw_channels(const SystemConfig& cfg, std::uint64_t seed);

/// Equivalent end-to-end channel alpha * H_down[k] * H_up[j] (0-based).
CMatrix effective_channel(const ChannelSet& ch, double alpha, int k, int j);

/// Effective noise variance on the information-decoding branch,
/// sigma_ID^2 = sigma_R^2 + delta^2 / (1 - rho). Throws FullSplit at rho = 1.
double id_noise_variance(const SystemConfig& cfg);

}  // namespace twr
