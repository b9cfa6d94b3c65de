#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "twr/sysmodel.hpp"

namespace twr {

/// Precoders, combiners and relay gain for one channel realization.
struct TransceiverState {
  std::vector<CMatrix> V;  // 2K orthonormal precoders, M x d
  std::vector<CMatrix> U;  // 2K orthonormal combiners, M x d
  double alpha = 0.0;      // relay amplification, G = alpha * I_R
  double mse = 0.0;        // last total-MSE value
  int iterations = 0;
};

/// Relay amplification solving the relay power constraint,
/// alpha^2 = P_r / tr( sum_j rb (P_j/d) H_rj V_j V_j^H H_rj^H
///                     + rb sigma_ID^2 I_R ).
double relay_gain(const SystemConfig& cfg, const ChannelSet& ch,
                  const std::vector<CMatrix>& V);

/// MMSE combiner for receiver k (0-based) given all precoders.
CMatrix update_combiner(const SystemConfig& cfg, const ChannelSet& ch,
                        const std::vector<CMatrix>& V, double alpha, int k);

/// Regularized MMSE precoder for transmitter j (0-based) given all
/// combiners. The ridge is (d/P_j) tr(C_j) / M with C_j evaluated at the
/// current alpha.
CMatrix update_precoder(const SystemConfig& cfg, const ChannelSet& ch,
                        const std::vector<CMatrix>& U, double alpha, int j);

/// Closed-form total MSE across all receivers for the given state.
double total_mse(const SystemConfig& cfg, const ChannelSet& ch,
                 const TransceiverState& state);

/// Residual interference power after combining, normalized by the total
/// cross-channel power. Zero iff alignment is perfect.
double leakage(const SystemConfig& cfg, const ChannelSet& ch,
               const TransceiverState& state);

using IterationObserver = std::function<void(const TransceiverState&)>;

/// Alternating minimization: Haar-random precoder start, then per
/// iteration {relay gain, all combiners, all precoders}. Stops when the
/// relative MSE change drops below tol or max_iter is reached.
TransceiverState run_twria(const SystemConfig& cfg, const ChannelSet& ch,
                           std::uint64_t seed, int max_iter = 2000,
                           double tol = 1e-8,
                           const IterationObserver& observer = nullptr);

/// Combiners and relay gain re-derived for an externally supplied
/// precoder set (balanced or energy-optimal precoders keep the same
/// receive processing rule).
TransceiverState state_for_precoders(const SystemConfig& cfg,
                                     const ChannelSet& ch,
                                     std::vector<CMatrix> V);

}  // namespace twr
