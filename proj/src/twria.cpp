#include "twr/twria.hpp"

#include <cmath>
#include <limits>

#include "twr/rng.hpp"

namespace twr {

namespace {

// Per-realization products that stay fixed while precoders iterate.
struct LinkCache {
  int n = 0;
  std::vector<CMatrix> prod;       // n*n entries, H_down[k] * H_up[j]
  std::vector<CMatrix> down_gram;  // n entries, H_down[k] H_down[k]^H

  const CMatrix& eff(int k, int j) const {
    return prod[static_cast<std::size_t>(k * n + j)];
  }
};

LinkCache make_cache(const SystemConfig& cfg, const ChannelSet& ch) {
  LinkCache cache;
  cache.n = cfg.users();
  cache.prod.reserve(static_cast<std::size_t>(cache.n * cache.n));
  for (int k = 0; k < cache.n; ++k)
    for (int j = 0; j < cache.n; ++j)
      cache.prod.push_back(ch.H_down[static_cast<std::size_t>(k)] *
                           ch.H_up[static_cast<std::size_t>(j)]);
  cache.down_gram.reserve(static_cast<std::size_t>(cache.n));
  for (int k = 0; k < cache.n; ++k)
    cache.down_gram.push_back(ch.H_down[static_cast<std::size_t>(k)] *
                              ch.H_down[static_cast<std::size_t>(k)].adjoint());
  return cache;
}

CMatrix noise_cov_cached(const SystemConfig& cfg, const LinkCache& cache,
                         double alpha, int k) {
  const double sid2 = id_noise_variance(cfg);
  return cfg.rho_bar() * sid2 * alpha * alpha *
             cache.down_gram[static_cast<std::size_t>(k)] +
         cfg.sigma2 * CMatrix::Identity(cfg.M, cfg.M);
}

double relay_gain_cached(const SystemConfig& cfg, const ChannelSet& ch,
                         const std::vector<CMatrix>& V) {
  const double rb = cfg.rho_bar();
  const double sid2 = id_noise_variance(cfg);
  double denom = rb * sid2 * cfg.R;
  for (int j = 0; j < cfg.users(); ++j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    denom += rb * (cfg.P[ju] / cfg.d) * (ch.H_up[ju] * V[ju]).squaredNorm();
  }
  return std::sqrt(cfg.P_r / denom);
}

CMatrix combiner_cached(const SystemConfig& cfg, const LinkCache& cache,
                        const std::vector<CMatrix>& V, double alpha, int k) {
  const double rb = cfg.rho_bar();
  const int kp = partner0(k, cfg.K);
  CMatrix q = noise_cov_cached(cfg, cache, alpha, k);
  for (int j = 0; j < cache.n; ++j) {
    if (j == k) continue;
    const CMatrix hv = alpha * (cache.eff(k, j) * V[static_cast<std::size_t>(j)]);
    q.noalias() += (rb * cfg.P[static_cast<std::size_t>(j)] / cfg.d) * hv *
                   hv.adjoint();
  }
  const CMatrix t =
      alpha * (cache.eff(k, kp) * V[static_cast<std::size_t>(kp)]);
  const CMatrix arg = q.llt().solve(t) *
                      (rb * cfg.P[static_cast<std::size_t>(kp)] / cfg.d);
  return orthonormalize(arg);
}

CMatrix precoder_cached(const SystemConfig& cfg, const LinkCache& cache,
                        const std::vector<CMatrix>& U, double alpha, int j) {
  const int jp = partner0(j, cfg.K);
  CMatrix a = CMatrix::Zero(cfg.M, cfg.M);
  for (int k = 0; k < cache.n; ++k) {
    if (k == j) continue;
    const CMatrix hu =
        alpha * (cache.eff(k, j).adjoint() * U[static_cast<std::size_t>(k)]);
    a.noalias() += hu * hu.adjoint();
  }
  const double trace_cj =
      std::real(noise_cov_cached(cfg, cache, alpha, j).trace());
  const double eps =
      (cfg.d / cfg.P[static_cast<std::size_t>(j)]) * trace_cj / cfg.M;
  a += eps * CMatrix::Identity(cfg.M, cfg.M);
  // Transmitter j is decoded at receiver j' through H_{j'j}.
  const CMatrix t =
      alpha * (cache.eff(jp, j).adjoint() * U[static_cast<std::size_t>(jp)]);
  return orthonormalize(a.llt().solve(t));
}

double mse_cached(const SystemConfig& cfg, const LinkCache& cache,
                  const TransceiverState& state) {
  const double rb = cfg.rho_bar();
  double mse = 0.0;
  for (int k = 0; k < cache.n; ++k) {
    const std::size_t ku = static_cast<std::size_t>(k);
    const int kp = partner0(k, cfg.K);
    const std::size_t kpu = static_cast<std::size_t>(kp);
    const CMatrix& u = state.U[ku];

    mse += cfg.P[kpu];
    const CMatrix desired =
        state.alpha * (u.adjoint() * cache.eff(k, kp) * state.V[kpu]);
    mse -= (2.0 * rb * cfg.P[kpu] / cfg.d) * desired.trace().real();
    for (int j = 0; j < cache.n; ++j) {
      if (j == k) continue;
      const std::size_t ju = static_cast<std::size_t>(j);
      const CMatrix h =
          state.alpha * (u.adjoint() * cache.eff(k, j) * state.V[ju]);
      mse += rb * (cfg.P[ju] / cfg.d) * h.squaredNorm();
    }
    const CMatrix ck = noise_cov_cached(cfg, cache, state.alpha, k);
    mse += (u.adjoint() * ck * u).trace().real();
  }
  return mse;
}

double leakage_cached(const SystemConfig& cfg, const LinkCache& cache,
                      const TransceiverState& state) {
  double num = 0.0;
  double den = 0.0;
  for (int k = 0; k < cache.n; ++k) {
    const int kp = partner0(k, cfg.K);
    for (int j = 0; j < cache.n; ++j) {
      if (j == k || j == kp) continue;
      const CMatrix h = state.alpha * cache.eff(k, j);
      num += (state.U[static_cast<std::size_t>(k)].adjoint() * h *
              state.V[static_cast<std::size_t>(j)])
                 .squaredNorm();
      den += h.squaredNorm();
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

double relay_gain(const SystemConfig& cfg, const ChannelSet& ch,
                  const std::vector<CMatrix>& V) {
  return relay_gain_cached(cfg, ch, V);
}

CMatrix update_combiner(const SystemConfig& cfg, const ChannelSet& ch,
                        const std::vector<CMatrix>& V, double alpha, int k) {
  return combiner_cached(cfg, make_cache(cfg, ch), V, alpha, k);
}

CMatrix update_precoder(const SystemConfig& cfg, const ChannelSet& ch,
                        const std::vector<CMatrix>& U, double alpha, int j) {
  return precoder_cached(cfg, make_cache(cfg, ch), U, alpha, j);
}

double total_mse(const SystemConfig& cfg, const ChannelSet& ch,
                 const TransceiverState& state) {
  return mse_cached(cfg, make_cache(cfg, ch), state);
}

double leakage(const SystemConfig& cfg, const ChannelSet& ch,
               const TransceiverState& state) {
  return leakage_cached(cfg, make_cache(cfg, ch), state);
}

TransceiverState run_twria(const SystemConfig& cfg, const ChannelSet& ch,
                           std::uint64_t seed, int max_iter, double tol,
                           const IterationObserver& observer) {
  cfg.validate();
  if (max_iter < 1) throw OutOfRange("run_twria: max_iter must be >= 1");
  const int n = cfg.users();
  const LinkCache cache = make_cache(cfg, ch);

  TransceiverState state;
  state.V.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    Rng rng(seed, Stream::PrecoderInit, static_cast<std::uint64_t>(j));
    CMatrix g(cfg.M, cfg.d);
    for (Eigen::Index r = 0; r < g.rows(); ++r)
      for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = rng.cgauss(1.0);
    state.V.push_back(orthonormalize(g));
  }
  state.U.assign(static_cast<std::size_t>(n), CMatrix::Zero(cfg.M, cfg.d));

  double prev_mse = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iter; ++iter) {
    state.alpha = relay_gain_cached(cfg, ch, state.V);
    for (int k = 0; k < n; ++k)
      state.U[static_cast<std::size_t>(k)] =
          combiner_cached(cfg, cache, state.V, state.alpha, k);
    for (int j = 0; j < n; ++j)
      state.V[static_cast<std::size_t>(j)] =
          precoder_cached(cfg, cache, state.U, state.alpha, j);
    state.mse = mse_cached(cfg, cache, state);
    state.iterations = iter;
    if (observer) observer(state);
    const double rel = std::abs(state.mse - prev_mse) /
                       std::max(state.mse, std::numeric_limits<double>::min());
    if (rel <= tol) break;
    prev_mse = state.mse;
  }
  return state;
}

TransceiverState state_for_precoders(const SystemConfig& cfg,
                                     const ChannelSet& ch,
                                     std::vector<CMatrix> V) {
  const LinkCache cache = make_cache(cfg, ch);
  TransceiverState state;
  state.V = std::move(V);
  state.alpha = relay_gain_cached(cfg, ch, state.V);
  state.U.reserve(state.V.size());
  for (int k = 0; k < cfg.users(); ++k)
    state.U.push_back(combiner_cached(cfg, cache, state.V, state.alpha, k));
  state.mse = mse_cached(cfg, cache, state);
  state.iterations = 0;
  return state;
}

}  // namespace twr
