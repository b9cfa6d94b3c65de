#include "twr/metrics.hpp"

#include <cmath>

#include "twr/parallel.hpp"

namespace twr {

namespace {

double log2det_hermitian_pd(const CMatrix& a) {
  const Eigen::LLT<CMatrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw Singular("log2det: matrix is not positive definite");
  const CMatrix l = llt.matrixL();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    acc += std::log2(std::real(l(i, i)));
  return 2.0 * acc;
}

// Interference-plus-noise matrix and the desired-signal Gram at receiver
// k, both in the d-dimensional post-combiner domain.
struct RateTerms {
  CMatrix base;    // N_k (+ interference when with_interference)
  CMatrix signal;  // (rb P_k'/d) Hbar_kk' Hbar_kk'^H
};

RateTerms rate_terms(const SystemConfig& cfg, const ChannelSet& ch,
                     const TransceiverState& state, int k,
                     bool with_interference) {
  const double rb = cfg.rho_bar();
  const int kp = partner0(k, cfg.K);
  const std::size_t ku = static_cast<std::size_t>(k);
  const std::size_t kpu = static_cast<std::size_t>(kp);
  const CMatrix& u = state.U[ku];

  RateTerms terms;
  terms.base = u.adjoint() * noise_cov(cfg, ch, state.alpha, k) * u;
  if (with_interference) {
    for (int j = 0; j < cfg.users(); ++j) {
      if (j == k || j == kp) continue;
      const std::size_t ju = static_cast<std::size_t>(j);
      const CMatrix hbar = u.adjoint() * effective_channel(ch, state.alpha, k, j) *
                           state.V[ju];
      terms.base.noalias() += (rb * cfg.P[ju] / cfg.d) * hbar * hbar.adjoint();
    }
  }
  const CMatrix hdes =
      u.adjoint() * effective_channel(ch, state.alpha, k, kp) * state.V[kpu];
  terms.signal = (rb * cfg.P[kpu] / cfg.d) * hdes * hdes.adjoint();
  return terms;
}

double rate_from_terms(const RateTerms& terms) {
  return 0.5 * (log2det_hermitian_pd(terms.base + terms.signal) -
                log2det_hermitian_pd(terms.base));
}

}  // namespace

CMatrix noise_cov(const SystemConfig& cfg, const ChannelSet& ch, double alpha,
                  int k) {
  if (alpha < 0.0) throw OutOfRange("noise_cov: alpha must be >= 0");
  const double sid2 = id_noise_variance(cfg);
  const CMatrix& hd = ch.H_down[static_cast<std::size_t>(k)];
  return cfg.rho_bar() * sid2 * alpha * alpha * (hd * hd.adjoint()) +
         cfg.sigma2 * CMatrix::Identity(cfg.M, cfg.M);
}

double user_rate(const SystemConfig& cfg, const ChannelSet& ch,
                 const TransceiverState& state, int k) {
  return rate_from_terms(rate_terms(cfg, ch, state, k, true));
}

double perfect_rate(const SystemConfig& cfg, const ChannelSet& ch,
                    const TransceiverState& state, int k) {
  return rate_from_terms(rate_terms(cfg, ch, state, k, false));
}

double sum_rate(const SystemConfig& cfg, const ChannelSet& ch,
                const TransceiverState& state) {
  double acc = 0.0;
  for (int k = 0; k < cfg.users(); ++k) acc += user_rate(cfg, ch, state, k);
  return acc;
}

double harvested_energy(const SystemConfig& cfg, const ChannelSet& ch,
                        const std::vector<CMatrix>& V) {
  double acc = 0.0;
  for (int j = 0; j < cfg.users(); ++j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    acc += (cfg.P[ju] / cfg.d) * (ch.H_up[ju] * V[ju]).squaredNorm();
  }
  return cfg.zeta * cfg.rho * acc;
}

double rate_loss_bound(const SystemConfig& cfg, const std::vector<double>& z,
                       int k) {
  if (cfg.rho >= 1.0) throw FullSplit("rate_loss_bound: rho = 1");
  if (z.size() != static_cast<std::size_t>(cfg.users()))
    throw OutOfRange("rate_loss_bound: z must have 2K entries");
  for (double zi : z)
    if (zi < 0.0 || zi > static_cast<double>(cfg.d))
      throw EntryRange("rate_loss_bound: z entries must lie in [0, d]");

  const double rb = cfg.rho_bar();
  const double md = static_cast<double>(cfg.M) / (cfg.d * (cfg.M - cfg.d));
  const std::size_t ku = static_cast<std::size_t>(k);
  const int kp = partner0(k, cfg.K);

  double num = 0.0;
  for (int j = 0; j < cfg.users(); ++j) {
    if (j == k || j == kp) continue;
    const std::size_t ju = static_cast<std::size_t>(j);
    num += cfg.P[ju] * z[ju] * cfg.beta_up[ju];
  }
  num *= md * rb;

  const double relay_path = cfg.sigma2 / (cfg.beta_down[ku] * cfg.P_r);
  double sum_powers = 0.0;
  for (int j = 0; j < cfg.users(); ++j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    sum_powers += cfg.P[ju] * cfg.beta_up[ju] * relay_path;
  }
  const double sigma_bar2 = cfg.sigmaR2 * (1.0 + relay_path);
  const double delta_bar2 = cfg.delta2 * (1.0 + relay_path);
  const double den = rb * (sum_powers + sigma_bar2) + delta_bar2;

  return (cfg.d / 2.0) * std::log2(1.0 + num / den);
}

double cd_budget(const SystemConfig& cfg, double c, int j) {
  if (c <= 1.0) throw BadFactor("cd_budget: rate-loss factor must be > 1");
  if (cfg.rho >= 1.0) throw FullSplit("cd_budget: rho = 1");
  const double rb = cfg.rho_bar();
  const double md = static_cast<double>(cfg.M) / (cfg.d * (cfg.M - cfg.d));
  const std::size_t ju = static_cast<std::size_t>(j);

  const double relay_path = cfg.sigma2 / (cfg.beta_down[ju] * cfg.P_r);
  double sum_powers = 0.0;
  for (int i = 0; i < cfg.users(); ++i) {
    const std::size_t iu = static_cast<std::size_t>(i);
    sum_powers += cfg.P[iu] * cfg.beta_up[iu] * relay_path;
  }
  const double sigma_bar2 = cfg.sigmaR2 * (1.0 + relay_path);
  const double delta_bar2 = cfg.delta2 * (1.0 + relay_path);

  return (c - 1.0) / (2.0 * cfg.P[ju] * cfg.beta_up[ju] * md * (cfg.K - 1)) *
         (sum_powers + sigma_bar2 + delta_bar2 / rb);
}

EnergyBounds energy_bounds(const SystemConfig& cfg, const ChannelSet& ch,
                           const std::vector<CMatrix>& V_ia,
                           const std::vector<double>& z,
                           const std::vector<CMatrix>& V_n) {
  EnergyBounds out;
  double lower = 0.0;
  double upper = 0.0;
  for (int j = 0; j < cfg.users(); ++j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    if (z[ju] < 0.0 || z[ju] > static_cast<double>(cfg.d))
      throw EntryRange("energy_bounds: z entries must lie in [0, d]");
    const double frac = z[ju] / cfg.d;
    const double e_ia = (ch.H_up[ju] * V_ia[ju]).squaredNorm();
    const double e_null = (ch.H_up[ju] * V_n[ju]).squaredNorm();
    lower += (cfg.P[ju] / cfg.d) * (e_ia * (1.0 - frac) + e_null * frac);

    const HermEig eig = hermitian_eig(ch.H_up[ju].adjoint() * ch.H_up[ju]);
    upper += cfg.P[ju] * eig.values(0);
  }
  out.lower = cfg.zeta * cfg.rho * lower;
  out.upper = cfg.zeta * cfg.rho * upper;
  return out;
}

ExpectedEnergyBounds expected_energy_bounds(const SystemConfig& cfg) {
  const double p = cfg.P.empty() ? 0.0 : cfg.P.front();
  for (double pi : cfg.P)
    if (pi != p) throw NonUniform("expected_energy_bounds: powers not uniform");
  for (double b : cfg.beta_up)
    if (b != 1.0) throw NonUniform("expected_energy_bounds: beta_up not unit");
  for (double b : cfg.beta_down)
    if (b != 1.0)
      throw NonUniform("expected_energy_bounds: beta_down not unit");

  const double front = 2.0 * cfg.K * p * cfg.zeta * cfg.rho;
  const double rd = static_cast<double>(cfg.R) * cfg.d;
  ExpectedEnergyBounds out;
  out.approx = front * cfg.R;
  out.upper = front * rd * std::pow((cfg.R + cfg.d) / (rd + 1.0), 2.0 / 3.0);
  return out;
}

std::vector<RateEnergyPoint> rate_energy_region(
    const SystemConfig& cfg, const ChannelSet& ch,
    const TransceiverState& state, double z,
    const std::vector<double>& rho_grid, const std::string& method,
    bool parallel) {
  std::vector<RateEnergyPoint> points(rho_grid.size());
  parallel_for_index(rho_grid.size(), parallel, [&](std::size_t i) {
    SystemConfig local = cfg;
    local.rho = rho_grid[i];
    const TransceiverState st = state_for_precoders(local, ch, state.V);
    RateEnergyPoint pt;
    pt.rho = local.rho;
    pt.z = z;
    pt.sum_rate = sum_rate(local, ch, st);
    pt.energy = harvested_energy(local, ch, st.V);
    pt.method = method;
    points[i] = pt;
  });
  return points;
}

}  // namespace twr
