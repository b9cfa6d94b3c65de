#include "twr/sermc.hpp"

#include <cmath>
#include <vector>

#include "twr/parallel.hpp"
#include "twr/rng.hpp"

namespace twr {

namespace {

constexpr double kZfRidge = 1e-9;

inline Complex qpsk_point(int idx) {
  static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const double re = (idx & 2) ? -inv_sqrt2 : inv_sqrt2;
  const double im = (idx & 1) ? -inv_sqrt2 : inv_sqrt2;
  return {re, im};
}

inline int qpsk_slice(const Complex& v) {
  return ((v.real() < 0.0) ? 2 : 0) | ((v.imag() < 0.0) ? 1 : 0);
}

// Receive-side matrices that stay fixed across symbols.
struct ReceiverFront {
  CMatrix relay_path;  // alpha * U_k^H H_down[k], d x R
  CMatrix self_gain;   // sqrt(rb) * relay_path * H_up[k] V_k, d x d
  CMatrix equalizer;   // d x d, applied to the combined signal
};

}  // namespace

double simulate_ser(const SystemConfig& cfg, const ChannelSet& ch,
                    const TransceiverState& state, std::int64_t n_symbols,
                    std::uint64_t seed, const SerOptions& opt) {
  if (cfg.rho >= 1.0) throw FullSplit("simulate_ser: rho = 1");
  if (n_symbols < 1) throw OutOfRange("simulate_ser: n_symbols must be >= 1");
  const int n = cfg.users();
  const int d = cfg.d;
  const double rb = cfg.rho_bar();
  const double sqrt_rb = std::sqrt(rb);

  std::vector<CMatrix> tx(static_cast<std::size_t>(n));  // H_up[j] V_j
  for (int j = 0; j < n; ++j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    tx[ju] = ch.H_up[ju] * state.V[ju];
  }

  std::vector<ReceiverFront> rx(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const std::size_t ku = static_cast<std::size_t>(k);
    const int kp = partner0(k, cfg.K);
    ReceiverFront& front = rx[ku];
    front.relay_path =
        state.alpha * (state.U[ku].adjoint() * ch.H_down[ku]);
    front.self_gain = sqrt_rb * (front.relay_path * tx[ku]);
    const CMatrix f =
        sqrt_rb * (front.relay_path * tx[static_cast<std::size_t>(kp)]);
    if (opt.detector == Detector::RegularizedZf) {
      const CMatrix gram =
          f.adjoint() * f + kZfRidge * CMatrix::Identity(d, d);
      front.equalizer = gram.llt().solve(f.adjoint());
    } else {
      // MMSE with the post-combiner effective noise covariance.
      const double sid2 = id_noise_variance(cfg);
      const CMatrix& u = state.U[ku];
      const CMatrix nk =
          rb * sid2 * state.alpha * state.alpha *
              (u.adjoint() * ch.H_down[ku]) *
              (u.adjoint() * ch.H_down[ku]).adjoint() +
          cfg.sigma2 * CMatrix::Identity(d, d);
      const double ps =
          cfg.P[static_cast<std::size_t>(kp)] / static_cast<double>(d);
      front.equalizer =
          ps * f.adjoint() * (ps * (f * f.adjoint()) + nk).inverse();
    }
  }

  const std::int64_t batch = std::max(1, opt.batch_size);
  const std::int64_t n_batches = (n_symbols + batch - 1) / batch;
  std::vector<std::int64_t> errors(static_cast<std::size_t>(n_batches), 0);

  parallel_for_index(
      static_cast<std::size_t>(n_batches), opt.parallel, [&](std::size_t b) {
        Rng rng(seed, Stream::SerBatch, static_cast<std::uint64_t>(b));
        const std::int64_t lo = static_cast<std::int64_t>(b) * batch;
        const std::int64_t hi = std::min(n_symbols, lo + batch);
        std::vector<int> idx(static_cast<std::size_t>(n * d));
        std::vector<CVector> s(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
          s[static_cast<std::size_t>(j)] = CVector(d);
        CVector y_r(cfg.R), y_id(cfg.R), post(d), shat(d);
        std::int64_t local_errors = 0;

        for (std::int64_t use = lo; use < hi; ++use) {
          for (int j = 0; j < n; ++j) {
            const std::size_t ju = static_cast<std::size_t>(j);
            const double amp = std::sqrt(cfg.P[ju] / d);
            for (int i = 0; i < d; ++i) {
              const int q = rng.qpsk_index();
              idx[static_cast<std::size_t>(j * d + i)] = q;
              s[ju](i) = amp * qpsk_point(q);
            }
          }
          for (Eigen::Index r = 0; r < cfg.R; ++r)
            y_r(r) = rng.cgauss(cfg.sigmaR2);
          for (int j = 0; j < n; ++j)
            y_r.noalias() += tx[static_cast<std::size_t>(j)] *
                             s[static_cast<std::size_t>(j)];
          for (Eigen::Index r = 0; r < cfg.R; ++r)
            y_id(r) = sqrt_rb * y_r(r) + rng.cgauss(cfg.delta2);

          for (int k = 0; k < n; ++k) {
            const std::size_t ku = static_cast<std::size_t>(k);
            const int kp = partner0(k, cfg.K);
            post.noalias() = rx[ku].relay_path * y_id;
            for (int i = 0; i < d; ++i) post(i) += rng.cgauss(cfg.sigma2);
            post.noalias() -= rx[ku].self_gain * s[ku];
            shat.noalias() = rx[ku].equalizer * post;
            for (int i = 0; i < d; ++i) {
              if (qpsk_slice(shat(i)) !=
                  idx[static_cast<std::size_t>(kp * d + i)])
                ++local_errors;
            }
          }
        }
        errors[b] = local_errors;
      });

  std::int64_t total = 0;
  for (std::int64_t e : errors) total += e;
  const double denom = static_cast<double>(n_symbols) * n * d;
  return static_cast<double>(total) / denom;
}

}  // namespace twr
