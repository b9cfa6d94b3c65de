// Compares the serial reference path against the OpenMP path on the two
// hot loops (TWR-IA Monte Carlo trials, SER symbol batches) and checks
// that both produce identical numbers.

#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "twr/harness.hpp"
#include "twr/metrics.hpp"
#include "twr/parallel.hpp"
#include "twr/rng.hpp"
#include "twr/sermc.hpp"

namespace {

double now() {
#ifdef _OPENMP
  return omp_get_wtime();
#else
  return 0.0;
#endif
}

double trial_workload(const twr::SystemConfig& cfg, int trials, bool parallel,
                      double* checksum) {
  std::vector<double> rates(static_cast<std::size_t>(trials), 0.0);
  const double t0 = now();
  twr::parallel_for_index(
      static_cast<std::size_t>(trials), parallel, [&](std::size_t t) {
        const std::uint64_t seed = twr::trial_seed(42, t);
        const twr::ChannelSet ch = twr::draw_channels(cfg, seed);
        const twr::TransceiverState st =
            twr::run_twria(cfg, ch, seed, 400, 1e-10);
        rates[t] = twr::sum_rate(cfg, ch, st);
      });
  const double t1 = now();
  *checksum = 0.0;
  for (double r : rates) *checksum += r;
  return t1 - t0;
}

double ser_workload(const twr::SystemConfig& cfg, bool parallel,
                    double* checksum) {
  const std::uint64_t seed = twr::trial_seed(43, 0);
  const twr::ChannelSet ch = twr::draw_channels(cfg, seed);
  const twr::TransceiverState st = twr::run_twria(cfg, ch, seed, 800, 1e-10);
  twr::SerOptions opt;
  opt.parallel = parallel;
  const double t0 = now();
  *checksum = twr::simulate_ser(cfg, ch, st, 400000, seed, opt);
  return now() - t0;
}

}  // namespace

int main() {
  const twr::SystemConfig cfg = twr::config_at_snr(twr::default_config(), 17.0);
  std::printf("workers: %d\n", twr::worker_count());

  double serial_sum = 0.0, parallel_sum = 0.0;
  const double ts = trial_workload(cfg, 16, false, &serial_sum);
  const double tp = trial_workload(cfg, 16, true, &parallel_sum);
  std::printf("twria trials   serial %.3fs  openmp %.3fs  speedup %.2fx  %s\n",
              ts, tp, ts / tp,
              serial_sum == parallel_sum ? "identical" : "MISMATCH");

  double serial_ser = 0.0, parallel_ser = 0.0;
  const double ss = ser_workload(cfg, false, &serial_ser);
  const double sp = ser_workload(cfg, true, &parallel_ser);
  std::printf("ser batches    serial %.3fs  openmp %.3fs  speedup %.2fx  %s\n",
              ss, sp, ss / sp,
              serial_ser == parallel_ser ? "identical" : "MISMATCH");

  return (serial_sum == parallel_sum && serial_ser == parallel_ser) ? 0 : 1;
}
