#include "twr/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "twr/metrics.hpp"
#include "twr/parallel.hpp"
#include "twr/precoders.hpp"
#include "twr/rng.hpp"
#include "twr/sermc.hpp"

namespace twr {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(std::int64_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(const std::string& v) { return v; }

template <typename... Ts>
std::string row(const Ts&... vals) {
  std::string out;
  bool first = true;
  ((out += (first ? (first = false, "") : ","), out += fmt(vals)), ...);
  out += '\n';
  return out;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << header << '\n';
  for (const std::string& r : rows) out << r;
  if (!out) throw IoError("write failed for output file: " + path);
}

struct Stats {
  double mean = 0.0;
  double stddev = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) /
           static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double acc = 0.0;
    for (double x : xs) acc += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(acc / static_cast<double>(xs.size() - 1));
  }
  return s;
}

// Balanced precoder set: every user displaced by the same budget, or
// only the first user when balanced_all_users is off.
std::vector<CMatrix> balanced_set(const SystemConfig& cfg,
                                  const ChannelSet& ch,
                                  const std::vector<CMatrix>& v_ia, double z,
                                  bool all_users) {
  std::vector<CMatrix> v = v_ia;
  const int last = all_users ? cfg.users() : 1;
  for (int j = 0; j < last; ++j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    v[ju] = balanced_precoder(ch.H_up[ju], v_ia[ju], z);
  }
  return v;
}

std::vector<CMatrix> eh_max_set(const SystemConfig& cfg,
                                const ChannelSet& ch) {
  std::vector<CMatrix> v;
  v.reserve(static_cast<std::size_t>(cfg.users()));
  for (int j = 0; j < cfg.users(); ++j)
    v.push_back(eh_max_precoder(ch.H_up[static_cast<std::size_t>(j)], cfg.d));
  return v;
}

// Null-space slices used for the harvested-energy lower bound: the
// algorithm's own S factor per user.
std::vector<CMatrix> null_slices(const SystemConfig& cfg,
                                 const ChannelSet& ch,
                                 const std::vector<CMatrix>& v_ia) {
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(cfg.users()));
  for (int j = 0; j < cfg.users(); ++j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    const CMatrix vnull = null_basis(v_ia[ju]);
    out.push_back(vnull * compute_S(ch.H_up[ju], v_ia[ju], vnull).S);
  }
  return out;
}

int scenario_default_trials(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Convergence:
      return 32;
    case ScenarioKind::SerVsSnr:
      return 20;
    case ScenarioKind::BoundsAudit:
      return 200;
    default:
      return 100;
  }
}

std::vector<double> scenario_default_snr(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Convergence:
      return {8.5, 17.0, 25.0};
    case ScenarioKind::SumrateVsSnr:
      return {5.0, 10.0, 15.0, 20.0, 25.0};
    case ScenarioKind::SerVsSnr:
      return {10.0, 15.0, 20.0, 25.0};
    default:
      return {25.0};
  }
}

std::vector<double> scenario_default_z(ScenarioKind kind) {
  if (kind == ScenarioKind::RateEnergyVsZ) {
    std::vector<double> z;
    for (int i = 0; i <= 12; ++i) z.push_back(0.025 * i);
    return z;
  }
  return {0.1};
}

struct Run {
  Scenario sc;
  SystemConfig base;

  int iter_cap(double snr) const {
    return sc.max_iter > 0 ? sc.max_iter : default_max_iter(snr);
  }
};

int run_convergence(const Run& run) {
  const Scenario& sc = run.sc;
  std::vector<std::string> rows;
  for (std::size_t si = 0; si < sc.snr_list.size(); ++si) {
    const double snr = sc.snr_list[si];
    const SystemConfig cfg = config_at_snr(run.base, snr);
    std::vector<std::string> per_trial(static_cast<std::size_t>(sc.trials));
    parallel_for_index(
        static_cast<std::size_t>(sc.trials), sc.parallel, [&](std::size_t t) {
          const std::uint64_t tseed =
              trial_seed(sc.seed, si * static_cast<std::size_t>(sc.trials) + t);
          const ChannelSet ch = draw_channels(cfg, tseed);
          std::string local;
          const IterationObserver observer = [&](const TransceiverState& st) {
            local += row(snr, static_cast<std::int64_t>(t), st.iterations,
                         st.mse, leakage(cfg, ch, st), sum_rate(cfg, ch, st));
          };
          run_twria(cfg, ch, tseed, run.iter_cap(snr), sc.tol, observer);
          per_trial[t] = std::move(local);
        });
    for (std::string& r : per_trial) rows.push_back(std::move(r));
  }
  write_csv(sc.output_path, "snr_db,seed,iter,mse,leakage,sum_rate", rows);
  return 0;
}

int run_sumrate_vs_snr(const Run& run) {
  const Scenario& sc = run.sc;
  std::vector<std::string> rows;
  for (std::size_t si = 0; si < sc.snr_list.size(); ++si) {
    const double snr = sc.snr_list[si];
    const SystemConfig cfg = config_at_snr(run.base, snr);
    const std::size_t methods = 2 + sc.z_list.size();
    std::vector<std::vector<double>> rates(
        methods, std::vector<double>(static_cast<std::size_t>(sc.trials)));
    parallel_for_index(
        static_cast<std::size_t>(sc.trials), sc.parallel, [&](std::size_t t) {
          const std::uint64_t tseed =
              trial_seed(sc.seed, si * static_cast<std::size_t>(sc.trials) + t);
          const ChannelSet ch = draw_channels(cfg, tseed);
          const TransceiverState ia =
              run_twria(cfg, ch, tseed, run.iter_cap(snr), sc.tol);
          rates[0][t] = sum_rate(cfg, ch, ia);
          for (std::size_t zi = 0; zi < sc.z_list.size(); ++zi) {
            const std::vector<CMatrix> vb = balanced_set(
                cfg, ch, ia.V, sc.z_list[zi], sc.balanced_all_users);
            rates[1 + zi][t] =
                sum_rate(cfg, ch, state_for_precoders(cfg, ch, vb));
          }
          rates[methods - 1][t] = sum_rate(
              cfg, ch, state_for_precoders(cfg, ch, eh_max_set(cfg, ch)));
        });
    const Stats ia_stats = stats_of(rates[0]);
    rows.push_back(row(snr, std::string("twria"), 0.0, ia_stats.mean,
                       ia_stats.stddev));
    for (std::size_t zi = 0; zi < sc.z_list.size(); ++zi) {
      const Stats s = stats_of(rates[1 + zi]);
      rows.push_back(
          row(snr, std::string("balanced"), sc.z_list[zi], s.mean, s.stddev));
    }
    const Stats eh_stats = stats_of(rates[methods - 1]);
    rows.push_back(
        row(snr, std::string("eh_max"), 0.0, eh_stats.mean, eh_stats.stddev));
  }
  write_csv(sc.output_path, "snr_db,method,z,mean_sum_rate,std", rows);
  return 0;
}

int run_rate_energy_region(const Run& run) {
  const Scenario& sc = run.sc;
  const double snr = sc.snr_list.front();
  const SystemConfig cfg = config_at_snr(run.base, snr);
  const std::size_t n_rho = sc.rho_grid.size();
  const std::size_t methods = 2 + sc.z_list.size();

  // accumulators [method][rho]
  std::vector<std::vector<double>> rate_acc(methods,
                                            std::vector<double>(n_rho, 0.0));
  std::vector<std::vector<double>> energy_acc(methods,
                                              std::vector<double>(n_rho, 0.0));
  std::vector<std::vector<std::vector<RateEnergyPoint>>> per_trial(
      static_cast<std::size_t>(sc.trials));

  parallel_for_index(
      static_cast<std::size_t>(sc.trials), sc.parallel, [&](std::size_t t) {
        const std::uint64_t tseed = trial_seed(sc.seed, t);
        const ChannelSet ch = draw_channels(cfg, tseed);
        const TransceiverState ia =
            run_twria(cfg, ch, tseed, run.iter_cap(snr), sc.tol);
        std::vector<std::vector<RateEnergyPoint>> sets;
        sets.push_back(
            rate_energy_region(cfg, ch, ia, 0.0, sc.rho_grid, "twria"));
        for (double z : sc.z_list) {
          const std::vector<CMatrix> vb =
              balanced_set(cfg, ch, ia.V, z, sc.balanced_all_users);
          TransceiverState st = ia;
          st.V = vb;
          sets.push_back(
              rate_energy_region(cfg, ch, st, z, sc.rho_grid, "balanced"));
        }
        TransceiverState eh = ia;
        eh.V = eh_max_set(cfg, ch);
        sets.push_back(
            rate_energy_region(cfg, ch, eh, 0.0, sc.rho_grid, "eh_max"));
        per_trial[t] = std::move(sets);
      });

  for (const auto& sets : per_trial)
    for (std::size_t m = 0; m < methods; ++m)
      for (std::size_t i = 0; i < n_rho; ++i) {
        rate_acc[m][i] += sets[m][i].sum_rate;
        energy_acc[m][i] += sets[m][i].energy;
      }

  std::vector<std::string> rows;
  const double inv = 1.0 / static_cast<double>(sc.trials);
  for (std::size_t i = 0; i < n_rho; ++i) {
    rows.push_back(row(sc.rho_grid[i], std::string("twria"), 0.0,
                       rate_acc[0][i] * inv, energy_acc[0][i] * inv));
    for (std::size_t zi = 0; zi < sc.z_list.size(); ++zi)
      rows.push_back(row(sc.rho_grid[i], std::string("balanced"),
                         sc.z_list[zi], rate_acc[1 + zi][i] * inv,
                         energy_acc[1 + zi][i] * inv));
    rows.push_back(row(sc.rho_grid[i], std::string("eh_max"), 0.0,
                       rate_acc[methods - 1][i] * inv,
                       energy_acc[methods - 1][i] * inv));
  }
  write_csv(sc.output_path, "rho,method,z,mean_rate,mean_energy", rows);
  return 0;
}

int run_rate_energy_vs_z(const Run& run) {
  const Scenario& sc = run.sc;
  const double snr = sc.snr_list.front();
  const SystemConfig cfg = config_at_snr(run.base, snr);
  const std::size_t nz = sc.z_list.size();

  struct Acc {
    double rate = 0.0, energy = 0.0, lower = 0.0, upper = 0.0;
  };
  std::vector<std::vector<Acc>> per_trial(
      static_cast<std::size_t>(sc.trials), std::vector<Acc>(nz));

  parallel_for_index(
      static_cast<std::size_t>(sc.trials), sc.parallel, [&](std::size_t t) {
        const std::uint64_t tseed = trial_seed(sc.seed, t);
        const ChannelSet ch = draw_channels(cfg, tseed);
        const TransceiverState ia =
            run_twria(cfg, ch, tseed, run.iter_cap(snr), sc.tol);
        const std::vector<CMatrix> vnulls = null_slices(cfg, ch, ia.V);
        for (std::size_t zi = 0; zi < nz; ++zi) {
          const double z = sc.z_list[zi];
          const std::vector<CMatrix> vb =
              balanced_set(cfg, ch, ia.V, z, sc.balanced_all_users);
          const TransceiverState st = state_for_precoders(cfg, ch, vb);
          std::vector<double> zv(static_cast<std::size_t>(cfg.users()),
                                 sc.balanced_all_users ? z : 0.0);
          zv[0] = z;
          const EnergyBounds eb = energy_bounds(cfg, ch, ia.V, zv, vnulls);
          Acc& acc = per_trial[t][zi];
          acc.rate = sum_rate(cfg, ch, st);
          acc.energy = harvested_energy(cfg, ch, st.V);
          acc.lower = eb.lower;
          acc.upper = eb.upper;
        }
      });

  std::vector<std::string> rows;
  for (std::size_t zi = 0; zi < nz; ++zi) {
    Acc mean;
    for (std::size_t t = 0; t < per_trial.size(); ++t) {
      mean.rate += per_trial[t][zi].rate;
      mean.energy += per_trial[t][zi].energy;
      mean.lower += per_trial[t][zi].lower;
      mean.upper += per_trial[t][zi].upper;
    }
    const double inv = 1.0 / static_cast<double>(sc.trials);
    rows.push_back(row(sc.z_list[zi], mean.rate * inv, mean.energy * inv,
                       mean.lower * inv, mean.upper * inv));
  }
  write_csv(sc.output_path,
            "z,mean_rate,mean_energy,lemma3_lower,lemma3_upper", rows);
  return 0;
}

int run_ser_vs_snr(const Run& run) {
  const Scenario& sc = run.sc;
  std::vector<std::string> rows;
  for (std::size_t si = 0; si < sc.snr_list.size(); ++si) {
    const double snr = sc.snr_list[si];
    const SystemConfig cfg = config_at_snr(run.base, snr);
    const std::size_t methods = 2 + sc.z_list.size();
    std::vector<std::vector<double>> ser(
        methods, std::vector<double>(static_cast<std::size_t>(sc.trials)));
    parallel_for_index(
        static_cast<std::size_t>(sc.trials), sc.parallel, [&](std::size_t t) {
          const std::uint64_t tseed =
              trial_seed(sc.seed, si * static_cast<std::size_t>(sc.trials) + t);
          const ChannelSet ch = draw_channels(cfg, tseed);
          const TransceiverState ia =
              run_twria(cfg, ch, tseed, run.iter_cap(snr), sc.tol);
          SerOptions so;
          so.parallel = false;  // trials already run in parallel
          ser[0][t] = simulate_ser(cfg, ch, ia, sc.n_symbols, tseed, so);
          for (std::size_t zi = 0; zi < sc.z_list.size(); ++zi) {
            const std::vector<CMatrix> vb = balanced_set(
                cfg, ch, ia.V, sc.z_list[zi], sc.balanced_all_users);
            ser[1 + zi][t] = simulate_ser(
                cfg, ch, state_for_precoders(cfg, ch, vb), sc.n_symbols,
                tseed, so);
          }
          ser[methods - 1][t] = simulate_ser(
              cfg, ch, state_for_precoders(cfg, ch, eh_max_set(cfg, ch)),
              sc.n_symbols, tseed, so);
        });
    rows.push_back(row(snr, std::string("twria"), 0.0, stats_of(ser[0]).mean));
    for (std::size_t zi = 0; zi < sc.z_list.size(); ++zi)
      rows.push_back(row(snr, std::string("balanced"), sc.z_list[zi],
                         stats_of(ser[1 + zi]).mean));
    rows.push_back(row(snr, std::string("eh_max"), 0.0,
                       stats_of(ser[methods - 1]).mean));
  }
  write_csv(sc.output_path, "snr_db,method,z,ser", rows);
  return 0;
}

int run_bounds_audit(const Run& run) {
  const Scenario& sc = run.sc;
  const double snr = sc.snr_list.front();
  const SystemConfig cfg = config_at_snr(run.base, snr);
  const double z = sc.z_list.front();

  struct Audit {
    double qr = 0.0, lower = 0.0, upper = 0.0, loss = 0.0, bound = 0.0;
    bool ok_energy = false;
  };
  std::vector<Audit> audits(static_cast<std::size_t>(sc.trials));

  parallel_for_index(
      static_cast<std::size_t>(sc.trials), sc.parallel, [&](std::size_t t) {
        const std::uint64_t tseed = trial_seed(sc.seed, t);
        const ChannelSet ch = draw_channels(cfg, tseed);
        const TransceiverState ia =
            run_twria(cfg, ch, tseed, run.iter_cap(snr), sc.tol);
        const std::vector<CMatrix> vb =
            balanced_set(cfg, ch, ia.V, z, sc.balanced_all_users);
        const TransceiverState st = state_for_precoders(cfg, ch, vb);

        std::vector<double> zvec(static_cast<std::size_t>(cfg.users()),
                                 sc.balanced_all_users ? z : 0.0);
        zvec[0] = z;
        const EnergyBounds eb =
            energy_bounds(cfg, ch, ia.V, zvec, null_slices(cfg, ch, ia.V));

        Audit& a = audits[t];
        a.qr = harvested_energy(cfg, ch, st.V);
        a.lower = eb.lower;
        a.upper = eb.upper;
        a.ok_energy =
            a.qr >= a.lower - 1e-9 && a.qr <= a.upper + 1e-9;
        double loss = 0.0;
        double bound = 0.0;
        for (int k = 0; k < cfg.users(); ++k) {
          loss += user_rate(cfg, ch, ia, k) - user_rate(cfg, ch, st, k);
          bound += rate_loss_bound(cfg, zvec, k);
        }
        a.loss = loss / cfg.users();
        a.bound = bound / cfg.users();
      });

  std::vector<std::string> rows;
  bool all_ok = true;
  double mean_loss = 0.0;
  double mean_bound = 0.0;
  for (std::size_t t = 0; t < audits.size(); ++t) {
    const Audit& a = audits[t];
    rows.push_back(row(static_cast<std::int64_t>(t), a.qr, a.lower, a.upper,
                       a.loss, a.bound,
                       static_cast<std::int64_t>(a.ok_energy ? 1 : 0)));
    all_ok = all_ok && a.ok_energy;
    mean_loss += a.loss;
    mean_bound += a.bound;
  }
  mean_loss /= static_cast<double>(sc.trials);
  mean_bound /= static_cast<double>(sc.trials);
  const bool mean_ok = mean_loss <= mean_bound;
  // Summary row (trial = -1): means, with the Lemma-2 mean-loss flag.
  double mq = 0.0, ml = 0.0, mu = 0.0;
  for (const Audit& a : audits) {
    mq += a.qr;
    ml += a.lower;
    mu += a.upper;
  }
  const double inv = 1.0 / static_cast<double>(sc.trials);
  rows.push_back(row(static_cast<std::int64_t>(-1), mq * inv, ml * inv,
                     mu * inv, mean_loss, mean_bound,
                     static_cast<std::int64_t>(mean_ok ? 1 : 0)));
  write_csv(sc.output_path, "trial,Q_r,lower,upper,rate_loss,lemma2_bound,ok",
            rows);
  return (all_ok && mean_ok) ? 0 : 1;
}

}  // namespace

ScenarioKind scenario_from_name(const std::string& name) {
  if (name == "convergence") return ScenarioKind::Convergence;
  if (name == "sumrate_vs_snr") return ScenarioKind::SumrateVsSnr;
  if (name == "rate_energy_region") return ScenarioKind::RateEnergyRegion;
  if (name == "rate_energy_vs_z") return ScenarioKind::RateEnergyVsZ;
  if (name == "ser_vs_snr") return ScenarioKind::SerVsSnr;
  if (name == "bounds_audit") return ScenarioKind::BoundsAudit;
  throw ConfigError("unknown scenario: " + name);
}

std::string scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Convergence:
      return "convergence";
    case ScenarioKind::SumrateVsSnr:
      return "sumrate_vs_snr";
    case ScenarioKind::RateEnergyRegion:
      return "rate_energy_region";
    case ScenarioKind::RateEnergyVsZ:
      return "rate_energy_vs_z";
    case ScenarioKind::SerVsSnr:
      return "ser_vs_snr";
    case ScenarioKind::BoundsAudit:
      return "bounds_audit";
  }
  return "unknown";
}

int default_max_iter(double snr_db) {
  if (snr_db <= 12.0) return 2000;
  if (snr_db <= 20.0) return 20000;
  return 200000;
}

SystemConfig config_at_snr(const SystemConfig& cfg, double snr_db) {
  SystemConfig out = cfg;
  out.set_uniform_power(cfg.sigma2 * std::pow(10.0, snr_db / 10.0));
  return out;
}

int run_scenario(const Scenario& sc_in, const SystemConfig& cfg) {
  cfg.validate();
  Run run;
  run.sc = sc_in;
  run.base = cfg;
  Scenario& sc = run.sc;
  if (sc.snr_list.empty()) sc.snr_list = scenario_default_snr(sc.kind);
  if (sc.z_list.empty()) sc.z_list = scenario_default_z(sc.kind);
  if (sc.trials <= 0) sc.trials = scenario_default_trials(sc.kind);
  if (sc.output_path.empty()) sc.output_path = scenario_name(sc.kind) + ".csv";
  if (sc.rho_grid.empty())
    for (int i = 0; i < 100; ++i) sc.rho_grid.push_back(0.01 * i);
  for (double r : sc.rho_grid)
    if (r < 0.0 || r >= 1.0)
      throw ConfigError("rho grid values must lie in [0, 1)");

  switch (sc.kind) {
    case ScenarioKind::Convergence:
      return run_convergence(run);
    case ScenarioKind::SumrateVsSnr:
      return run_sumrate_vs_snr(run);
    case ScenarioKind::RateEnergyRegion:
      return run_rate_energy_region(run);
    case ScenarioKind::RateEnergyVsZ:
      return run_rate_energy_vs_z(run);
    case ScenarioKind::SerVsSnr:
      return run_ser_vs_snr(run);
    case ScenarioKind::BoundsAudit:
      return run_bounds_audit(run);
  }
  throw ConfigError("unhandled scenario kind");
}

}  // namespace twr
