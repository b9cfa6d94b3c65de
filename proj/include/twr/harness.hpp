#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twr/sysmodel.hpp"

namespace twr {

enum class ScenarioKind {
  Convergence,
  SumrateVsSnr,
  RateEnergyRegion,
  RateEnergyVsZ,
  SerVsSnr,
  BoundsAudit,
};

ScenarioKind scenario_from_name(const std::string& name);
std::string scenario_name(ScenarioKind kind);

/// One batch experiment mirroring a figure sweep.
struct Scenario {
  ScenarioKind kind = ScenarioKind::Convergence;
  std::vector<double> snr_list;  // dB; empty -> per-scenario default
  std::vector<double> z_list;    // CD budgets; empty -> default
  int trials = 0;                // 0 -> per-scenario default
  std::uint64_t seed = 1;
  std::string output_path;       // empty -> "<scenario>.csv"
  int max_iter = 0;              // 0 -> SNR-scaled default
  double tol = 1e-8;
  bool balanced_all_users = true;  // false: only user 1 is balanced
  std::int64_t n_symbols = 20000;  // SER scenario
  std::vector<double> rho_grid;    // region scenario; empty -> 0:0.01:0.99
  bool parallel = true;
};

/// Desk-scale iteration caps, scaled with SNR: 2e3 up to 12 dB, 2e4 up
/// to 20 dB, 2e5 beyond.
int default_max_iter(double snr_db);

/// SNR(dB) -> uniform power assignment P_j = P_r = sigma2 * 10^(snr/10).
SystemConfig config_at_snr(const SystemConfig& cfg, double snr_db);

/// Runs the scenario and writes one CSV with a header row. Returns the
/// process exit code: nonzero iff any audit flag failed.
int run_scenario(const Scenario& sc, const SystemConfig& cfg);

}  // namespace twr
