#pragma once

#include <optional>
#include <string>
#include <vector>

#include "otdro/bounds.hpp"
#include "otdro/dual_solver.hpp"

namespace otdro {

enum class Scenario { OtValues, OtErm, OtRegValues, OtRegErm };

struct ExperimentConfig {
  Scenario scenario = Scenario::OtValues;
  std::uint64_t seed = 1;
  MixtureParams mixture;
  std::size_t n_train = 200;
  std::size_t n_reference = 10000;  // population surrogate
  int trials = 500;
  double r = 0.1;
  std::vector<double> eps_grid = {0.05, 0.1, 0.2};
  int theta_grid_points = 0;  // 0 -> derived from the envelope
  int threads = 0;            // 0 -> hardware concurrency
  ObjectiveFamily fam = ObjectiveFamily::clamped_linear_margin(1, 1.0, Norm::L2, 1.0);
  TransportCost cost;
  std::optional<FDivergence> divergence;
  BoundConfig bounds;
  InnerSolverConfig inner;
  double outer_tol = 1e-9;
  ErmSearch erm_search = ErmSearch::Grid;
  int erm_budget = 64;

  void validate() const;
};

struct TrialRecord {
  int trial = 0;
  double empirical_value = 0.0;
  double reference_value = 0.0;
  double deviation = 0.0;
  std::vector<double> erm_theta;
  double erm_excess = 0.0;
  double erm_eps_opt = 0.0;
  double wall_time = 0.0;  // written as 0 in the CSV to keep bytes reproducible
};

struct EpsSummary {
  double eps = 0.0;
  double tail = 0.0;
  double empirical_freq = 0.0;
  double binom_stderr = 0.0;
  bool consistent = true;
};

struct ExperimentSummary {
  Scenario scenario = Scenario::OtValues;
  double envelope = 0.0;  // 2 D_n, 4 D_n, max{R_n, R~_n}, or 2 max{...}
  double reference_value = 0.0;
  std::vector<EpsSummary> rows;
  bool all_consistent = true;
};

struct ExperimentOutput {
  std::vector<TrialRecord> records;
  ExperimentSummary summary;
};

ExperimentOutput run_concentration(const ExperimentConfig& cfg);
ExperimentOutput run_erm_experiment(const ExperimentConfig& cfg);

void write_trials_csv(const std::string& path, const std::vector<TrialRecord>& records,
                      int theta_dim);
std::vector<TrialRecord> read_trials_csv(const std::string& path);
void write_summary_csv(const std::string& path, const ExperimentSummary& s);
ExperimentSummary read_summary_csv(const std::string& path);
void write_summary_json(const std::string& path, const ExperimentSummary& s);

// Deviation histogram + exceedance-vs-eps curve with the tail overlay.
// Returns the paths written.  Rejects empty trial sets.
std::vector<std::string> emit_plots(const std::string& trials_csv,
                                    const std::string& summary_csv,
                                    const std::string& out_dir);

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

}  // namespace otdro
