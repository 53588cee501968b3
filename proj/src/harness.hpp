#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "solvers.hpp"
#include "theory.hpp"

namespace lrsense::harness {

struct AdmmOverrides {
  std::optional<double> rho;
  std::optional<int> max_iterations;
  std::optional<double> tolerance;
  std::optional<double> cg_tolerance;
  std::optional<int> cg_max_iterations;
};

enum class NRule { five_m_r, explicit_list };

struct ExperimentConfig {
  std::vector<int> m_values;
  std::vector<int> r_values;
  NRule n_rule = NRule::five_m_r;
  std::vector<int> n_values;  // parallel to r_values when n_rule is explicit_list
  int trials = 1;
  double sigma_xi = 0.0;
  sensing::EnsembleKind ensemble_kind = sensing::EnsembleKind::gaussian;
  solvers::LambdaVariant lambda_variant = solvers::LambdaVariant::experiment;
  double C2 = 1.0;
  AdmmOverrides admm;
  uint64_t master_seed = 0;
  std::string output_dir;
  int threads = 0;  // 0 = hardware concurrency
};

/// Parse and validate a config document. Unknown keys are rejected.
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct TrialRecord {
  int m = 0, r = 0, n = 0, trial_index = 0;
  uint64_t seed = 0;
  double lambda = 0.0, rho = 0.0;
  int iterations = 0;
  bool converged = false;
  double spectral_error = 0.0, frobenius_error = 0.0, nuclear_error = 0.0;
  double ratio_spectral = 0.0;
  std::map<int, double> kyfan_errors;
  std::vector<std::pair<SchattenQ, double>> schatten_errors;
  bool lambda_ge_2W = false;  // lambda >= 2 ||sum_j xi_j X_j||_inf
  bool cone_ok = false;       // estimate error in the rank-r cone at beta = 3.01
  double wall_time_ms = 0.0;
  // In-memory diagnostics, not CSV columns.
  bool objective_ok = false;  // objective(estimate) <= objective(A0) and (0)
};

/// Rank-r ground truth: product of m x r and r x m standard Gaussian factors.
DenseMatrix ground_truth(int m, int r, uint64_t seed);

/// n = 5 m r, the operating rule for the benchmark grid.
int default_n(int m, int r);

/// Derived per-cell seed, published so any row can be reproduced alone:
/// mix64(master_seed, m, r, trial_index).
uint64_t trial_seed(uint64_t master_seed, int m, int r, int trial_index);

/// Run the full (m, r, trial) grid: build ground truth, ensemble, and noisy
/// responses per cell, solve, and record the multi-norm error report plus the
/// calibration and cone flags. Writes CSV rows incrementally in grid order
/// (partial runs stay inspectable) and the per-m plot series at the end.
/// Trials run on a worker pool; results are identical for any thread count.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config);

/// CSV with the fixed column set; kyfan columns cover k = 1..min over rows of
/// the recorded Ky-Fan window so the table stays rectangular.
void write_csv(const std::string& path, const std::vector<TrialRecord>& records);

/// Per-m series files "{prefix}_accuracy_m{M}.dat" (r, mean spectral error,
/// std) and "{prefix}_ratio_m{M}.dat" (r, mean spectral ratio, std),
/// whitespace-delimited.
void emit_plot_data(const std::vector<TrialRecord>& records, const std::string& output_dir,
                    const std::string& prefix = "fig1");

}  // namespace lrsense::harness
