// lrsense command-line front-end. Talks to the core exclusively through the
// C API in lrsense/lrsense.h.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrsense/lrsense.h"

namespace {

// Exit policy: 0 success, 1 usage/configuration errors, 2 runtime failures.
int exit_code_for(int status) {
  switch (status) {
    case LRSENSE_OK:
      return 0;
    case LRSENSE_ERR_ARGUMENT:
    case LRSENSE_ERR_DIMENSION:
    case LRSENSE_ERR_DOMAIN:
    case LRSENSE_ERR_CONFIG:
      return 1;
    default:
      return 2;
  }
}

int report(int status) {
  if (status == LRSENSE_OK) return 0;
  std::fprintf(stderr, "error (%s): %s\n", lrsense_error_name(status),
               lrsense_last_error());
  return exit_code_for(status);
}

int parse_kind(const std::string& kind, int* out) {
  if (kind == "gaussian") {
    *out = LRSENSE_ENSEMBLE_GAUSSIAN;
    return 0;
  }
  if (kind == "rademacher") {
    *out = LRSENSE_ENSEMBLE_RADEMACHER;
    return 0;
  }
  std::fprintf(stderr, "error: --kind must be gaussian or rademacher\n");
  return 1;
}

// "inf" selects the spectral-norm metric.
int parse_q(const std::string& text, double* q, int* q_infinite) {
  if (text == "inf") {
    *q_infinite = 1;
    *q = 0.0;
    return 0;
  }
  try {
    *q = std::stod(text);
  } catch (...) {
    std::fprintf(stderr, "error: --q must be a number >= 1 or \"inf\"\n");
    return 1;
  }
  *q_infinite = 0;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lrsense: low-rank matrix sensing laboratory"};
  app.require_subcommand(1);

  // experiment
  std::string config_path;
  auto* experiment = app.add_subcommand("experiment", "run a seeded benchmark grid");
  experiment->add_option("--config", config_path, "JSON config file")->required();

  // rip-probe
  std::string rip_kind = "gaussian";
  int64_t rip_m = 0, rip_n = 0, rip_r = 1, rip_samples = 100, rip_ascent = 50;
  uint64_t rip_seed = 0;
  auto* rip = app.add_subcommand("rip-probe", "estimate the rank-r isometry constant");
  rip->add_option("--kind", rip_kind, "gaussian|rademacher");
  rip->add_option("--m", rip_m, "matrix side")->required();
  rip->add_option("--n", rip_n, "number of measurements")->required();
  rip->add_option("--r", rip_r, "probe rank")->required();
  rip->add_option("--samples", rip_samples, "probes per rank level");
  rip->add_option("--ascent", rip_ascent, "ascent refinement steps");
  rip->add_option("--seed", rip_seed, "seed")->required();

  // noise-probe
  std::string noise_kind = "gaussian";
  int64_t noise_m = 0, noise_n = 0, noise_trials = 20;
  double noise_sigma = 0.01;
  uint64_t noise_seed = 0;
  auto* noise = app.add_subcommand("noise-probe",
                                   "spectral norm of the scaled noise image");
  noise->add_option("--kind", noise_kind, "gaussian|rademacher");
  noise->add_option("--m", noise_m, "matrix side")->required();
  noise->add_option("--n", noise_n, "number of measurements")->required();
  noise->add_option("--sigma", noise_sigma, "noise standard deviation");
  noise->add_option("--trials", noise_trials, "independent noise draws");
  noise->add_option("--seed", noise_seed, "seed")->required();

  // packing
  int64_t pack_m = 0, pack_k = 0, pack_maxcard = 0, pack_attempts = 10000;
  double pack_eps = 0.0;
  std::string pack_q = "2";
  uint64_t pack_seed = 0;
  auto* packing = app.add_subcommand("packing", "greedy subspace packing");
  packing->add_option("--m", pack_m, "ambient dimension")->required();
  packing->add_option("--k", pack_k, "subspace dimension")->required();
  packing->add_option("--q", pack_q, "Schatten order for the metric, or inf");
  packing->add_option("--epsilon", pack_eps, "separation constant")->required();
  packing->add_option("--max-card", pack_maxcard, "stop after this many keeps")->required();
  packing->add_option("--max-attempts", pack_attempts, "candidate draw budget");
  packing->add_option("--seed", pack_seed, "seed")->required();

  // minimax
  int64_t mm_m = 0, mm_r = 0, mm_n = 0;
  double mm_sigma = 1.0, mm_cprime = 0.0;
  std::string mm_q = "2", mm_json, mm_matrices;
  uint64_t mm_seed = 0;
  auto* mm = app.add_subcommand("minimax", "build a scaled-projection hard instance");
  mm->add_option("--m", mm_m, "ambient dimension")->required();
  mm->add_option("--r", mm_r, "rank (needs 2r <= m)")->required();
  mm->add_option("--n", mm_n, "number of measurements")->required();
  mm->add_option("--sigma", mm_sigma, "noise standard deviation");
  mm->add_option("--cprime", mm_cprime, "scale constant")->required();
  mm->add_option("--q", mm_q, "Schatten order for the metric, or inf");
  mm->add_option("--json", mm_json, "write the summary JSON here");
  mm->add_option("--matrices", mm_matrices, "write the instance matrices here");
  mm->add_option("--seed", mm_seed, "seed")->required();

  // solve
  std::string solve_dataset, solve_json, solve_estimate;
  double solve_lambda = 0.0, solve_rho = 0.0, solve_tol = 0.0;
  int64_t solve_maxiter = 0;
  uint64_t solve_init_seed = 0;
  auto* solve = app.add_subcommand("solve", "solve a cached dataset");
  solve->add_option("--dataset", solve_dataset, "dataset container file")->required();
  solve->add_option("--lambda", solve_lambda, "nuclear-norm weight")->required();
  solve->add_option("--rho", solve_rho, "ADMM weight (default n)");
  solve->add_option("--max-iter", solve_maxiter, "iteration cap (default 500)");
  solve->add_option("--tol", solve_tol, "primal gap tolerance (default 1e-10 m^2)");
  solve->add_option("--init-seed", solve_init_seed, "iterate initialization seed");
  solve->add_option("--json", solve_json, "write the solve summary JSON here");
  solve->add_option("--estimate", solve_estimate, "write the estimate container here");

  // dataset
  std::string ds_kind = "gaussian", ds_noise = "gaussian", ds_out;
  int64_t ds_m = 0, ds_r = 0, ds_n = 0;
  double ds_sigma = 0.01;
  uint64_t ds_seed = 0;
  auto* dataset = app.add_subcommand("dataset", "generate and cache a dataset");
  dataset->add_option("--kind", ds_kind, "gaussian|rademacher");
  dataset->add_option("--m", ds_m, "matrix side")->required();
  dataset->add_option("--r", ds_r, "ground-truth rank")->required();
  dataset->add_option("--n", ds_n, "number of measurements")->required();
  dataset->add_option("--sigma", ds_sigma, "noise standard deviation");
  dataset->add_option("--noise", ds_noise, "gaussian|rademacher (scaled)");
  dataset->add_option("--seed", ds_seed, "seed")->required();
  dataset->add_option("--out", ds_out, "output container file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help / --version
    }
    std::fprintf(stderr, "%s\n", e.what());
    std::fprintf(stderr, "%s\n", app.help().c_str());
    return 1;
  }

  if (experiment->parsed()) {
    return report(lrsense_experiment_run(config_path.c_str()));
  }

  if (rip->parsed()) {
    int kind = 0;
    if (parse_kind(rip_kind, &kind)) return 1;
    double delta_hat = 0.0;
    const int status = lrsense_rip_probe(kind, rip_m, rip_n, rip_r, rip_samples,
                                         rip_ascent, rip_seed, &delta_hat);
    if (status != LRSENSE_OK) return report(status);
    std::printf("m=%lld n=%lld r=%lld samples=%lld ascent=%lld seed=%llu\n",
                (long long)rip_m, (long long)rip_n, (long long)rip_r,
                (long long)rip_samples, (long long)rip_ascent,
                (unsigned long long)rip_seed);
    std::printf("delta_hat = %.6f\n", delta_hat);
    return 0;
  }

  if (noise->parsed()) {
    int kind = 0;
    if (parse_kind(noise_kind, &kind)) return 1;
    std::vector<double> values(static_cast<size_t>(std::max<int64_t>(noise_trials, 1)));
    const int status = lrsense_noise_probe(kind, noise_m, noise_n, noise_sigma,
                                           noise_trials, noise_seed, values.data());
    if (status != LRSENSE_OK) return report(status);
    for (size_t i = 0; i < values.size(); ++i) {
      std::printf("trial %zu: %.8e\n", i, values[i]);
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const size_t h = sorted.size() / 2;
    const double median =
        sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
    std::printf("median = %.8e\n", median);
    return 0;
  }

  if (packing->parsed()) {
    double q = 0.0;
    int q_inf = 0;
    if (parse_q(pack_q, &q, &q_inf)) return 1;
    int64_t cardinality = 0, attempts = 0;
    double min_pairwise = 0.0;
    const int status =
        lrsense_packing_build(pack_m, pack_k, q, q_inf, pack_eps, pack_maxcard,
                              pack_attempts, pack_seed, &cardinality, &min_pairwise,
                              &attempts);
    if (status != LRSENSE_OK) return report(status);
    std::printf("cardinality = %lld\n", (long long)cardinality);
    std::printf("min_pairwise_distance = %.6f\n", min_pairwise);
    std::printf("attempts = %lld\n", (long long)attempts);
    return 0;
  }

  if (mm->parsed()) {
    double q = 0.0;
    int q_inf = 0;
    if (parse_q(mm_q, &q, &q_inf)) return 1;
    lrsense_minimax_summary summary;
    const int status = lrsense_minimax_build(
        mm_m, mm_r, mm_n, mm_sigma, mm_cprime, q, q_inf, mm_seed,
        mm_json.empty() ? nullptr : mm_json.c_str(),
        mm_matrices.empty() ? nullptr : mm_matrices.c_str(), &summary);
    if (status != LRSENSE_OK) return report(status);
    std::printf("kappa = %.8e\n", summary.kappa);
    std::printf("cardinality = %lld\n", (long long)summary.cardinality);
    std::printf("max_pairwise_kl = %.8e\n", summary.max_pairwise_kl);
    std::printf("log_cardinality = %.8e\n", summary.log_cardinality);
    std::printf("kl_condition_met = %s\n", summary.kl_condition_met ? "true" : "false");
    return 0;
  }

  if (solve->parsed()) {
    lrsense_dataset* ds = nullptr;
    int status = lrsense_dataset_load(solve_dataset.c_str(), &ds);
    if (status != LRSENSE_OK) return report(status);

    lrsense_admm_options options{};
    options.lambda = solve_lambda;
    options.rho = solve_rho;
    options.max_iterations = solve_maxiter;
    options.tolerance = solve_tol;
    options.cg_tolerance = 0.0;
    options.cg_max_iterations = 0;
    options.init_seed = solve_init_seed;

    lrsense_solve_result* result = nullptr;
    status = lrsense_admm_solve(ds, &options, &result);
    if (status != LRSENSE_OK) {
      lrsense_dataset_destroy(ds);
      return report(status);
    }
    int converged = 0;
    int64_t iterations = 0;
    double spectral = 0.0, frobenius = 0.0, nuclear = 0.0;
    lrsense_solve_result_converged(result, &converged);
    lrsense_solve_result_iterations(result, &iterations);
    status = lrsense_estimate_errors(result, ds, &spectral, &frobenius, &nuclear);
    if (status == LRSENSE_OK) {
      std::printf("converged = %s\n", converged ? "true" : "false");
      std::printf("iterations = %lld\n", (long long)iterations);
      std::printf("spectral_error = %.8e\n", spectral);
      std::printf("frobenius_error = %.8e\n", frobenius);
      std::printf("nuclear_error = %.8e\n", nuclear);
      if (!solve_json.empty()) {
        status = lrsense_solve_result_write_json(result, solve_json.c_str());
      }
    }
    if (status == LRSENSE_OK && !solve_estimate.empty()) {
      lrsense_matrix* est = nullptr;
      status = lrsense_solve_result_estimate(result, &est);
      if (status == LRSENSE_OK) {
        status = lrsense_matrix_save(est, solve_estimate.c_str());
        lrsense_matrix_destroy(est);
      }
    }
    lrsense_solve_result_destroy(result);
    lrsense_dataset_destroy(ds);
    return report(status);
  }

  if (dataset->parsed()) {
    int kind = 0;
    if (parse_kind(ds_kind, &kind)) return 1;
    int noise_kind_value = 0;
    if (ds_noise == "gaussian") {
      noise_kind_value = LRSENSE_NOISE_GAUSSIAN;
    } else if (ds_noise == "rademacher") {
      noise_kind_value = LRSENSE_NOISE_RADEMACHER_SCALED;
    } else {
      std::fprintf(stderr, "error: --noise must be gaussian or rademacher\n");
      return 1;
    }
    lrsense_dataset* ds = nullptr;
    int status = lrsense_dataset_generate(kind, ds_m, ds_r, ds_n, ds_sigma,
                                          noise_kind_value, ds_seed, &ds);
    if (status != LRSENSE_OK) return report(status);
    status = lrsense_dataset_save(ds, ds_out.c_str());
    lrsense_dataset_destroy(ds);
    if (status == LRSENSE_OK) {
      std::printf("wrote %s\n", ds_out.c_str());
    }
    return report(status);
  }

  return 1;
}
