#include "lrsense/lrsense.h"

#include <cstring>
#include <string>

#include "container.hpp"
#include "harness.hpp"
#include "minimax.hpp"
#include "rng.hpp"
#include "sensing.hpp"
#include "solvers.hpp"
#include "theory.hpp"

struct lrsense_matrix {
  lrsense::DenseMatrix mat;
};

struct lrsense_dataset {
  lrsense::sensing::TraceRegressionDataset ds;
};

struct lrsense_solve_result {
  lrsense::solvers::SolveResult res;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
  g_last_error = what ? what : "";
  return code;
}

// Maps C++ exceptions onto C error codes; clears the error slot on success.
template <typename Fn>
int guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LRSENSE_OK;
  } catch (const lrsense::DimensionError& e) {
    return fail(LRSENSE_ERR_DIMENSION, e.what());
  } catch (const lrsense::DomainError& e) {
    return fail(LRSENSE_ERR_DOMAIN, e.what());
  } catch (const lrsense::ConfigError& e) {
    return fail(LRSENSE_ERR_CONFIG, e.what());
  } catch (const lrsense::IoError& e) {
    return fail(LRSENSE_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(LRSENSE_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(LRSENSE_ERR_RUNTIME, "unknown failure");
  }
}

bool bad_kind(int kind) {
  return kind != LRSENSE_ENSEMBLE_GAUSSIAN && kind != LRSENSE_ENSEMBLE_RADEMACHER;
}

lrsense::SchattenQ make_q(double q, int q_infinite) {
  return q_infinite ? lrsense::SchattenQ::inf() : lrsense::SchattenQ(q);
}

}  // namespace

extern "C" {

const char* lrsense_version(void) { return "0.1.0"; }

const char* lrsense_error_name(int code) {
  switch (code) {
    case LRSENSE_OK: return "ok";
    case LRSENSE_ERR_ARGUMENT: return "argument";
    case LRSENSE_ERR_DIMENSION: return "dimension";
    case LRSENSE_ERR_DOMAIN: return "domain";
    case LRSENSE_ERR_CONFIG: return "config";
    case LRSENSE_ERR_IO: return "io";
    default: return "runtime";
  }
}

const char* lrsense_last_error(void) { return g_last_error.c_str(); }

int lrsense_matrix_create(int64_t rows, int64_t cols, const double* row_major,
                          lrsense_matrix** out) {
  if (!row_major || !out || rows < 1 || cols < 1) {
    return fail(LRSENSE_ERR_ARGUMENT, "matrix_create: bad arguments");
  }
  return guard([&] {
    auto* m = new lrsense_matrix;
    m->mat = Eigen::Map<const lrsense::DenseMatrix>(row_major, rows, cols);
    lrsense::require_finite(m->mat, "matrix_create");
    *out = m;
  });
}

void lrsense_matrix_destroy(lrsense_matrix* m) { delete m; }

int lrsense_matrix_rows(const lrsense_matrix* m, int64_t* rows) {
  if (!m || !rows) return fail(LRSENSE_ERR_ARGUMENT, "matrix_rows: bad arguments");
  *rows = m->mat.rows();
  return LRSENSE_OK;
}

int lrsense_matrix_cols(const lrsense_matrix* m, int64_t* cols) {
  if (!m || !cols) return fail(LRSENSE_ERR_ARGUMENT, "matrix_cols: bad arguments");
  *cols = m->mat.cols();
  return LRSENSE_OK;
}

int lrsense_matrix_data(const lrsense_matrix* m, double* buf, size_t buf_len) {
  if (!m || !buf) return fail(LRSENSE_ERR_ARGUMENT, "matrix_data: bad arguments");
  if (buf_len != static_cast<size_t>(m->mat.size())) {
    return fail(LRSENSE_ERR_ARGUMENT, "matrix_data: buffer length must be rows*cols");
  }
  std::memcpy(buf, m->mat.data(), buf_len * sizeof(double));
  return LRSENSE_OK;
}

int lrsense_matrix_load(const char* path, lrsense_matrix** out) {
  if (!path || !out) return fail(LRSENSE_ERR_ARGUMENT, "matrix_load: bad arguments");
  return guard([&] { *out = new lrsense_matrix{lrsense::load_matrix(path)}; });
}

int lrsense_matrix_save(const lrsense_matrix* m, const char* path) {
  if (!m || !path) return fail(LRSENSE_ERR_ARGUMENT, "matrix_save: bad arguments");
  return guard([&] { lrsense::save_matrix(path, m->mat); });
}

int lrsense_dataset_generate(int ensemble_kind, int64_t m, int64_t r, int64_t n,
                             double sigma_xi, int noise_kind, uint64_t seed,
                             lrsense_dataset** out) {
  if (!out || bad_kind(ensemble_kind) ||
      (noise_kind != LRSENSE_NOISE_GAUSSIAN &&
       noise_kind != LRSENSE_NOISE_RADEMACHER_SCALED)) {
    return fail(LRSENSE_ERR_ARGUMENT, "dataset_generate: bad arguments");
  }
  return guard([&] {
    using namespace lrsense;
    auto a0 = harness::ground_truth(static_cast<int>(m), static_cast<int>(r),
                                    mix64(seed, 1));
    auto ens = sensing::sample_ensemble({static_cast<sensing::EnsembleKind>(ensemble_kind),
                                         static_cast<int>(m), static_cast<int>(n),
                                         mix64(seed, 2)});
    auto ds = sensing::generate_dataset(std::move(a0), std::move(ens), sigma_xi,
                                        static_cast<sensing::NoiseKind>(noise_kind),
                                        mix64(seed, 3));
    *out = new lrsense_dataset{std::move(ds)};
  });
}

int lrsense_dataset_load(const char* path, lrsense_dataset** out) {
  if (!path || !out) return fail(LRSENSE_ERR_ARGUMENT, "dataset_load: bad arguments");
  return guard([&] { *out = new lrsense_dataset{lrsense::sensing::load_dataset(path)}; });
}

int lrsense_dataset_save(const lrsense_dataset* ds, const char* path) {
  if (!ds || !path) return fail(LRSENSE_ERR_ARGUMENT, "dataset_save: bad arguments");
  return guard([&] { lrsense::sensing::save_dataset(path, ds->ds); });
}

void lrsense_dataset_destroy(lrsense_dataset* ds) { delete ds; }

int lrsense_dataset_dims(const lrsense_dataset* ds, int64_t* m, int64_t* n) {
  if (!ds) return fail(LRSENSE_ERR_ARGUMENT, "dataset_dims: bad arguments");
  if (m) *m = ds->ds.ensemble.m();
  if (n) *n = ds->ds.ensemble.n();
  return LRSENSE_OK;
}

int lrsense_dataset_ground_truth(const lrsense_dataset* ds, lrsense_matrix** out) {
  if (!ds || !out) return fail(LRSENSE_ERR_ARGUMENT, "dataset_ground_truth: bad arguments");
  return guard([&] { *out = new lrsense_matrix{ds->ds.A0}; });
}

int lrsense_lambda_rule(int64_t m, int64_t n, double sigma_xi, int variant, double C2,
                        double* out) {
  if (!out || (variant != LRSENSE_LAMBDA_THEOREM && variant != LRSENSE_LAMBDA_EXPERIMENT)) {
    return fail(LRSENSE_ERR_ARGUMENT, "lambda_rule: bad arguments");
  }
  return guard([&] {
    using lrsense::solvers::LambdaVariant;
    *out = lrsense::solvers::lambda_rule(
        static_cast<int>(m), static_cast<int>(n), sigma_xi,
        variant == LRSENSE_LAMBDA_THEOREM ? LambdaVariant::theorem
                                          : LambdaVariant::experiment,
        C2);
  });
}

int lrsense_admm_solve(const lrsense_dataset* ds, const lrsense_admm_options* options,
                       lrsense_solve_result** out) {
  if (!ds || !options || !out) {
    return fail(LRSENSE_ERR_ARGUMENT, "admm_solve: bad arguments");
  }
  return guard([&] {
    lrsense::solvers::AdmmConfig cfg;
    cfg.lambda = options->lambda;
    if (options->rho > 0.0) cfg.rho = options->rho;
    if (options->max_iterations > 0) {
      cfg.max_iterations = static_cast<int>(options->max_iterations);
    }
    if (options->tolerance > 0.0) cfg.tolerance = options->tolerance;
    if (options->cg_tolerance > 0.0) cfg.cg_tolerance = options->cg_tolerance;
    if (options->cg_max_iterations > 0) {
      cfg.cg_max_iterations = static_cast<int>(options->cg_max_iterations);
    }
    *out = new lrsense_solve_result{
        lrsense::solvers::admm_lasso(ds->ds, cfg, options->init_seed)};
  });
}

void lrsense_solve_result_destroy(lrsense_solve_result* r) { delete r; }

int lrsense_solve_result_converged(const lrsense_solve_result* r, int* out) {
  if (!r || !out) return fail(LRSENSE_ERR_ARGUMENT, "solve_result_converged: bad arguments");
  *out = r->res.converged ? 1 : 0;
  return LRSENSE_OK;
}

int lrsense_solve_result_iterations(const lrsense_solve_result* r, int64_t* out) {
  if (!r || !out) return fail(LRSENSE_ERR_ARGUMENT, "solve_result_iterations: bad arguments");
  *out = r->res.iterations_used;
  return LRSENSE_OK;
}

int lrsense_solve_result_estimate(const lrsense_solve_result* r, lrsense_matrix** out) {
  if (!r || !out) return fail(LRSENSE_ERR_ARGUMENT, "solve_result_estimate: bad arguments");
  return guard([&] { *out = new lrsense_matrix{r->res.estimate}; });
}

int lrsense_solve_result_write_json(const lrsense_solve_result* r, const char* path) {
  if (!r || !path) {
    return fail(LRSENSE_ERR_ARGUMENT, "solve_result_write_json: bad arguments");
  }
  return guard([&] { lrsense::solvers::save_solve_result_json(path, r->res); });
}

int lrsense_estimate_errors(const lrsense_solve_result* r, const lrsense_dataset* ds,
                            double* spectral, double* frobenius, double* nuclear) {
  if (!r || !ds) return fail(LRSENSE_ERR_ARGUMENT, "estimate_errors: bad arguments");
  return guard([&] {
    if (r->res.estimate.rows() != ds->ds.A0.rows()) {
      throw lrsense::DimensionError("estimate_errors: result does not match dataset");
    }
    const lrsense::Vector sv = lrsense::singular_values(r->res.estimate - ds->ds.A0);
    if (spectral) *spectral = sv(0);
    if (frobenius) *frobenius = sv.norm();
    if (nuclear) *nuclear = sv.sum();
  });
}

int lrsense_rip_probe(int ensemble_kind, int64_t m, int64_t n, int64_t r,
                      int64_t n_samples, int64_t ascent_steps, uint64_t seed,
                      double* delta_hat) {
  if (!delta_hat || bad_kind(ensemble_kind)) {
    return fail(LRSENSE_ERR_ARGUMENT, "rip_probe: bad arguments");
  }
  return guard([&] {
    using namespace lrsense::sensing;
    auto ens = sample_ensemble({static_cast<EnsembleKind>(ensemble_kind),
                                static_cast<int>(m), static_cast<int>(n), seed});
    const auto est = rip_probe(ens, static_cast<int>(r), static_cast<int>(n_samples),
                               static_cast<int>(ascent_steps), lrsense::mix64(seed, 0x9));
    *delta_hat = est.delta_hat;
  });
}

int lrsense_noise_probe(int ensemble_kind, int64_t m, int64_t n, double sigma_xi,
                        int64_t trials, uint64_t seed, double* values) {
  if (!values || bad_kind(ensemble_kind) || trials < 1) {
    return fail(LRSENSE_ERR_ARGUMENT, "noise_probe: bad arguments");
  }
  return guard([&] {
    using namespace lrsense::sensing;
    auto ens = sample_ensemble({static_cast<EnsembleKind>(ensemble_kind),
                                static_cast<int>(m), static_cast<int>(n), seed});
    const auto vals =
        noise_norm_probe(ens, sigma_xi, static_cast<int>(trials), lrsense::mix64(seed, 0xA));
    std::memcpy(values, vals.data(), vals.size() * sizeof(double));
  });
}

int lrsense_packing_build(int64_t m, int64_t k, double q, int q_infinite, double epsilon,
                          int64_t max_cardinality, int64_t max_attempts, uint64_t seed,
                          int64_t* cardinality, double* min_pairwise, int64_t* attempts) {
  return guard([&] {
    const auto packing = lrsense::minimax::greedy_packing(
        static_cast<int>(m), static_cast<int>(k), make_q(q, q_infinite), epsilon,
        static_cast<int>(max_cardinality), static_cast<int>(max_attempts), seed);
    if (cardinality) *cardinality = static_cast<int64_t>(packing.projections.size());
    if (min_pairwise) *min_pairwise = packing.min_pairwise_distance;
    if (attempts) *attempts = packing.attempts;
  });
}

int lrsense_minimax_build(int64_t m, int64_t r, int64_t n, double sigma_xi,
                          double c_prime, double q, int q_infinite, uint64_t seed,
                          const char* json_path, const char* matrices_path,
                          lrsense_minimax_summary* out) {
  return guard([&] {
    const auto inst = lrsense::minimax::build_minimax_instance(
        static_cast<int>(m), static_cast<int>(r), static_cast<int>(n), sigma_xi, c_prime,
        make_q(q, q_infinite), seed);
    if (json_path) lrsense::minimax::save_minimax_summary(json_path, inst, static_cast<int>(r));
    if (matrices_path) lrsense::minimax::save_minimax_matrices(matrices_path, inst);
    if (out) {
      out->kappa = inst.kappa;
      out->cardinality = static_cast<int64_t>(inst.matrices.size());
      out->max_pairwise_kl = inst.max_pairwise_kl;
      out->log_cardinality = inst.log_cardinality;
      out->kl_condition_met = inst.kl_condition_met ? 1 : 0;
      out->min_pairwise_distance = inst.packing.min_pairwise_distance;
    }
  });
}

int lrsense_experiment_run(const char* config_path) {
  if (!config_path) return fail(LRSENSE_ERR_ARGUMENT, "experiment_run: bad arguments");
  return guard([&] {
    const auto cfg = lrsense::harness::load_config(config_path);
    lrsense::harness::run_experiment(cfg);
  });
}

}  // extern "C"
