#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sensing.hpp"

namespace lrsense::solvers {

using sensing::TraceRegressionDataset;

struct AdmmConfig {
  double lambda = 0.0;                // nuclear-norm weight, >= 0
  std::optional<double> rho;          // augmented Lagrangian weight; default 0.07 n
  int max_iterations = 500;
  std::optional<double> tolerance;    // on ||A - B||_F^2; default 1e-10 * m^2
  double cg_tolerance = 1e-10;        // relative residual of the inner solve
  int cg_max_iterations = 400;
  bool record_svt_inputs = false;     // keep (input, output) of every B-update
};

struct SolveResult {
  DenseMatrix estimate;               // final B: exactly thresholded spectrum
  int iterations_used = 0;
  bool converged = false;
  std::vector<double> primal_gap_trace;  // ||A - B||_F^2 per iteration
  std::vector<double> dual_gap_trace;    // ||B_k+1 - B_k||_F^2 per iteration
  std::vector<double> objective_trace;   // objective at B per iteration
  DenseMatrix dual_variable;             // final Z
  double lambda = 0.0;
  double rho = 0.0;
  int cg_cap_hits = 0;                // A-updates that hit the CG iteration cap
  std::vector<DenseMatrix> svt_inputs;   // populated when record_svt_inputs
  std::vector<DenseMatrix> svt_outputs;
};

/// sum_j (<A, X_j> - Y_j)^2 + lambda * ||A||_1 (nuclear).
double lasso_objective(const TraceRegressionDataset& ds, const DenseMatrix& a,
                       double lambda);

struct AUpdate {
  DenseMatrix A;
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// One ADMM A-step: conjugate gradient on the normal equations
/// (2 X*X + rho I) A = 2 X*(Y) - Z + rho B, matrix-free through the
/// forward/adjoint pair, stopping at relative residual cg_tolerance.
AUpdate a_update(const TraceRegressionDataset& ds, const DenseMatrix& B,
                 const DenseMatrix& Z, double rho, double cg_tolerance,
                 int cg_max_iterations, const DenseMatrix& warm_start);

/// Solve the nuclear-norm penalized least-squares program by ADMM:
/// A-step above, B-step by singular value soft-thresholding at lambda/rho,
/// dual step Z += rho (A - B). Z starts at zero; A and B start from Gaussian
/// entries scaled by 1/m, drawn from init_seed. Stops once both
/// ||A - B||_F^2 and ||B_k+1 - B_k||_F^2 fall below tolerance, or at the
/// iteration cap (best iterate is still returned with converged = false).
/// The consensus gap alone degenerates as lambda -> 0 (the B-step becomes
/// the identity, so A == B after one dual step regardless of optimality);
/// the successive-iterate term keeps the test meaningful there.
SolveResult admm_lasso(const TraceRegressionDataset& ds, const AdmmConfig& config,
                       uint64_t init_seed);

struct DantzigCertificate {
  double residual_norm = 0.0;  // ||X*(X(A_hat) - Y)||_inf
  bool feasible = false;       // residual_norm <= lambda
  bool cone_ok = false;        // tail/head nuclear ratio of A_hat - A0 <= 3 at rank(A0)
};

/// Feasibility certificate for the constrained (Dantzig-type) program plus
/// the cone condition that calibrated estimators must satisfy.
DantzigCertificate dantzig_certificate(const TraceRegressionDataset& ds,
                                       const DenseMatrix& a_hat, double lambda);

enum class LambdaVariant { theorem, experiment };

/// theorem:    C2 * sigma_xi * sqrt(m * n * ln m)   (needs m >= 2)
/// experiment: 7 * sigma_xi * sqrt(m * n)
double lambda_rule(int m, int n, double sigma_xi, LambdaVariant variant, double C2 = 1.0);

std::string solve_result_to_json(const SolveResult& result);
void save_solve_result_json(const std::string& path, const SolveResult& result);

}  // namespace lrsense::solvers
