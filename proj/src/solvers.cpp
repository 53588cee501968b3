#include "solvers.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "random_matrices.hpp"
#include "rng.hpp"

namespace lrsense::solvers {

namespace {

using sensing::MeasurementEnsemble;

Eigen::Map<const Vector> as_vec(const DenseMatrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

DenseMatrix from_vec(const Vector& v, int m) {
  return Eigen::Map<const DenseMatrix>(v.data(), m, m);
}

// 2 X*(X v) + rho v on vectorized matrices.
Vector normal_op(const MeasurementEnsemble& ens, double rho, const Vector& v) {
  if (ens.n() == 0) return rho * v;
  Vector image = ens.stacked() * v;
  Vector pulled = ens.stacked().transpose() * image;
  return 2.0 * pulled + rho * v;
}

struct CgOutcome {
  Vector x;
  bool converged;
  int iterations;
  double relative_residual;
};

CgOutcome conjugate_gradient(const MeasurementEnsemble& ens, double rho,
                             const Vector& rhs, Vector x, double tol, int max_iter) {
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    return {Vector::Zero(rhs.size()), true, 0, 0.0};
  }
  Vector r = rhs - normal_op(ens, rho, x);
  double res = r.norm();
  if (res <= tol * rhs_norm) {
    return {std::move(x), true, 0, res / rhs_norm};
  }
  Vector p = r;
  double rs = r.squaredNorm();
  int it = 0;
  for (; it < max_iter; ++it) {
    Vector ap = normal_op(ens, rho, p);
    const double alpha = rs / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    double rs_next = r.squaredNorm();
    res = std::sqrt(rs_next);
    if (res <= tol * rhs_norm) {
      // The recursive residual can drift from the true one; the contract is
      // on the true stationarity residual, so recheck before accepting.
      Vector r_true = rhs - normal_op(ens, rho, x);
      res = r_true.norm();
      if (res <= tol * rhs_norm) {
        return {std::move(x), true, it + 1, res / rhs_norm};
      }
      r = std::move(r_true);
      rs_next = r.squaredNorm();
      p = r;
      rs = rs_next;
      continue;
    }
    p = r + (rs_next / rs) * p;
    rs = rs_next;
  }
  return {std::move(x), false, it, res / rhs_norm};
}

}  // namespace

double lasso_objective(const TraceRegressionDataset& ds, const DenseMatrix& a,
                       double lambda) {
  const Vector residual = sensing::forward(ds.ensemble, a) - ds.responses;
  return residual.squaredNorm() + lambda * schatten_norm(a, SchattenQ(1.0));
}

AUpdate a_update(const TraceRegressionDataset& ds, const DenseMatrix& B,
                 const DenseMatrix& Z, double rho, double cg_tolerance,
                 int cg_max_iterations, const DenseMatrix& warm_start) {
  const int m = ds.ensemble.m();
  if (B.rows() != m || B.cols() != m || Z.rows() != m || Z.cols() != m ||
      warm_start.rows() != m || warm_start.cols() != m) {
    throw DimensionError("a_update: B, Z, warm_start must match the ensemble side");
  }
  if (!(rho > 0.0)) throw DomainError("a_update: rho must be positive");
  if (!(cg_tolerance > 0.0)) throw DomainError("a_update: cg_tolerance must be positive");
  if (cg_max_iterations < 1) throw DomainError("a_update: cg_max_iterations must be >= 1");

  Vector rhs = -as_vec(Z) + rho * as_vec(B);
  if (ds.ensemble.n() > 0) {
    rhs += 2.0 * (ds.ensemble.stacked().transpose() * ds.responses);
  }
  CgOutcome out = conjugate_gradient(ds.ensemble, rho, rhs, as_vec(warm_start),
                                     cg_tolerance, cg_max_iterations);
  return AUpdate{from_vec(out.x, m), out.converged, out.iterations,
                 out.relative_residual};
}

SolveResult admm_lasso(const TraceRegressionDataset& ds, const AdmmConfig& config,
                       uint64_t init_seed) {
  const int m = ds.ensemble.m();
  const int n = ds.ensemble.n();
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda)) {
    throw DomainError("admm_lasso: lambda must be finite and >= 0");
  }
  // Default weight 0.07 n: the realized data Hessian 2 X*X vanishes on the
  // null space whenever n < m^2, so matching its average scale (rho = n)
  // strangles the thresholding step. Tuned on the benchmark operating points
  // (m = 40, n = 5 m r): fractions in [0.05, 0.1] all converge; 0.07 leaves
  // the largest iteration margin.
  const double rho = config.rho.value_or(0.07 * static_cast<double>(n));
  if (!(rho > 0.0)) {
    throw DomainError("admm_lasso: rho must be positive (pass one explicitly for n = 0)");
  }
  const double tolerance = config.tolerance.value_or(1e-10 * m * m);
  if (!(tolerance > 0.0)) throw DomainError("admm_lasso: tolerance must be positive");
  if (config.max_iterations < 1) {
    throw DomainError("admm_lasso: max_iterations must be >= 1");
  }

  Rng rng(init_seed);
  DenseMatrix A = gaussian_matrix(m, m, rng) / static_cast<double>(m);
  DenseMatrix B = gaussian_matrix(m, m, rng) / static_cast<double>(m);
  DenseMatrix Z = DenseMatrix::Zero(m, m);

  SolveResult result;
  result.lambda = config.lambda;
  result.rho = rho;
  result.primal_gap_trace.reserve(config.max_iterations);
  result.objective_trace.reserve(config.max_iterations);

  const double tau = config.lambda / rho;
  for (int k = 0; k < config.max_iterations; ++k) {
    AUpdate au = a_update(ds, B, Z, rho, config.cg_tolerance, config.cg_max_iterations, A);
    if (!au.converged) ++result.cg_cap_hits;
    A = std::move(au.A);

    DenseMatrix M = A + Z / rho;
    const SVDFactors f = svd(M);
    Vector s = (f.singular_values.array() - tau).max(0.0);
    DenseMatrix B_next = f.U * s.asDiagonal() * f.V.transpose();
    const double nuclear_b = s.sum();
    const double dual_gap = (B_next - B).squaredNorm();
    B = std::move(B_next);

    Z += rho * (A - B);

    const double gap = (A - B).squaredNorm();
    result.primal_gap_trace.push_back(gap);
    result.dual_gap_trace.push_back(dual_gap);
    const double fit = (sensing::forward(ds.ensemble, B) - ds.responses).squaredNorm();
    result.objective_trace.push_back(fit + config.lambda * nuclear_b);
    if (config.record_svt_inputs) {
      result.svt_inputs.push_back(M);
      result.svt_outputs.push_back(B);
    }
    result.iterations_used = k + 1;
    if (gap <= tolerance && dual_gap <= tolerance) {
      result.converged = true;
      break;
    }
  }
  result.estimate = std::move(B);
  result.dual_variable = std::move(Z);
  return result;
}

DantzigCertificate dantzig_certificate(const TraceRegressionDataset& ds,
                                       const DenseMatrix& a_hat, double lambda) {
  const int m = ds.ensemble.m();
  if (a_hat.rows() != m || a_hat.cols() != m) {
    throw DimensionError("dantzig_certificate: estimate must match the ensemble side");
  }
  const Vector residual = sensing::forward(ds.ensemble, a_hat) - ds.responses;
  const double residual_norm = spectral_norm(sensing::adjoint(ds.ensemble, residual));

  // Rank of the ground truth, read off numerically.
  const Vector sv = singular_values(ds.A0);
  int r = 0;
  for (Eigen::Index j = 0; j < sv.size(); ++j) {
    if (sv(j) > 1e-9 * sv(0)) ++r;
  }
  const ConeCheck cone = cone_membership(a_hat - ds.A0, std::max(r, 1), 3.0);
  return DantzigCertificate{residual_norm, residual_norm <= lambda, cone.is_member};
}

double lambda_rule(int m, int n, double sigma_xi, LambdaVariant variant, double C2) {
  if (n < 1) throw DomainError("lambda_rule: n must be >= 1");
  if (!(sigma_xi >= 0.0)) throw DomainError("lambda_rule: sigma_xi must be >= 0");
  if (variant == LambdaVariant::theorem) {
    if (m < 2) throw DomainError("lambda_rule: theorem variant needs m >= 2 (log m > 0)");
    return C2 * sigma_xi * std::sqrt(static_cast<double>(m) * n * std::log(m));
  }
  if (m < 1) throw DomainError("lambda_rule: m must be >= 1");
  return 7.0 * sigma_xi * std::sqrt(static_cast<double>(m) * n);
}

std::string solve_result_to_json(const SolveResult& result) {
  nlohmann::json j;
  j["converged"] = result.converged;
  j["iterations"] = result.iterations_used;
  j["lambda"] = result.lambda;
  j["rho"] = result.rho;
  j["primal_gap_trace"] = result.primal_gap_trace;
  j["objective_trace"] = result.objective_trace;
  return j.dump(2);
}

void save_solve_result_json(const std::string& path, const SolveResult& result) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << solve_result_to_json(result) << "\n";
  if (!out) throw IoError("write failure: " + path);
}

}  // namespace lrsense::solvers
