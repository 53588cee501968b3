#include <doctest.h>

#include <Eigen/Cholesky>
#include <cmath>

#include <json.hpp>

#include "random_matrices.hpp"
#include "rng.hpp"
#include "solvers.hpp"

using namespace lrsense;
using namespace lrsense::sensing;
using namespace lrsense::solvers;

namespace {

TraceRegressionDataset make_dataset(int m, int r, int n, double sigma, uint64_t seed,
                                    EnsembleKind kind = EnsembleKind::gaussian) {
  Rng rng(mix64(seed, 1));
  const DenseMatrix g1 = gaussian_matrix(m, r, rng);
  const DenseMatrix g2 = gaussian_matrix(r, m, rng);
  auto ens = sample_ensemble({kind, m, n, mix64(seed, 2)});
  return generate_dataset(g1 * g2, std::move(ens), sigma, NoiseKind::gaussian,
                          mix64(seed, 3));
}

// Dense solve of the vectorized normal equations, the independent oracle for
// the CG path.
Vector dense_normal_solve(const TraceRegressionDataset& ds, const DenseMatrix& B,
                          const DenseMatrix& Z, double rho) {
  const auto& S = ds.ensemble.stacked();
  const Eigen::Index d = S.cols();
  Eigen::MatrixXd H = 2.0 * (S.transpose() * S);
  H.diagonal().array() += rho;
  Vector rhs = 2.0 * (S.transpose() * ds.responses);
  rhs -= Eigen::Map<const Vector>(Z.data(), d);
  rhs += rho * Eigen::Map<const Vector>(B.data(), d);
  return H.ldlt().solve(rhs);
}

double prox_objective(const DenseMatrix& x, const DenseMatrix& target, double lambda,
                      double rho) {
  return lambda * schatten_norm(x, SchattenQ(1.0)) +
         0.5 * rho * (x - target).squaredNorm();
}

}  // namespace

TEST_SUITE("solvers") {

TEST_CASE("lasso objective pinned values") {
  const auto ds = make_dataset(4, 1, 20, 0.1, 11);
  CHECK(lasso_objective(ds, DenseMatrix::Zero(4, 4), 0.5) ==
        doctest::Approx(ds.responses.squaredNorm() + 0.0).epsilon(1e-12));

  const auto noiseless = make_dataset(4, 1, 20, 0.0, 11);
  CHECK(lasso_objective(noiseless, noiseless.A0, 0.0) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("lasso objective matches an extended-precision re-summation") {
  const auto ds = make_dataset(5, 2, 30, 0.05, 13);
  Rng rng(17);
  const DenseMatrix a = gaussian_matrix(5, 5, rng);
  const double lambda = 0.3;
  long double acc = 0.0L;
  for (int j = 0; j < 30; ++j) {
    long double dot = 0.0L;
    const auto xj = ds.ensemble.matrix(j);
    for (int p = 0; p < 5; ++p) {
      for (int q = 0; q < 5; ++q) {
        dot += static_cast<long double>(a(p, q)) * xj(p, q);
      }
    }
    const long double diff = dot - static_cast<long double>(ds.responses(j));
    acc += diff * diff;
  }
  acc += static_cast<long double>(lambda) *
         static_cast<long double>(schatten_norm(a, SchattenQ(1.0)));
  const double expected = static_cast<double>(acc);
  CHECK(lasso_objective(ds, a, lambda) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("a-update with an empty operator reduces to the closed form") {
  auto ens = MeasurementEnsemble(
      {EnsembleKind::gaussian, 3, 0, 0},
      DenseMatrix::Zero(0, 9));
  TraceRegressionDataset ds{std::move(ens), DenseMatrix::Zero(3, 3), 0.0,
                            NoiseKind::gaussian, 0, Vector::Zero(0), Vector::Zero(0)};
  Rng rng(19);
  const DenseMatrix B = gaussian_matrix(3, 3, rng);
  const DenseMatrix Z = gaussian_matrix(3, 3, rng);
  const double rho = 2.5;
  const auto out =
      a_update(ds, B, Z, rho, 1e-12, 50, DenseMatrix::Zero(3, 3));
  CHECK(out.converged);
  CHECK((out.A - (B - Z / rho)).norm() < 1e-10);
}

TEST_CASE("a-update scalar case matches algebra") {
  // Single measurement X1 = (1), m = 1: (2 + rho) a = 2y - z + rho b.
  const auto ens = MeasurementEnsemble::from_matrices(
      {EnsembleKind::gaussian, 1, 0, 0}, {DenseMatrix::Identity(1, 1)});
  const double y = 0.8, z = -0.3, b = 1.1, rho = 4.0;
  Vector responses(1);
  responses(0) = y;
  TraceRegressionDataset ds{ens,      DenseMatrix::Zero(1, 1), 0.0, NoiseKind::gaussian,
                            0,        Vector::Zero(1),         responses};
  DenseMatrix B(1, 1), Z(1, 1);
  B(0, 0) = b;
  Z(0, 0) = z;
  const auto out = a_update(ds, B, Z, rho, 1e-12, 50, DenseMatrix::Zero(1, 1));
  CHECK(out.A(0, 0) ==
        doctest::Approx((2.0 * y - z + rho * b) / (2.0 + rho)).epsilon(1e-12));
}

TEST_CASE("a-update agrees with the dense vectorized solve") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = make_dataset(6, 2, 40, 0.05, 100 + seed);
    Rng rng(mix64(seed, 7));
    const DenseMatrix B = gaussian_matrix(6, 6, rng);
    const DenseMatrix Z = gaussian_matrix(6, 6, rng);
    const double rho = 40.0;
    const auto out = a_update(ds, B, Z, rho, 1e-10, 400, B);
    CHECK(out.converged);
    const Vector dense = dense_normal_solve(ds, B, Z, rho);
    const DenseMatrix a_dense = Eigen::Map<const DenseMatrix>(dense.data(), 6, 6);
    CHECK((out.A - a_dense).norm() <= 1e-6 * a_dense.norm());
  }
}

TEST_CASE("admm recovers a rank-one truth from noiseless data") {
  const auto ds = make_dataset(6, 1, 120, 0.0, 23);
  AdmmConfig cfg;
  cfg.lambda = 1e-8;
  const auto result = admm_lasso(ds, cfg, 29);
  CHECK(result.converged);
  CHECK((result.estimate - ds.A0).norm() <= 1e-3 * ds.A0.norm());
}

TEST_CASE("admm returns the zero matrix when lambda dominates the data term") {
  // Subgradient condition: 0 minimizes iff lambda >= 2 ||X*(Y)||_inf.
  auto ens = sample_ensemble({EnsembleKind::gaussian, 4, 30, 31});
  auto ds = generate_dataset(DenseMatrix::Zero(4, 4), std::move(ens), 0.0,
                             NoiseKind::gaussian, 33);
  AdmmConfig cfg;
  cfg.lambda = 1.0;
  auto result = admm_lasso(ds, cfg, 37);
  CHECK(result.converged);
  CHECK(result.estimate.norm() <= 1e-10);

  // Same conclusion with a nonzero response vector. Dual convergence governs
  // this regime, so pin rho at the data scale.
  auto noisy = make_dataset(4, 1, 30, 0.2, 41);
  const double threshold =
      2.0 * spectral_norm(adjoint(noisy.ensemble, noisy.responses));
  AdmmConfig big;
  big.lambda = 1.0001 * threshold;
  big.rho = 30.0;
  const auto zero_result = admm_lasso(noisy, big, 43);
  CHECK(zero_result.converged);
  CHECK(spectral_norm(zero_result.estimate) <= 1e-8);
}

TEST_CASE("admm iterate diagnostics honor the contracts") {
  const auto ds = make_dataset(8, 2, 5 * 8 * 2, 0.01, 47);
  AdmmConfig cfg;
  cfg.lambda = lambda_rule(8, 5 * 8 * 2, 0.01, LambdaVariant::experiment);
  cfg.record_svt_inputs = true;
  const auto result = admm_lasso(ds, cfg, 53);
  CHECK(result.converged);
  REQUIRE(result.iterations_used >= 1);
  REQUIRE(static_cast<int>(result.primal_gap_trace.size()) == result.iterations_used);
  // Primal gap at exit below the default tolerance 1e-10 m^2.
  CHECK(result.primal_gap_trace.back() <= 1e-10 * 64);

  // B-updates are exact prox points: sample first, middle, last iterations.
  Rng rng(59);
  for (int idx : {0, result.iterations_used / 2, result.iterations_used - 1}) {
    const DenseMatrix& input = result.svt_inputs[idx];
    const DenseMatrix& output = result.svt_outputs[idx];
    const double at_output = prox_objective(output, input, result.lambda, result.rho);
    for (int trial = 0; trial < 500; ++trial) {
      DenseMatrix e = gaussian_matrix(8, 8, rng);
      e /= e.norm();
      const double eta = (trial % 2 == 0) ? 1e-3 : -1e-3;
      CHECK(at_output <=
            prox_objective(output + eta * e, input, result.lambda, result.rho) + 1e-12);
    }
  }

  // Optimality cross-checks: the solution beats the truth and the origin.
  const double obj_est = lasso_objective(ds, result.estimate, cfg.lambda);
  const double obj_a0 = lasso_objective(ds, ds.A0, cfg.lambda);
  const double obj_zero = lasso_objective(ds, DenseMatrix::Zero(8, 8), cfg.lambda);
  CHECK(obj_est <= obj_a0 + 1e-6 * std::abs(obj_a0));
  CHECK(obj_est <= obj_zero);
}

TEST_CASE("calibrated solves satisfy the relaxed feasibility certificate") {
  // Penalized and constrained programs align when lambda >= 2 ||W||_inf:
  // the solution must sit within 3 lambda / 2 of stationarity and inside the
  // rank-r cone at beta = 3.
  const int m = 12, r = 2, n = 5 * m * r;
  const auto ds = make_dataset(m, r, n, 0.01, 61);
  const double lambda = lambda_rule(m, n, 0.01, LambdaVariant::experiment);
  const double w_norm = w_spectral_norm(ds.ensemble, ds.noise);
  REQUIRE(lambda >= 2.0 * w_norm);
  AdmmConfig cfg;
  cfg.lambda = lambda;
  const auto result = admm_lasso(ds, cfg, 67);
  REQUIRE(result.converged);
  const auto cert = dantzig_certificate(ds, result.estimate, lambda);
  CHECK(cert.residual_norm <= 1.5 * lambda);
  CHECK(cert.cone_ok);
}

TEST_CASE("dantzig certificate pinned cases") {
  const auto ds = make_dataset(5, 1, 40, 0.0, 71);
  const auto exact = dantzig_certificate(ds, ds.A0, 0.5);
  CHECK(exact.residual_norm <= 1e-9);
  CHECK(exact.feasible);

  auto ens = sample_ensemble({EnsembleKind::gaussian, 5, 40, 73});
  const auto noise_ds = generate_dataset(DenseMatrix::Zero(5, 5), std::move(ens), 0.3,
                                         NoiseKind::gaussian, 79);
  const auto cert = dantzig_certificate(noise_ds, DenseMatrix::Zero(5, 5), 1.0);
  const double w_norm = w_spectral_norm(noise_ds.ensemble, noise_ds.noise);
  CHECK(cert.residual_norm == doctest::Approx(w_norm).epsilon(1e-12));

  CHECK_THROWS_AS(dantzig_certificate(ds, DenseMatrix::Zero(6, 6), 0.5),
                  DimensionError);
}

TEST_CASE("lambda rule pinned arithmetic") {
  CHECK(lambda_rule(40, 1000, 0.01, LambdaVariant::experiment) ==
        doctest::Approx(14.0).epsilon(1e-12));
  CHECK(lambda_rule(40, 1000, 0.0, LambdaVariant::experiment) == 0.0);
  const double expected = 1.0 * 0.02 * std::sqrt(8.0 * 100.0 * std::log(8.0));
  CHECK(lambda_rule(8, 100, 0.02, LambdaVariant::theorem, 1.0) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(lambda_rule(1, 100, 0.02, LambdaVariant::theorem), DomainError);
  CHECK_THROWS_AS(lambda_rule(8, 0, 0.02, LambdaVariant::experiment), DomainError);
}

TEST_CASE("solve results export to json") {
  const auto ds = make_dataset(4, 1, 30, 0.01, 83);
  AdmmConfig cfg;
  cfg.lambda = lambda_rule(4, 30, 0.01, LambdaVariant::experiment);
  const auto result = admm_lasso(ds, cfg, 89);
  const auto j = nlohmann::json::parse(solve_result_to_json(result));
  CHECK(j["converged"].get<bool>() == result.converged);
  CHECK(j["iterations"].get<int>() == result.iterations_used);
  CHECK(j["lambda"].get<double>() == result.lambda);
  CHECK(j["rho"].get<double>() == result.rho);
  CHECK(j["primal_gap_trace"].size() == result.primal_gap_trace.size());
  CHECK(j["objective_trace"].size() == result.objective_trace.size());
}

}  // TEST_SUITE
