#include "theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "random_matrices.hpp"
#include "rng.hpp"

namespace lrsense::theory {

TheoryConstants theory_constants(double alpha, double c0) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw DomainError("theory_constants: alpha must be a finite real > 1");
  }
  if (!(c0 > 0.0) || !std::isfinite(c0)) {
    throw DomainError("theory_constants: c0 must be positive");
  }
  TheoryConstants c;
  c.alpha = alpha;
  c.c0 = c0;
  c.c1 = std::sqrt(1.0 - 1.0 / alpha);
  const double c1sq = 1.0 - 1.0 / alpha;
  c.c_d = 1.5 + 3.0 * (1.0 + c0) * (1.0 + c0) / (2.0 * alpha * (1.0 + 2.0 * c0) * c1sq);
  c.c_d_prime = 3.0 * (1.0 + c0) * (1.0 + c0) / (2.0 * c1sq);
  return c;
}

ErrorReport error_report(const DenseMatrix& a_hat, const DenseMatrix& a0, int n,
                         double sigma_xi, int r) {
  if (a_hat.rows() != a0.rows() || a_hat.cols() != a0.cols()) {
    throw DimensionError("error_report: estimate and truth differ in shape");
  }
  if (r < 1) throw DomainError("error_report: r must be >= 1");
  if (n < 1) throw DomainError("error_report: n must be >= 1");
  const DenseMatrix diff = a_hat - a0;
  const int m = static_cast<int>(diff.rows());
  const Vector sv = singular_values(diff);

  ErrorReport rep;
  rep.spectral = sv(0);
  rep.frobenius = sv.norm();
  rep.nuclear = sv.sum();
  const double qs[] = {1.0, 1.5, 2.0, 3.0, 4.0};
  for (double q : qs) {
    rep.schatten.emplace_back(SchattenQ(q), schatten_from_singular_values(sv, SchattenQ(q)));
  }
  rep.schatten.emplace_back(SchattenQ::inf(),
                            schatten_from_singular_values(sv, SchattenQ::inf()));
  const int k_max = std::min(m, 2 * r + 2);
  for (int k = 1; k <= k_max; ++k) {
    rep.kyfan[k] = kyfan_from_singular_values(sv, k);
  }
  const double denom = sigma_xi * std::sqrt(static_cast<double>(m) / n);
  rep.ratio_spectral =
      denom > 0.0 ? rep.spectral / denom : std::numeric_limits<double>::infinity();
  return rep;
}

std::map<std::string, bool> bound_check(const ErrorReport& report,
                                        const TheoryConstants& constants, double lambda,
                                        int n, int r) {
  if (r < 1) throw DomainError("bound_check: r must be >= 1");
  if (n < 1) throw DomainError("bound_check: n must be >= 1");
  std::map<std::string, bool> checks;
  const double unit = lambda / n;
  checks["spectral_ok"] = report.spectral <= constants.c_d * unit;
  checks["nuclear_ok"] = report.nuclear <= constants.c_d_prime * r * unit;
  for (const auto& [k, value] : report.kyfan) {
    const double bound = constants.c_d * (1.0 + constants.c0) * std::min(k, r) * unit;
    checks["kyfan_k" + std::to_string(k) + "_ok"] = value <= bound;
  }
  return checks;
}

bool bound_check_all(const std::map<std::string, bool>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const auto& kv) { return kv.second; });
}

double rsc_ratio(const sensing::MeasurementEnsemble& ens, const DenseMatrix& delta,
                 int r) {
  const int n = ens.n();
  if (n < 1) throw DomainError("rsc_ratio: ensemble has no measurements");
  auto [head, tail] = rank_truncate(delta, r);
  const double denom = std::sqrt(static_cast<double>(n)) * head.norm();
  if (denom == 0.0) throw DomainError("rsc_ratio: delta_max(r) is zero");
  return sensing::forward(ens, delta).norm() / denom;
}

RscEstimate rsc_probe(const sensing::MeasurementEnsemble& ens, int r, double c0,
                      int n_samples, uint64_t seed) {
  const int m = ens.m();
  if (r < 1 || r > m) throw DomainError("rsc_probe: rank must satisfy 1 <= r <= m");
  if (!(c0 > 0.0)) throw DomainError("rsc_probe: c0 must be positive");
  if (n_samples < 1) throw DomainError("rsc_probe: n_samples must be >= 1");

  const int t = m - r;  // tail rank; 0 leaves only the head
  RscEstimate est;
  est.degenerate_tail = (t == 0);
  est.n_samples = n_samples;
  est.seed = seed;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    Rng rng(mix64(seed, static_cast<uint64_t>(i)));
    const DenseMatrix u = orthonormal_columns(m, m, rng);
    const DenseMatrix v = orthonormal_columns(m, m, rng);
    const Vector head_sv = simplex_unit_l2(r, rng);
    DenseMatrix delta =
        u.leftCols(r) * head_sv.asDiagonal() * v.leftCols(r).transpose();
    if (t > 0) {
      Vector tail_sv = simplex_weights(t, rng) * (c0 * head_sv.sum());
      delta += u.rightCols(t) * tail_sv.asDiagonal() * v.rightCols(t).transpose();
    }
    best = std::min(best, rsc_ratio(ens, delta, r));
  }
  est.kappa_hat = best;
  return est;
}

}  // namespace lrsense::theory
