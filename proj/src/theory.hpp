#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sensing.hpp"

namespace lrsense::theory {

// Constants of the deterministic error-bound chain. c0 = 1 applies to the
// constrained (Dantzig-type) estimator, c0 = 3 to the penalized one.
struct TheoryConstants {
  double alpha = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;        // sqrt(1 - 1/alpha)
  double c_d = 0.0;       // 3/2 + 3(1+c0)^2 / (2 alpha (1+2c0) c1^2)
  double c_d_prime = 0.0; // 3(1+c0)^2 / (2 c1^2)
};

TheoryConstants theory_constants(double alpha, double c0);

struct ErrorReport {
  double spectral = 0.0;
  double frobenius = 0.0;
  double nuclear = 0.0;
  std::vector<std::pair<SchattenQ, double>> schatten;  // q in {1, 1.5, 2, 3, 4, inf}
  std::map<int, double> kyfan;                         // k = 1..min(m, 2r+2)
  double ratio_spectral = 0.0;  // spectral / (sigma_xi sqrt(m/n)); +inf if sigma = 0
};

/// Multi-norm error report for a_hat - a0, all norms from one SVD of the
/// difference.
ErrorReport error_report(const DenseMatrix& a_hat, const DenseMatrix& a0, int n,
                         double sigma_xi, int r);

/// Checks the error-bound chain: spectral <= c_d lambda/n,
/// nuclear <= c'_d r lambda/n, and Ky-Fan-k <= c_d (1+c0)(k^r) lambda/n for
/// every k in the report. Inequalities are inclusive. Keys: "spectral_ok",
/// "nuclear_ok", "kyfan_k{K}_ok".
std::map<std::string, bool> bound_check(const ErrorReport& report,
                                        const TheoryConstants& constants, double lambda,
                                        int n, int r);

bool bound_check_all(const std::map<std::string, bool>& checks);

/// ||X(delta)|| / (sqrt(n) ||delta_max(r)||_F), the quantity whose cone
/// minimum the restricted-strong-convexity constant is.
double rsc_ratio(const sensing::MeasurementEnsemble& ens, const DenseMatrix& delta, int r);

struct RscEstimate {
  double kappa_hat = 0.0;       // upper-bound estimate of the cone minimum
  bool degenerate_tail = false; // r left no room for a nonzero tail
  int n_samples = 0;
  uint64_t seed = 0;
};

/// Minimum of rsc_ratio over sampled cone members built as head + tail with
/// disjoint singular spaces: head random rank-r with unit-l2 simplex
/// spectrum, tail of rank m-r rescaled so its nuclear norm is exactly c0
/// times the head's (the binding case).
RscEstimate rsc_probe(const sensing::MeasurementEnsemble& ens, int r, double c0,
                      int n_samples, uint64_t seed);

}  // namespace lrsense::theory
