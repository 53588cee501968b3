#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matcore.hpp"

namespace lrsense::minimax {

/// Orthogonal projection onto a random k-dimensional subspace of R^m:
/// P = QQ^T with Q the orthonormalized factor of an m x k Gaussian draw.
DenseMatrix grassmann_sample(int m, int k, uint64_t seed);

/// Subspace metric: Schatten-q norm of the projection difference.
double tau_q(const DenseMatrix& p, const DenseMatrix& q_proj, SchattenQ q);

struct GrassmannPacking {
  int m = 0;
  int k = 0;
  SchattenQ q = SchattenQ::inf();
  double epsilon = 0.0;
  std::vector<DenseMatrix> projections;
  double min_pairwise_distance = 0.0;  // +inf when fewer than two kept
  uint64_t seed = 0;
  int attempts = 0;
};

/// Greedy packing of rank-k projections: candidates are kept iff their tau_q
/// distance to every kept projection is at least epsilon * k^(1/q). Stops at
/// max_cardinality keeps or max_attempts draws. Requires k <= m - k.
GrassmannPacking greedy_packing(int m, int k, SchattenQ q, double epsilon,
                                int max_cardinality, int max_attempts, uint64_t seed);

/// KL divergence between the response distributions of two ground truths
/// under Gaussian noise and an isotropic ensemble: n ||A - B||_F^2 / (2 sigma^2).
double kl_divergence(const DenseMatrix& a, const DenseMatrix& b, int n, double sigma_xi);

struct MinimaxInstance {
  GrassmannPacking packing;
  double kappa = 0.0;  // c' sigma_xi sqrt(m/n)
  std::vector<DenseMatrix> matrices;  // kappa * P_j
  int n = 0;
  double sigma_xi = 0.0;
  double c_prime = 0.0;
  double max_pairwise_kl = 0.0;
  double log_cardinality = 0.0;
  bool kl_condition_met = false;
};

// Desk-scale caps for the instance packing; the combinatorial lower bound
// on the packing cardinality is astronomically larger.
inline constexpr int kInstanceMaxCardinality = 64;
inline constexpr int kInstanceMaxAttempts = 5000;

/// Hard-instance family for the lower-bound construction: a separation-1/2
/// packing of rank-r projections scaled by kappa = c' sigma_xi sqrt(m/n), with
/// the pairwise-KL-versus-log-cardinality condition evaluated. Requires 2r <= m.
MinimaxInstance build_minimax_instance(int m, int r, int n, double sigma_xi,
                                       double c_prime, SchattenQ q, uint64_t seed);

std::string minimax_summary_json(const MinimaxInstance& inst, int r);
void save_minimax_summary(const std::string& path, const MinimaxInstance& inst, int r);
void save_minimax_matrices(const std::string& path, const MinimaxInstance& inst);

}  // namespace lrsense::minimax
