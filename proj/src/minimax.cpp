#include "minimax.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "container.hpp"
#include "random_matrices.hpp"
#include "rng.hpp"

namespace lrsense::minimax {

DenseMatrix grassmann_sample(int m, int k, uint64_t seed) {
  if (k < 1 || k > m) throw DomainError("grassmann_sample: need 1 <= k <= m");
  Rng rng(seed);
  const DenseMatrix q = orthonormal_columns(m, k, rng);
  return q * q.transpose();
}

double tau_q(const DenseMatrix& p, const DenseMatrix& q_proj, SchattenQ q) {
  if (p.rows() != q_proj.rows() || p.cols() != q_proj.cols()) {
    throw DimensionError("tau_q: projections differ in shape");
  }
  return schatten_norm(p - q_proj, q);
}

GrassmannPacking greedy_packing(int m, int k, SchattenQ q, double epsilon,
                                int max_cardinality, int max_attempts, uint64_t seed) {
  if (k < 1 || k > m) throw DomainError("greedy_packing: need 1 <= k <= m");
  if (k > m - k) throw DomainError("greedy_packing: need k <= m - k");
  if (!(epsilon > 0.0)) throw DomainError("greedy_packing: epsilon must be positive");
  if (max_cardinality < 1) throw DomainError("greedy_packing: max_cardinality must be >= 1");
  if (max_attempts < 1) throw DomainError("greedy_packing: max_attempts must be >= 1");

  const double threshold =
      epsilon * (q.is_inf() ? 1.0 : std::pow(static_cast<double>(k), 1.0 / q.value()));

  GrassmannPacking packing;
  packing.m = m;
  packing.k = k;
  packing.q = q;
  packing.epsilon = epsilon;
  packing.seed = seed;
  packing.min_pairwise_distance = std::numeric_limits<double>::infinity();

  int attempt = 0;
  while (attempt < max_attempts &&
         static_cast<int>(packing.projections.size()) < max_cardinality) {
    ++attempt;
    DenseMatrix cand = grassmann_sample(m, k, mix64(seed, static_cast<uint64_t>(attempt)));
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& kept : packing.projections) {
      nearest = std::min(nearest, tau_q(cand, kept, q));
      if (nearest < threshold) break;
    }
    if (nearest >= threshold) {
      if (!packing.projections.empty()) {
        packing.min_pairwise_distance = std::min(packing.min_pairwise_distance, nearest);
      }
      packing.projections.push_back(std::move(cand));
    }
  }
  packing.attempts = attempt;
  if (packing.projections.empty()) {
    throw DomainError("greedy_packing: no projections kept; epsilon too large");
  }
  return packing;
}

double kl_divergence(const DenseMatrix& a, const DenseMatrix& b, int n, double sigma_xi) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("kl_divergence: matrices differ in shape");
  }
  if (n < 1) throw DomainError("kl_divergence: n must be >= 1");
  if (!(sigma_xi > 0.0)) throw DomainError("kl_divergence: sigma_xi must be positive");
  return static_cast<double>(n) * (a - b).squaredNorm() / (2.0 * sigma_xi * sigma_xi);
}

MinimaxInstance build_minimax_instance(int m, int r, int n, double sigma_xi,
                                       double c_prime, SchattenQ q, uint64_t seed) {
  if (2 * r > m) throw DomainError("build_minimax_instance: need 2r <= m");
  if (n < 1) throw DomainError("build_minimax_instance: n must be >= 1");
  if (!(sigma_xi > 0.0)) throw DomainError("build_minimax_instance: sigma_xi must be positive");
  if (!(c_prime > 0.0)) throw DomainError("build_minimax_instance: c_prime must be positive");

  MinimaxInstance inst;
  inst.packing = greedy_packing(m, r, q, 0.5, kInstanceMaxCardinality,
                                kInstanceMaxAttempts, seed);
  inst.n = n;
  inst.sigma_xi = sigma_xi;
  inst.c_prime = c_prime;
  inst.kappa = c_prime * sigma_xi * std::sqrt(static_cast<double>(m) / n);
  inst.matrices.reserve(inst.packing.projections.size());
  for (const auto& p : inst.packing.projections) {
    inst.matrices.push_back(inst.kappa * p);
  }
  double max_kl = 0.0;
  for (size_t i = 0; i < inst.matrices.size(); ++i) {
    for (size_t j = i + 1; j < inst.matrices.size(); ++j) {
      max_kl = std::max(max_kl,
                        kl_divergence(inst.matrices[i], inst.matrices[j], n, sigma_xi));
    }
  }
  inst.max_pairwise_kl = max_kl;
  inst.log_cardinality = std::log(static_cast<double>(inst.matrices.size()));
  inst.kl_condition_met = inst.max_pairwise_kl <= inst.log_cardinality;
  return inst;
}

std::string minimax_summary_json(const MinimaxInstance& inst, int r) {
  nlohmann::json j;
  j["m"] = inst.packing.m;
  j["r"] = r;
  j["n"] = inst.n;
  j["sigma_xi"] = inst.sigma_xi;
  j["c_prime"] = inst.c_prime;
  j["kappa"] = inst.kappa;
  j["cardinality"] = inst.matrices.size();
  j["max_pairwise_kl"] = inst.max_pairwise_kl;
  j["log_cardinality"] = inst.log_cardinality;
  j["kl_condition_met"] = inst.kl_condition_met;
  return j.dump(2);
}

void save_minimax_summary(const std::string& path, const MinimaxInstance& inst, int r) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << minimax_summary_json(inst, r) << "\n";
  if (!out) throw IoError("write failure: " + path);
}

void save_minimax_matrices(const std::string& path, const MinimaxInstance& inst) {
  save_matrix_stack(path, inst.matrices, inst.packing.seed);
}

}  // namespace lrsense::minimax
