#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "matcore.hpp"

namespace lrsense::sensing {

enum class EnsembleKind : uint64_t { gaussian = 0, rademacher = 1 };
enum class NoiseKind : uint64_t { gaussian = 0, rademacher_scaled = 1 };

// Both kinds have i.i.d. unit-variance entries, hence E<A,X>^2 = ||A||_F^2
// (isotropic).
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::gaussian;
  int m = 0;   // matrix side
  int n = 0;   // number of measurements
  uint64_t seed = 0;
};

// Ordered list of n measurement matrices, stored stacked as an n x m^2
// row-major matrix (row j = vec(X_j)) so the sampling operator and its
// adjoint are single mat-vec products.
class MeasurementEnsemble {
 public:
  MeasurementEnsemble(EnsembleSpec spec, DenseMatrix stacked);
  static MeasurementEnsemble from_matrices(EnsembleSpec spec,
                                           const std::vector<DenseMatrix>& mats);

  const EnsembleSpec& spec() const noexcept { return spec_; }
  int m() const noexcept { return spec_.m; }
  int n() const noexcept { return spec_.n; }

  Eigen::Map<const DenseMatrix> matrix(int j) const;
  const DenseMatrix& stacked() const noexcept { return stacked_; }

 private:
  EnsembleSpec spec_;
  DenseMatrix stacked_;
};

/// Draw the ensemble for a spec; bit-identical for identical specs.
MeasurementEnsemble sample_ensemble(const EnsembleSpec& spec);

/// Sampling operator: component j is <A, X_j> = trace(X_j^T A).
Vector forward(const MeasurementEnsemble& ens, const DenseMatrix& a);

/// Adjoint: sum_j u_j X_j.
DenseMatrix adjoint(const MeasurementEnsemble& ens, const Vector& u);

// Column-batched forms on vectorized matrices; used by the CG solver and the
// probes. vecs is m^2 x K, result n x K (and back for the adjoint).
Eigen::MatrixXd forward_vecs(const MeasurementEnsemble& ens, const Eigen::MatrixXd& vecs);
Eigen::MatrixXd adjoint_vecs(const MeasurementEnsemble& ens, const Eigen::MatrixXd& us);

struct TraceRegressionDataset {
  MeasurementEnsemble ensemble;
  DenseMatrix A0;
  double sigma_xi = 0.0;
  NoiseKind noise_kind = NoiseKind::gaussian;
  uint64_t noise_seed = 0;
  Vector noise;      // xi_j
  Vector responses;  // Y_j = <A0, X_j> + xi_j
};

/// Synthesize responses Y_j = <A0, X_j> + xi_j with i.i.d. noise of
/// standard deviation sigma_xi (Gaussian, or +-sigma_xi for the scaled
/// Rademacher kind).
TraceRegressionDataset generate_dataset(DenseMatrix A0, MeasurementEnsemble ensemble,
                                        double sigma_xi, NoiseKind noise_kind,
                                        uint64_t noise_seed);

struct RipEstimate {
  int r = 0;
  double delta_hat = 0.0;  // lower-bound estimate of the true isometry constant
  int n_samples = 0;
  int ascent_steps = 0;
  uint64_t seed = 0;
  DenseMatrix worst_probe;  // unit-Frobenius rank <= r matrix attaining delta_hat
};

/// Estimate the rank-r isometry constant from below: the probe set is, for
/// each s = 1..r, n_samples random unit-Frobenius rank-s matrices, each
/// refined by ascent_steps projected-gradient ascent steps on the deviation
/// |(1/n)||X(A)||^2 - 1| (step 0.1/sqrt(n), projection = rank-s truncation
/// plus renormalization). Including all lower ranks with per-rank derived
/// streams makes the estimate monotone in r by construction.
RipEstimate rip_probe(const MeasurementEnsemble& ens, int r, int n_samples,
                      int ascent_steps, uint64_t seed);

/// ||sum_j xi_j X_j||_inf (unscaled spectral norm of the noise image).
double w_spectral_norm(const MeasurementEnsemble& ens, const Vector& xi);

/// Per-trial values of ||(1/n) sum_j xi_j X_j||_inf for fresh Gaussian noise
/// draws with standard deviation sigma_xi.
std::vector<double> noise_norm_probe(const MeasurementEnsemble& ens, double sigma_xi,
                                     int trials, uint64_t seed);

// Container I/O. An ensemble file holds the stacked measurement payload; a
// dataset file appends A0, noise, responses, and a small metadata trailer.
void save_ensemble(const std::string& path, const MeasurementEnsemble& ens);
MeasurementEnsemble load_ensemble(const std::string& path);
void save_dataset(const std::string& path, const TraceRegressionDataset& ds);
TraceRegressionDataset load_dataset(const std::string& path);

}  // namespace lrsense::sensing
