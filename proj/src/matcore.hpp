#pragma once

#include <Eigen/Core>
#include <utility>

#include "errors.hpp"

namespace lrsense {

// Universal dense value type. Row-major so the flat entry array matches the
// binary container layout and the C API without copies.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Schatten order: a finite exponent q >= 1 or the distinguished value
/// infinity (spectral norm). Deliberately not a float sentinel.
class SchattenQ {
 public:
  explicit SchattenQ(double q) : q_(q), finite_(true) {
    if (!(q >= 1.0) || !std::isfinite(q)) {
      throw DomainError("Schatten order must be a finite real >= 1");
    }
  }

  static SchattenQ inf() noexcept {
    SchattenQ s;
    return s;
  }

  bool is_inf() const noexcept { return !finite_; }
  double value() const noexcept { return q_; }

  friend bool operator==(const SchattenQ& a, const SchattenQ& b) noexcept {
    return a.finite_ == b.finite_ && (!a.finite_ || a.q_ == b.q_);
  }

 private:
  SchattenQ() noexcept : q_(0.0), finite_(false) {}
  double q_;
  bool finite_;
};

struct SVDFactors {
  DenseMatrix U;            // m x m orthogonal
  Vector singular_values;   // nonincreasing, >= 0
  DenseMatrix V;            // m x m orthogonal
};

void require_square(const DenseMatrix& a, const char* what);
void require_finite(const DenseMatrix& a, const char* what);

/// Full SVD of a square matrix, A = U diag(s) V^T. Deterministic for a fixed
/// input; the first entry of each left singular vector larger than 1e-12 in
/// magnitude is made nonnegative (sign convention).
SVDFactors svd(const DenseMatrix& a);

/// Singular values only (no U/V); same ordering as svd().
Vector singular_values(const DenseMatrix& a);

double schatten_from_singular_values(const Vector& sv, SchattenQ q);
double kyfan_from_singular_values(const Vector& sv, int k);

/// (sum_j s_j^q)^(1/q); the largest singular value for q = inf.
double schatten_norm(const DenseMatrix& a, SchattenQ q);

/// Sum of the k largest singular values, 1 <= k <= m.
double kyfan_norm(const DenseMatrix& a, int k);

/// Best rank-r approximation and its complement: head = sum_{j<=r} s_j u_j v_j^T,
/// tail = a - head. head + tail == a exactly. Ties among equal singular values
/// are broken in the deterministic order the SVD emits, so head is one valid
/// best rank-r approximation.
std::pair<DenseMatrix, DenseMatrix> rank_truncate(const DenseMatrix& a, int r);

/// Singular value soft-thresholding: U diag(max(s_j - tau, 0)) V^T. Exact
/// minimizer of lambda*||B||_1 + (rho/2)*||B - a||_F^2 with tau = lambda/rho.
DenseMatrix svt(const DenseMatrix& a, double tau);

struct ConeCheck {
  bool is_member;
  double ratio;  // ||tail||_1 / ||head||_1 at rank r
};

/// Nuclear-norm tail-to-head ratio at rank r, compared against beta.
/// Conventions: a zero matrix is a member with ratio 0; a zero head with a
/// nonzero tail (impossible for sorted singular values, kept for safety)
/// yields ratio +inf.
ConeCheck cone_membership(const DenseMatrix& delta, int r, double beta);

/// ||a||_p^theta * ||a||_r^(1-theta) - ||a||_q with theta solving
/// theta/p + (1-theta)/r = 1/q; requires 1 <= p < q < r <= inf.
/// Mathematically >= 0 for every matrix.
double interpolation_slack(const DenseMatrix& a, double p, double q, SchattenQ r);

/// Largest singular value. Full SVD for m <= 64, power iteration on A^T A
/// (200 steps, 1e-10 relative tolerance) beyond; intended for probe loops.
double spectral_norm(const DenseMatrix& a);

}  // namespace lrsense
