#include "matcore.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace lrsense {

namespace {

constexpr double kSignEps = 1e-12;

void apply_sign_convention(DenseMatrix& u, DenseMatrix& v) {
  const Eigen::Index m = u.rows();
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::Index lead = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::abs(u(i, j)) > kSignEps) {
        lead = i;
        break;
      }
    }
    if (lead >= 0 && u(lead, j) < 0.0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }
}

}  // namespace

void require_square(const DenseMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw DimensionError(std::string(what) + ": square matrix required");
  }
}

void require_finite(const DenseMatrix& a, const char* what) {
  if (!a.allFinite()) {
    throw DomainError(std::string(what) + ": matrix has non-finite entries");
  }
}

SVDFactors svd(const DenseMatrix& a) {
  require_square(a, "svd");
  require_finite(a, "svd");
  Eigen::JacobiSVD<DenseMatrix> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SVDFactors f{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  apply_sign_convention(f.U, f.V);
  return f;
}

Vector singular_values(const DenseMatrix& a) {
  require_square(a, "singular_values");
  require_finite(a, "singular_values");
  Eigen::JacobiSVD<DenseMatrix> dec(a);
  return dec.singularValues();
}

double schatten_from_singular_values(const Vector& sv, SchattenQ q) {
  if (sv.size() == 0) return 0.0;
  const double top = sv(0);
  if (q.is_inf() || top == 0.0) return top;
  if (q.value() == 1.0) return sv.sum();  // keeps the Ky-Fan-m identity exact
  // Factor out the leading value so large exponents cannot overflow.
  double acc = 0.0;
  for (Eigen::Index j = 0; j < sv.size(); ++j) {
    acc += std::pow(sv(j) / top, q.value());
  }
  return top * std::pow(acc, 1.0 / q.value());
}

double kyfan_from_singular_values(const Vector& sv, int k) {
  if (k < 1 || k > sv.size()) {
    throw DomainError("kyfan_norm: k must satisfy 1 <= k <= m");
  }
  return sv.head(k).sum();
}

double schatten_norm(const DenseMatrix& a, SchattenQ q) {
  return schatten_from_singular_values(singular_values(a), q);
}

double kyfan_norm(const DenseMatrix& a, int k) {
  return kyfan_from_singular_values(singular_values(a), k);
}

std::pair<DenseMatrix, DenseMatrix> rank_truncate(const DenseMatrix& a, int r) {
  require_square(a, "rank_truncate");
  const Eigen::Index m = a.rows();
  if (r < 0 || r > m) {
    throw DomainError("rank_truncate: rank must satisfy 0 <= r <= m");
  }
  if (r == 0) {
    DenseMatrix head = DenseMatrix::Zero(m, m);
    return {head, a};
  }
  const SVDFactors f = svd(a);
  DenseMatrix head = f.U.leftCols(r) * f.singular_values.head(r).asDiagonal() *
                     f.V.leftCols(r).transpose();
  DenseMatrix tail = a - head;
  return {head, tail};
}

DenseMatrix svt(const DenseMatrix& a, double tau) {
  if (!(tau >= 0.0)) {
    throw DomainError("svt: threshold must be nonnegative");
  }
  const SVDFactors f = svd(a);
  Vector s = (f.singular_values.array() - tau).max(0.0);
  return f.U * s.asDiagonal() * f.V.transpose();
}

ConeCheck cone_membership(const DenseMatrix& delta, int r, double beta) {
  require_square(delta, "cone_membership");
  if (r < 1 || r > delta.rows()) {
    throw DomainError("cone_membership: rank must satisfy 1 <= r <= m");
  }
  if (!(beta > 0.0)) {
    throw DomainError("cone_membership: beta must be positive");
  }
  const Vector sv = singular_values(delta);
  const double head = sv.head(r).sum();
  const double tail = sv.size() > r ? sv.tail(sv.size() - r).sum() : 0.0;
  if (head == 0.0) {
    if (tail == 0.0) return {true, 0.0};
    return {false, std::numeric_limits<double>::infinity()};
  }
  const double ratio = tail / head;
  return {ratio <= beta, ratio};
}

double interpolation_slack(const DenseMatrix& a, double p, double q, SchattenQ r) {
  if (!(p >= 1.0) || !(q > p) || !std::isfinite(p) || !std::isfinite(q)) {
    throw DomainError("interpolation_slack: need 1 <= p < q < r");
  }
  if (!r.is_inf() && !(r.value() > q)) {
    throw DomainError("interpolation_slack: need 1 <= p < q < r");
  }
  const double theta =
      r.is_inf() ? p / q : (1.0 / q - 1.0 / r.value()) / (1.0 / p - 1.0 / r.value());
  const Vector sv = singular_values(a);
  const double np = schatten_from_singular_values(sv, SchattenQ(p));
  const double nq = schatten_from_singular_values(sv, SchattenQ(q));
  const double nr = schatten_from_singular_values(sv, r);
  return std::pow(np, theta) * std::pow(nr, 1.0 - theta) - nq;
}

double spectral_norm(const DenseMatrix& a) {
  require_square(a, "spectral_norm");
  require_finite(a, "spectral_norm");
  const Eigen::Index m = a.rows();
  if (m <= 64) {
    return singular_values(a)(0);
  }
  // Power iteration on A^T A; deterministic start.
  Vector v = Vector::Ones(m);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vector w = a.transpose() * (a * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    const double next = v.dot(a.transpose() * (a * v));
    if (std::abs(next - lambda) <= 1e-10 * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace lrsense
