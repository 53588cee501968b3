#include "sensing.hpp"

#include <cmath>

#include "container.hpp"
#include "random_matrices.hpp"
#include "rng.hpp"

namespace lrsense::sensing {

namespace {

Eigen::Map<const Vector> as_vec(const DenseMatrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

DenseMatrix from_vec(const Vector& v, int m) {
  return Eigen::Map<const DenseMatrix>(v.data(), m, m);
}

void require_matching(const MeasurementEnsemble& ens, const DenseMatrix& a,
                      const char* what) {
  if (a.rows() != ens.m() || a.cols() != ens.m()) {
    throw DimensionError(std::string(what) + ": matrix does not match ensemble side");
  }
}

}  // namespace

MeasurementEnsemble::MeasurementEnsemble(EnsembleSpec spec, DenseMatrix stacked)
    : spec_(spec), stacked_(std::move(stacked)) {
  if (spec_.m < 1 || spec_.n < 0) {
    throw DimensionError("MeasurementEnsemble: need m >= 1 and n >= 0");
  }
  if (stacked_.rows() != spec_.n ||
      stacked_.cols() != static_cast<Eigen::Index>(spec_.m) * spec_.m) {
    throw DimensionError("MeasurementEnsemble: stacked payload must be n x m^2");
  }
  require_finite(stacked_, "MeasurementEnsemble");
}

MeasurementEnsemble MeasurementEnsemble::from_matrices(
    EnsembleSpec spec, const std::vector<DenseMatrix>& mats) {
  spec.n = static_cast<int>(mats.size());
  DenseMatrix stacked(spec.n, static_cast<Eigen::Index>(spec.m) * spec.m);
  for (int j = 0; j < spec.n; ++j) {
    if (mats[j].rows() != spec.m || mats[j].cols() != spec.m) {
      throw DimensionError("from_matrices: all matrices must be m x m");
    }
    stacked.row(j) = as_vec(mats[j]);
  }
  return MeasurementEnsemble(spec, std::move(stacked));
}

Eigen::Map<const DenseMatrix> MeasurementEnsemble::matrix(int j) const {
  if (j < 0 || j >= spec_.n) throw DimensionError("matrix index out of range");
  return Eigen::Map<const DenseMatrix>(stacked_.data() +
                                           static_cast<Eigen::Index>(j) * stacked_.cols(),
                                       spec_.m, spec_.m);
}

MeasurementEnsemble sample_ensemble(const EnsembleSpec& spec) {
  if (spec.m < 1 || spec.n < 1) {
    throw DomainError("sample_ensemble: need m >= 1 and n >= 1");
  }
  DenseMatrix stacked(spec.n, static_cast<Eigen::Index>(spec.m) * spec.m);
  Rng rng(spec.seed);
  if (spec.kind == EnsembleKind::gaussian) {
    for (Eigen::Index i = 0; i < stacked.size(); ++i) stacked.data()[i] = rng.gaussian();
  } else {
    for (Eigen::Index i = 0; i < stacked.size(); ++i) stacked.data()[i] = rng.rademacher();
  }
  return MeasurementEnsemble(spec, std::move(stacked));
}

Vector forward(const MeasurementEnsemble& ens, const DenseMatrix& a) {
  require_matching(ens, a, "forward");
  return ens.stacked() * as_vec(a);
}

DenseMatrix adjoint(const MeasurementEnsemble& ens, const Vector& u) {
  if (u.size() != ens.n()) {
    throw DimensionError("adjoint: coefficient vector must have length n");
  }
  Vector v = ens.stacked().transpose() * u;
  return from_vec(v, ens.m());
}

Eigen::MatrixXd forward_vecs(const MeasurementEnsemble& ens, const Eigen::MatrixXd& vecs) {
  return ens.stacked() * vecs;
}

Eigen::MatrixXd adjoint_vecs(const MeasurementEnsemble& ens, const Eigen::MatrixXd& us) {
  return ens.stacked().transpose() * us;
}

TraceRegressionDataset generate_dataset(DenseMatrix A0, MeasurementEnsemble ensemble,
                                        double sigma_xi, NoiseKind noise_kind,
                                        uint64_t noise_seed) {
  require_matching(ensemble, A0, "generate_dataset");
  require_finite(A0, "generate_dataset");
  if (!(sigma_xi >= 0.0)) throw DomainError("generate_dataset: sigma_xi must be >= 0");
  const int n = ensemble.n();
  Vector noise(n);
  Rng rng(noise_seed);
  if (noise_kind == NoiseKind::gaussian) {
    for (int j = 0; j < n; ++j) noise(j) = sigma_xi * rng.gaussian();
  } else {
    for (int j = 0; j < n; ++j) noise(j) = sigma_xi * rng.rademacher();
  }
  Vector responses = forward(ensemble, A0) + noise;
  return TraceRegressionDataset{std::move(ensemble), std::move(A0), sigma_xi,
                                noise_kind,          noise_seed,    std::move(noise),
                                std::move(responses)};
}

RipEstimate rip_probe(const MeasurementEnsemble& ens, int r, int n_samples,
                      int ascent_steps, uint64_t seed) {
  const int m = ens.m();
  const int n = ens.n();
  if (r < 1 || r > m) throw DomainError("rip_probe: rank must satisfy 1 <= r <= m");
  if (n_samples < 1) throw DomainError("rip_probe: need at least one probe sample");
  if (ascent_steps < 0) throw DomainError("rip_probe: ascent_steps must be >= 0");
  if (n < 1) throw DomainError("rip_probe: ensemble has no measurements");

  const double eta = 0.1 / std::sqrt(static_cast<double>(n));
  double best = -1.0;
  Vector best_vec = Vector::Zero(static_cast<Eigen::Index>(m) * m);

  for (int s = 1; s <= r; ++s) {
    Rng rng(mix64(seed, static_cast<uint64_t>(s)));
    Eigen::MatrixXd probes(static_cast<Eigen::Index>(m) * m, n_samples);
    for (int i = 0; i < n_samples; ++i) {
      const DenseMatrix a = random_low_rank_unit(m, s, rng);
      probes.col(i) = as_vec(a);
    }
    for (int step = 0; step <= ascent_steps; ++step) {
      const Eigen::MatrixXd images = forward_vecs(ens, probes);
      Vector dev(n_samples);
      for (int i = 0; i < n_samples; ++i) {
        dev(i) = images.col(i).squaredNorm() / n - 1.0;
        if (std::abs(dev(i)) > best) {
          best = std::abs(dev(i));
          best_vec = probes.col(i);
        }
      }
      if (step == ascent_steps) break;
      const Eigen::MatrixXd grad = adjoint_vecs(ens, images) * (2.0 / n);
      for (int i = 0; i < n_samples; ++i) {
        const double dir = dev(i) >= 0.0 ? 1.0 : -1.0;
        Vector moved = probes.col(i) + (eta * dir) * grad.col(i);
        auto [head, tail] = rank_truncate(from_vec(moved, m), s);
        const double norm = head.norm();
        if (norm > 0.0) {
          probes.col(i) = as_vec(head) / norm;
        }
      }
    }
  }
  return RipEstimate{r, best, n_samples, ascent_steps, seed, from_vec(best_vec, m)};
}

double w_spectral_norm(const MeasurementEnsemble& ens, const Vector& xi) {
  return spectral_norm(adjoint(ens, xi));
}

std::vector<double> noise_norm_probe(const MeasurementEnsemble& ens, double sigma_xi,
                                     int trials, uint64_t seed) {
  if (trials < 1) throw DomainError("noise_norm_probe: trials must be >= 1");
  if (!(sigma_xi >= 0.0)) throw DomainError("noise_norm_probe: sigma_xi must be >= 0");
  const int n = ens.n();
  if (n < 1) throw DomainError("noise_norm_probe: ensemble has no measurements");
  std::vector<double> values(trials);
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix64(seed, static_cast<uint64_t>(t)));
    Vector xi(n);
    for (int j = 0; j < n; ++j) xi(j) = sigma_xi * rng.gaussian();
    values[t] = w_spectral_norm(ens, xi) / n;
  }
  return values;
}

void save_ensemble(const std::string& path, const MeasurementEnsemble& ens) {
  const auto& spec = ens.spec();
  ContainerWriter w(path, {static_cast<uint64_t>(spec.m), static_cast<uint64_t>(spec.n),
                           static_cast<uint64_t>(spec.kind), spec.seed});
  w.write_doubles(ens.stacked().data(), static_cast<size_t>(ens.stacked().size()));
  w.close();
}

MeasurementEnsemble load_ensemble(const std::string& path) {
  ContainerReader r(path);
  const auto& h = r.header();
  if (h.kind > 1) throw IoError("not an ensemble container: " + path);
  EnsembleSpec spec{static_cast<EnsembleKind>(h.kind), static_cast<int>(h.m),
                    static_cast<int>(h.n), h.seed};
  DenseMatrix stacked(spec.n, static_cast<Eigen::Index>(spec.m) * spec.m);
  r.read_doubles(stacked.data(), static_cast<size_t>(stacked.size()));
  r.expect_eof();
  return MeasurementEnsemble(spec, std::move(stacked));
}

void save_dataset(const std::string& path, const TraceRegressionDataset& ds) {
  const auto& spec = ds.ensemble.spec();
  ContainerWriter w(path, {static_cast<uint64_t>(spec.m), static_cast<uint64_t>(spec.n),
                           static_cast<uint64_t>(spec.kind), spec.seed});
  w.write_doubles(ds.ensemble.stacked().data(),
                  static_cast<size_t>(ds.ensemble.stacked().size()));
  w.write_doubles(ds.A0.data(), static_cast<size_t>(ds.A0.size()));
  w.write_doubles(ds.noise.data(), static_cast<size_t>(ds.noise.size()));
  w.write_doubles(ds.responses.data(), static_cast<size_t>(ds.responses.size()));
  w.write_double(ds.sigma_xi);
  w.write_u64(static_cast<uint64_t>(ds.noise_kind));
  w.write_u64(ds.noise_seed);
  w.close();
}

TraceRegressionDataset load_dataset(const std::string& path) {
  ContainerReader r(path);
  const auto& h = r.header();
  if (h.kind > 1) throw IoError("not a dataset container: " + path);
  EnsembleSpec spec{static_cast<EnsembleKind>(h.kind), static_cast<int>(h.m),
                    static_cast<int>(h.n), h.seed};
  DenseMatrix stacked(spec.n, static_cast<Eigen::Index>(spec.m) * spec.m);
  r.read_doubles(stacked.data(), static_cast<size_t>(stacked.size()));
  DenseMatrix a0(spec.m, spec.m);
  r.read_doubles(a0.data(), static_cast<size_t>(a0.size()));
  Vector noise(spec.n);
  r.read_doubles(noise.data(), static_cast<size_t>(noise.size()));
  Vector responses(spec.n);
  r.read_doubles(responses.data(), static_cast<size_t>(responses.size()));
  const double sigma_xi = r.read_double();
  const auto noise_kind = static_cast<NoiseKind>(r.read_u64());
  const uint64_t noise_seed = r.read_u64();
  r.expect_eof();
  return TraceRegressionDataset{MeasurementEnsemble(spec, std::move(stacked)),
                                std::move(a0),
                                sigma_xi,
                                noise_kind,
                                noise_seed,
                                std::move(noise),
                                std::move(responses)};
}

}  // namespace lrsense::sensing
