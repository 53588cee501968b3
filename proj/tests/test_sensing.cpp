#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "container.hpp"
#include "random_matrices.hpp"
#include "rng.hpp"
#include "sensing.hpp"

using namespace lrsense;
using namespace lrsense::sensing;

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("sensing") {

TEST_CASE("stream mixing separates nearby keys") {
  CHECK(mix64(1, 2, 3, 4) != mix64(1, 2, 4, 3));
  CHECK(mix64(0, 0) != mix64(0, 1));
  Rng a(mix64(7, 1)), b(mix64(7, 2));
  CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("sampling is deterministic per spec") {
  const EnsembleSpec spec{EnsembleKind::gaussian, 4, 10, 42};
  const auto e1 = sample_ensemble(spec);
  const auto e2 = sample_ensemble(spec);
  CHECK(e1.stacked() == e2.stacked());
  CHECK_THROWS_AS(sample_ensemble({EnsembleKind::gaussian, 0, 10, 1}), DomainError);
  CHECK_THROWS_AS(sample_ensemble({EnsembleKind::gaussian, 4, 0, 1}), DomainError);
}

TEST_CASE("rademacher ensembles have sign entries") {
  const auto ens = sample_ensemble({EnsembleKind::rademacher, 5, 20, 7});
  for (Eigen::Index i = 0; i < ens.stacked().size(); ++i) {
    const double v = ens.stacked().data()[i];
    CHECK((v == 1.0 || v == -1.0));
  }
}

TEST_CASE("both kinds are empirically isotropic") {
  const int n = 2000;
  Rng rng(5);
  DenseMatrix a = gaussian_matrix(10, 10, rng);
  a /= a.norm();
  const Vector va = Eigen::Map<const Vector>(a.data(), a.size());
  for (auto kind : {EnsembleKind::gaussian, EnsembleKind::rademacher}) {
    const auto ens = sample_ensemble({kind, 10, n, 99});
    const Vector image = ens.stacked() * va;
    const double mean_sq = image.squaredNorm() / n;
    CHECK(mean_sq > 1.0 - 15.0 / std::sqrt(n));
    CHECK(mean_sq < 1.0 + 15.0 / std::sqrt(n));
    // The spec example's wider band at the gaussian kind.
    if (kind == EnsembleKind::gaussian) {
      CHECK(mean_sq > 0.85);
      CHECK(mean_sq < 1.15);
    }
  }
}

TEST_CASE("forward pinned values") {
  const auto ens = MeasurementEnsemble::from_matrices(
      {EnsembleKind::gaussian, 2, 0, 0}, {DenseMatrix::Identity(2, 2)});
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  const Vector y = forward(ens, a);
  CHECK(y.size() == 1);
  CHECK(y(0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(forward(ens, DenseMatrix::Zero(2, 2)).norm() == 0.0);
  CHECK_THROWS_AS(forward(ens, DenseMatrix::Zero(3, 3)), DimensionError);
}

TEST_CASE("adjoint pinned values") {
  const auto ens = sample_ensemble({EnsembleKind::gaussian, 3, 4, 11});
  Vector e1 = Vector::Zero(4);
  e1(0) = 1.0;
  CHECK((adjoint(ens, e1) - ens.matrix(0)).norm() == 0.0);
  CHECK(adjoint(ens, Vector::Zero(4)).norm() == 0.0);
  CHECK_THROWS_AS(adjoint(ens, Vector::Zero(5)), DimensionError);
}

TEST_CASE("forward and adjoint are adjoint to each other") {
  for (auto kind : {EnsembleKind::gaussian, EnsembleKind::rademacher}) {
    const auto ens = sample_ensemble({kind, 6, 40, 13});
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      const DenseMatrix a = gaussian_matrix(6, 6, rng);
      Vector u(40);
      for (int j = 0; j < 40; ++j) u(j) = rng.gaussian();
      const double lhs = forward(ens, a).dot(u);
      const double rhs = (a.array() * adjoint(ens, u).array()).sum();
      CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("dataset responses follow the observation model") {
  Rng rng(3);
  const DenseMatrix a0 = gaussian_matrix(4, 4, rng);
  auto ens = sample_ensemble({EnsembleKind::gaussian, 4, 25, 19});

  const auto noiseless = generate_dataset(a0, ens, 0.0, NoiseKind::gaussian, 5);
  CHECK(noiseless.responses == forward(ens, a0));
  CHECK(noiseless.noise.norm() == 0.0);

  const auto pure_noise =
      generate_dataset(DenseMatrix::Zero(4, 4), ens, 1.0, NoiseKind::gaussian, 5);
  CHECK(pure_noise.responses == pure_noise.noise);

  CHECK_THROWS_AS(generate_dataset(a0, ens, -1.0, NoiseKind::gaussian, 5), DomainError);
  CHECK_THROWS_AS(generate_dataset(DenseMatrix::Zero(5, 5), ens, 0.1,
                                   NoiseKind::gaussian, 5),
                  DimensionError);
}

TEST_CASE("noise standard deviation matches sigma_xi empirically") {
  Rng rng(23);
  const DenseMatrix a0 = gaussian_matrix(10, 10, rng);
  auto ens = sample_ensemble({EnsembleKind::gaussian, 10, 5000, 29});
  const auto ds = generate_dataset(a0, std::move(ens), 0.01, NoiseKind::gaussian, 31);
  const Vector residual = ds.responses - forward(ds.ensemble, ds.A0);
  const double mean = residual.mean();
  const double stddev =
      std::sqrt((residual.array() - mean).square().sum() / (residual.size() - 1));
  CHECK(stddev > 0.009);
  CHECK(stddev < 0.011);
}

TEST_CASE("scaled rademacher noise takes values +-sigma") {
  auto ens = sample_ensemble({EnsembleKind::gaussian, 3, 50, 37});
  const auto ds = generate_dataset(DenseMatrix::Zero(3, 3), std::move(ens), 0.25,
                                   NoiseKind::rademacher_scaled, 41);
  for (int j = 0; j < 50; ++j) {
    CHECK(std::abs(std::abs(ds.noise(j)) - 0.25) < 1e-15);
  }
}

TEST_CASE("rip probe matches direct arithmetic on a tiny injected ensemble") {
  std::vector<DenseMatrix> mats;
  Rng rng(43);
  for (int j = 0; j < 3; ++j) mats.push_back(gaussian_matrix(2, 2, rng));
  const auto ens =
      MeasurementEnsemble::from_matrices({EnsembleKind::gaussian, 2, 0, 0}, mats);
  const auto est = rip_probe(ens, 1, 1, 0, 7);
  const double direct = std::abs(forward(ens, est.worst_probe).squaredNorm() / 3.0 - 1.0);
  CHECK(est.delta_hat == doctest::Approx(direct).epsilon(1e-12));
  CHECK(std::abs(est.worst_probe.norm() - 1.0) < 1e-12);
}

TEST_CASE("rip probe contract violations") {
  const auto ens = sample_ensemble({EnsembleKind::gaussian, 4, 30, 47});
  CHECK_THROWS_AS(rip_probe(ens, 0, 10, 0, 1), DomainError);
  CHECK_THROWS_AS(rip_probe(ens, 5, 10, 0, 1), DomainError);
  CHECK_THROWS_AS(rip_probe(ens, 1, 0, 0, 1), DomainError);
  CHECK_THROWS_AS(rip_probe(ens, 1, 10, -1, 1), DomainError);
}

TEST_CASE("rip probe estimates are monotone in the probe rank") {
  const auto ens = sample_ensemble({EnsembleKind::gaussian, 8, 500, 53});
  const auto d1 = rip_probe(ens, 1, 20, 5, 61);
  const auto d2 = rip_probe(ens, 2, 20, 5, 61);
  const auto d3 = rip_probe(ens, 3, 20, 5, 61);
  CHECK(d1.delta_hat <= d2.delta_hat);
  CHECK(d2.delta_hat <= d3.delta_hat);
  // Ascent refinement only sharpens the lower bound.
  const auto flat = rip_probe(ens, 2, 20, 0, 61);
  CHECK(flat.delta_hat <= d2.delta_hat);
  // Determinism.
  CHECK(rip_probe(ens, 2, 20, 5, 61).delta_hat == d2.delta_hat);
}

TEST_CASE("near-orthogonal images of orthogonal rank-one pairs") {
  const int n = 2000;
  const auto ens = sample_ensemble({EnsembleKind::gaussian, 8, n, 59});
  const double delta2 = rip_probe(ens, 2, 50, 10, 67).delta_hat;
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const DenseMatrix u = orthonormal_columns(8, 2, rng);
    const DenseMatrix v = orthonormal_columns(8, 2, rng);
    const DenseMatrix a = u.col(0) * v.col(0).transpose();
    const DenseMatrix b = u.col(1) * v.col(1).transpose();
    const double cross = forward(ens, a).dot(forward(ens, b)) / n;
    CHECK(std::abs(cross) <= delta2 + 3.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("noise image norm probe and its injected oracle") {
  const auto identity_ens = MeasurementEnsemble::from_matrices(
      {EnsembleKind::gaussian, 3, 0, 0}, {DenseMatrix::Identity(3, 3)});
  Vector xi(1);
  xi(0) = -0.7;
  CHECK(w_spectral_norm(identity_ens, xi) == doctest::Approx(0.7).epsilon(1e-12));

  const auto ens = sample_ensemble({EnsembleKind::gaussian, 6, 100, 73});
  const auto zeros = noise_norm_probe(ens, 0.0, 5, 79);
  for (double v : zeros) CHECK(v == 0.0);
  CHECK_THROWS_AS(noise_norm_probe(ens, 0.01, 0, 79), DomainError);
  // Deterministic per seed.
  CHECK(noise_norm_probe(ens, 0.01, 3, 83) == noise_norm_probe(ens, 0.01, 3, 83));
}

TEST_CASE("ensemble containers round-trip bit-exactly") {
  const auto ens = sample_ensemble({EnsembleKind::rademacher, 4, 12, 89});
  const std::string path = temp_path("lrsense_test_ensemble.bin");
  save_ensemble(path, ens);
  const auto back = load_ensemble(path);
  CHECK(back.spec().kind == ens.spec().kind);
  CHECK(back.spec().seed == ens.spec().seed);
  CHECK(back.stacked() == ens.stacked());
  std::filesystem::remove(path);
}

TEST_CASE("dataset containers round-trip bit-exactly") {
  Rng rng(97);
  const DenseMatrix a0 = gaussian_matrix(4, 4, rng);
  auto ens = sample_ensemble({EnsembleKind::gaussian, 4, 15, 101});
  const auto ds = generate_dataset(a0, std::move(ens), 0.05, NoiseKind::gaussian, 103);
  const std::string path = temp_path("lrsense_test_dataset.bin");
  save_dataset(path, ds);
  const auto back = load_dataset(path);
  CHECK(back.ensemble.stacked() == ds.ensemble.stacked());
  CHECK(back.A0 == ds.A0);
  CHECK(back.noise == ds.noise);
  CHECK(back.responses == ds.responses);
  CHECK(back.sigma_xi == ds.sigma_xi);
  CHECK(back.noise_kind == ds.noise_kind);
  CHECK(back.noise_seed == ds.noise_seed);
  std::filesystem::remove(path);
}

TEST_CASE("containers reject foreign and truncated files") {
  const std::string path = temp_path("lrsense_test_bad.bin");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTLRSENSE_AT_ALL";
  }
  CHECK_THROWS_AS(load_ensemble(path), IoError);

  const auto ens = sample_ensemble({EnsembleKind::gaussian, 3, 4, 107});
  save_ensemble(path, ens);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  CHECK_THROWS_AS(load_ensemble(path), IoError);
  std::filesystem::remove(path);

  const std::string mpath = temp_path("lrsense_test_matstack.bin");
  save_matrix(mpath, DenseMatrix::Identity(3, 3));
  CHECK_THROWS_AS(load_ensemble(mpath), IoError);  // kind mismatch
  CHECK((load_matrix(mpath) - DenseMatrix::Identity(3, 3)).norm() == 0.0);
  std::filesystem::remove(mpath);
}

}  // TEST_SUITE
