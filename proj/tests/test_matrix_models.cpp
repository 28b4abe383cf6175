#include <catch2/catch_amalgamated.hpp>

#include "specmeas/matrix_models.hpp"
#include "specmeas/stats.hpp"
#include "specmeas/suites.hpp"

using namespace specmeas;

TEST_CASE("haar_unitary is unitary with uniform phase at N=1") {
  RngStream rng(307);
  for (int s = 0; s < 10; ++s) {
    const int N = 2 + static_cast<int>(rng.next_u64() % 6);
    auto u = haar_unitary(rng, N);
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(N, N))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
  std::vector<double> phases(10000);
  for (double& p : phases) p = std::arg(haar_unitary(rng, 1)(0, 0));
  CHECK(ks_test(phases, suites::uniform_angle_cdf, "phase", 1e-3).pass);
}

TEST_CASE("haar_unitary left invariance") {
  RngStream rng(311);
  const auto v = haar_unitary(rng, 4);
  std::vector<double> plain, rotated;
  for (int s = 0; s < 1500; ++s) {
    const auto u1 = haar_unitary(rng, 4);
    const auto u2 = v * haar_unitary(rng, 4);
    plain.push_back(u1(1, 2).real());
    rotated.push_back(u2(1, 2).real());
  }
  CHECK(two_sample_ks(plain, rotated, "invariance", 1e-4).pass);
}

TEST_CASE("haar_unitary trace statistic is centered") {
  RngStream rng(313);
  Complex mean(0, 0);
  const int S = 2000;
  for (int s = 0; s < S; ++s) {
    auto mu = sample_cue_matrix_spectral(rng, 5);
    Complex tr(0, 0);
    for (double t : mu.angles()) tr += std::polar(1.0, t);
    mean += tr;
  }
  mean /= static_cast<double>(S);
  // E tr U = 0 and E |tr U|^2 = 1 under the Haar measure
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(S)));
}

TEST_CASE("haar_special_orthogonal lands in SO(2n)") {
  RngStream rng(317);
  for (int s = 0; s < 10; ++s) {
    auto g = haar_special_orthogonal(rng, 8);
    CHECK((g.transpose() * g - Eigen::MatrixXd::Identity(8, 8))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK(g.determinant() == Catch::Approx(1.0).margin(1e-8));
  }
  const auto v = haar_special_orthogonal(rng, 6);
  std::vector<double> plain, rotated;
  for (int s = 0; s < 1500; ++s) {
    plain.push_back(haar_special_orthogonal(rng, 6)(0, 1));
    rotated.push_back((v * haar_special_orthogonal(rng, 6))(0, 1));
  }
  CHECK(two_sample_ks(plain, rotated, "so_invariance", 1e-4).pass);
}

TEST_CASE("spectral_measure basics and cyclicity warning") {
  auto id1 = spectral_measure(Eigen::MatrixXcd::Identity(1, 1));
  REQUIRE(id1.measure.size() == 1);
  CHECK(id1.measure.angles()[0] == 0.0);
  CHECK(id1.measure.weights()[0] == Catch::Approx(1.0));

  Eigen::MatrixXcd d(2, 2);
  d << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
  auto r = spectral_measure(d);
  CHECK(r.cyclicity_warning);
  std::vector<double> w = r.measure.weights();
  std::sort(w.begin(), w.end());
  CHECK(w[0] == Catch::Approx(0.0).margin(1e-15));
  CHECK(w[1] == Catch::Approx(1.0).margin(1e-15));

  CHECK_THROWS_AS(spectral_measure(Eigen::MatrixXcd::Ones(3, 3)),
                  std::invalid_argument);
}

TEST_CASE("spectral measure moments match matrix powers") {
  RngStream rng(331);
  for (int s = 0; s < 10; ++s) {
    const int N = 6;
    auto u = haar_unitary(rng, N);
    auto mu = spectral_measure(u).measure;
    auto t = moments_circle(mu, N);
    Eigen::MatrixXcd pw = Eigen::MatrixXcd::Identity(N, N);
    for (int k = 1; k <= N; ++k) {
      pw = pw * u;
      CHECK(std::abs(t.entries[static_cast<std::size_t>(k - 1)] - pw(0, 0)) <
            1e-8);
    }
  }
}

TEST_CASE("dual_compose structure") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
  auto u = dual_compose(id);
  CHECK((u - Eigen::MatrixXcd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-14);

  RngStream rng(337);
  for (int s = 0; s < 15; ++s) {
    auto mu = sample_unif2_spectral(rng, 4);
    CHECK(is_symmetric(mu, 1e-8));
    CHECK(mu.size() == 4);  // Kramers pairs collapse 8 eigenvalues to 4 atoms
  }
}

TEST_CASE("unif2 canonical moments are uniform (small run)") {
  RngStream rng(347);
  auto reports = suites::suite_unif2(rng, 4, 1500, 1e-3);
  for (const auto& r : reports) CHECK(r.pass);
}
