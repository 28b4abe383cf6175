#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>

#include "specmeas/canonical_moments.hpp"
#include "specmeas/rng.hpp"
#include "specmeas/samplers.hpp"

using namespace specmeas;

namespace {

// Independent Hankel-determinant oracle for the extreme next moment: the
// extreme value makes the bordered Hankel form singular, which pins the
// corner entry at b^T A^{-1} b.
double hankel_corner(const Eigen::MatrixXd& full) {
  const int n = static_cast<int>(full.rows());
  const Eigen::MatrixXd a = full.topLeftCorner(n - 1, n - 1);
  const Eigen::VectorXd b = full.topRightCorner(n - 1, 1);
  return b.dot(a.ldlt().solve(b));
}

std::pair<double, double> hankel_extreme_oracle(const std::vector<double>& m) {
  const int j = static_cast<int>(m.size()) + 1;  // index of the new moment
  auto mom = [&](int k) -> double {
    if (k == 0) return 1.0;
    return m[static_cast<std::size_t>(k - 1)];
  };
  if (j == 1) return {0.0, 1.0};
  double lo, hi;
  if (j % 2 == 0) {
    // even: lower from H = (m_{a+b}), upper from (m_{a+b+1} - m_{a+b+2})
    const int k = j / 2;
    Eigen::MatrixXd h(k + 1, k + 1);
    for (int a = 0; a <= k; ++a)
      for (int b = 0; b <= k; ++b)
        h(a, b) = (a + b == j) ? 0.0 : mom(a + b);
    lo = hankel_corner(h);
    Eigen::MatrixXd g(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        g(a, b) = (a + b + 2 == j) ? 0.0 : mom(a + b + 1) - mom(a + b + 2);
    hi = mom(j - 1) - hankel_corner(g);
  } else {
    // odd: lower from (m_{a+b+1}), upper from (m_{a+b} - m_{a+b+1})
    const int k = (j - 1) / 2;
    Eigen::MatrixXd h(k + 1, k + 1);
    for (int a = 0; a <= k; ++a)
      for (int b = 0; b <= k; ++b)
        h(a, b) = (a + b + 1 == j) ? 0.0 : mom(a + b + 1);
    lo = hankel_corner(h);
    Eigen::MatrixXd g(k + 1, k + 1);
    for (int a = 0; a <= k; ++a)
      for (int b = 0; b <= k; ++b) {
        const double v = mom(a + b) - ((a + b + 1 == j) ? 0.0 : mom(a + b + 1));
        g(a, b) = v;
      }
    hi = mom(j - 1) - hankel_corner(g);
  }
  return {lo, hi};
}

MomentVectorI random_interior_moments(RngStream& rng, int n) {
  return sample_uniform_moments_interval(rng, n);
}

}  // namespace

TEST_CASE("extreme_moments basics") {
  auto [lo0, hi0] = extreme_moments(MomentVectorI{{}});
  CHECK(lo0 == Catch::Approx(0.0).margin(1e-15));
  CHECK(hi0 == Catch::Approx(1.0).margin(1e-15));

  auto [lo1, hi1] = extreme_moments(MomentVectorI{{0.5}});
  CHECK(lo1 == Catch::Approx(0.25).margin(1e-14));
  CHECK(hi1 == Catch::Approx(0.5).margin(1e-14));

  // confirmed against the Hankel oracle and the explicit 3-atom solution
  auto [lo2, hi2] = extreme_moments(MomentVectorI{{0.5, 0.375}});
  CHECK(lo2 == Catch::Approx(9.0 / 32.0).margin(1e-13));
  CHECK(hi2 == Catch::Approx(11.0 / 32.0).margin(1e-13));
  auto [olo, ohi] = hankel_extreme_oracle({0.5, 0.375});
  CHECK(olo == Catch::Approx(lo2).margin(1e-12));
  CHECK(ohi == Catch::Approx(hi2).margin(1e-12));
}

TEST_CASE("extreme_moments agrees with the Hankel oracle") {
  RngStream rng(61);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 7);
    auto m = random_interior_moments(rng, n);
    auto [lo, hi] = extreme_moments(m);
    auto [olo, ohi] = hankel_extreme_oracle(m.entries);
    CHECK(lo == Catch::Approx(olo).margin(1e-9));
    CHECK(hi == Catch::Approx(ohi).margin(1e-9));
    CHECK(lo < hi);
  }
  CHECK_THROWS_AS(extreme_moments(MomentVectorI{{0.5, 0.6}}),
                  MomentSpaceViolation);
}

TEST_CASE("canonical moments of simple vectors") {
  auto p1 = moments_to_canonical_real(MomentVectorI{{0.5}});
  REQUIRE(p1.interior.size() == 1);
  CHECK(p1.interior[0] == Catch::Approx(0.5).margin(1e-14));

  auto p2 = moments_to_canonical_real(MomentVectorI{{0.5, 0.375}});
  CHECK(p2.interior[0] == Catch::Approx(0.5).margin(1e-13));
  CHECK(p2.interior[1] == Catch::Approx(0.5).margin(1e-13));
}

TEST_CASE("canonical_to_moments_real reproduces the arcsine sequence") {
  // central binomial moments C(2k,k)/4^k
  RealCanonicalVector p{{0.5, 0.5, 0.5, 0.5}, {}};
  auto m = canonical_to_moments_real(p);
  CHECK(m.entries[0] == Catch::Approx(1.0 / 2.0).margin(1e-15));
  CHECK(m.entries[1] == Catch::Approx(3.0 / 8.0).margin(1e-15));
  CHECK(m.entries[2] == Catch::Approx(5.0 / 16.0).margin(1e-15));
  CHECK(m.entries[3] == Catch::Approx(35.0 / 128.0).margin(1e-15));

  // quadrature oracle: 64-point Gauss-Chebyshev for the arcsine law
  for (int k = 1; k <= 4; ++k) {
    double q = 0.0;
    const int M = 64;
    for (int i = 0; i < M; ++i) {
      const double theta = kPi * (i + 0.5) / M;
      q += std::pow((1.0 + std::cos(theta)) / 2.0, k) / M;
    }
    CHECK(m.entries[static_cast<std::size_t>(k - 1)] ==
          Catch::Approx(q).margin(1e-12));
  }

  auto m1 = canonical_to_moments_real(RealCanonicalVector{{}, 1.0});
  CHECK(m1.entries[0] == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("canonical moments of exact arcsine moments are all one half") {
  std::vector<double> m;
  double binom = 1.0;  // C(0,0)
  for (int k = 1; k <= 10; ++k) {
    binom *= (2.0 * k - 1.0) * 2.0 / k;  // C(2k,k) from C(2k-2,k-1)
    m.push_back(binom / std::pow(4.0, k));
  }
  auto p = moments_to_canonical_real(MomentVectorI{m});
  REQUIRE(p.interior.size() == 10);
  for (double v : p.interior) CHECK(v == Catch::Approx(0.5).margin(1e-10));
}

TEST_CASE("canonical bijection round trips") {
  RngStream rng(67);
  // moment side, up to n = 30
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 30);
    auto m = random_interior_moments(rng, n);
    auto m2 = canonical_to_moments_real(moments_to_canonical_real(m));
    for (std::size_t i = 0; i < m.entries.size(); ++i)
      CHECK(std::abs(m2.entries[i] - m.entries[i]) < 1e-10);
  }
  // canonical side: conditioning of the extraction is ~prod 1/p(1-p), so
  // keep n modest for the 1e-10 bar
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 8);
    RealCanonicalVector p;
    for (int j = 1; j <= n; ++j) {
      const double h = static_cast<double>(n - j + 1);
      p.interior.push_back(sample_beta(rng, h, h));
    }
    auto p2 = moments_to_canonical_real(canonical_to_moments_real(p));
    REQUIRE(p2.interior.size() == p.interior.size());
    for (std::size_t i = 0; i < p.interior.size(); ++i)
      CHECK(std::abs(p2.interior[i] - p.interior[i]) < 1e-10);
  }
}

TEST_CASE("boundary and violation classification") {
  // moments of a point mass terminate at the second coordinate
  CHECK_THROWS_AS(
      moments_to_canonical_real(MomentVectorI{{0.5, 0.25, 0.125}}), Degenerate);
  auto p = moments_to_canonical_real(MomentVectorI{{0.5, 0.25}});
  CHECK(p.terminal.has_value());
  CHECK(*p.terminal == 0.0);
  CHECK_THROWS_AS(moments_to_canonical_real(MomentVectorI{{0.5, 0.6}}),
                  MomentSpaceViolation);
}

TEST_CASE("reflection x -> 1-x flips odd canonical moments") {
  RngStream rng(71);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> pts(3), w(3);
    for (int i = 0; i < 3; ++i) pts[i] = rng.uniform(0.05, 0.95);
    std::sort(pts.begin(), pts.end());
    if (pts[1] - pts[0] < 5e-3 || pts[2] - pts[1] < 5e-3) continue;
    double sw = 0.0;
    for (int i = 0; i < 3; ++i) {
      w[i] = rng.uniform(0.1, 1.0);
      sw += w[i];
    }
    for (double& x : w) x /= sw;
    IntervalAtomicMeasure gamma(pts, w);
    std::vector<double> rp(3);
    for (int i = 0; i < 3; ++i) rp[i] = 1.0 - pts[i];
    IntervalAtomicMeasure reflected(rp, w);
    const int n = 5;
    auto p = moments_to_canonical_real(moments_interval(gamma, n));
    auto q = moments_to_canonical_real(moments_interval(reflected, n));
    for (int i = 0; i < n; ++i) {
      const double expect =
          (i % 2 == 0) ? 1.0 - p.interior[static_cast<std::size_t>(i)]
                       : p.interior[static_cast<std::size_t>(i)];
      worst = std::max(worst,
                       std::abs(q.interior[static_cast<std::size_t>(i)] - expect));
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("chebyshev_lift maps arcsine to uniform and delta_1 to ones") {
  auto t = chebyshev_lift(MomentVectorI{{0.5, 0.375}});
  CHECK(std::abs(t.entries[0]) < 1e-14);
  CHECK(std::abs(t.entries[1]) < 1e-14);

  auto t1 = chebyshev_lift(MomentVectorI{{1.0, 1.0, 1.0}});
  for (const Complex& z : t1.entries)
    CHECK(std::abs(z - Complex(1, 0)) < 1e-12);

  CHECK_THROWS_AS(chebyshev_lift(MomentVectorI{{0.5, 0.6}}),
                  MomentSpaceViolation);
}

TEST_CASE("chebyshev_lift satisfies the coefficient relation") {
  RngStream rng(73);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 8);
    auto m = random_interior_moments(rng, n);
    auto c = moments_to_verblunsky(chebyshev_lift(m));
    auto p = moments_to_canonical_real(m);
    REQUIRE(c.interior.size() == p.interior.size());
    for (std::size_t j = 0; j < p.interior.size(); ++j)
      CHECK(std::abs(c.interior[j] - Complex(2.0 * p.interior[j] - 1.0, 0.0)) <
            1e-9);
  }
}

TEST_CASE("recurrence_from_canonical produces the chain-sequence data") {
  RealCanonicalVector p{{0.5, 0.5, 0.5, 0.5}, {}};
  auto rc = recurrence_from_canonical(p);
  REQUIRE(rc.diag.size() == 3);
  CHECK(rc.diag[0] == Catch::Approx(0.5).margin(1e-15));
  CHECK(rc.diag[1] == Catch::Approx(0.5).margin(1e-15));
  CHECK(rc.offdiag[0] == Catch::Approx(std::sqrt(1.0 / 8.0)).margin(1e-15));
  CHECK(rc.offdiag[1] == Catch::Approx(0.25).margin(1e-15));

  // eigenvalue quadrature reproduces the moments
  RngStream rng(79);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 8);
    RealCanonicalVector q;
    for (int j = 0; j < n; ++j) q.interior.push_back(rng.uniform(0.05, 0.95));
    auto rc2 = recurrence_from_canonical(q);
    Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(rc2.diag.size()),
        static_cast<Eigen::Index>(rc2.diag.size()));
    for (std::size_t i = 0; i < rc2.diag.size(); ++i) {
      jm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = rc2.diag[i];
      if (i + 1 < rc2.diag.size()) {
        jm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) =
            rc2.offdiag[i];
        jm(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) =
            rc2.offdiag[i];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
    auto m = canonical_to_moments_real(q);
    for (int k = 1; k <= n; ++k) {
      double quad = 0.0;
      for (Eigen::Index e = 0; e < es.eigenvalues().size(); ++e)
        quad += es.eigenvectors()(0, e) * es.eigenvectors()(0, e) *
                std::pow(es.eigenvalues()[e], k);
      CHECK(quad == Catch::Approx(m.entries[static_cast<std::size_t>(k - 1)])
                        .margin(1e-9));
    }
  }
}

TEST_CASE("gauss_quadrature handles the four principal cases") {
  // odd/lower: interior atoms only
  auto g1 = gauss_quadrature(RealCanonicalVector{{0.5, 0.5, 0.5}, 0.0});
  REQUIRE(g1.size() == 2);
  const double s = std::sqrt(2.0);
  std::vector<double> pts = g1.points();
  std::sort(pts.begin(), pts.end());
  CHECK(pts[0] == Catch::Approx((2.0 - s) / 4.0).margin(1e-12));
  CHECK(pts[1] == Catch::Approx((2.0 + s) / 4.0).margin(1e-12));
  CHECK(g1.weights()[0] == Catch::Approx(0.5).margin(1e-12));

  // odd/upper: endpoints plus interior
  auto g2 = gauss_quadrature(RealCanonicalVector{{0.5}, 1.0});
  REQUIRE(g2.size() == 2);
  std::vector<double> pts2 = g2.points();
  std::sort(pts2.begin(), pts2.end());
  CHECK(pts2[0] == 0.0);
  CHECK(pts2[1] == 1.0);
  CHECK(g2.weights()[0] == Catch::Approx(0.5).margin(1e-12));

  // even/lower: atom at 0 plus interior
  auto g3 = gauss_quadrature(RealCanonicalVector{{0.5, 0.5}, 0.0});
  REQUIRE(g3.size() == 2);
  std::vector<std::pair<double, double>> atoms;
  for (std::size_t i = 0; i < 2; ++i)
    atoms.emplace_back(g3.points()[i], g3.weights()[i]);
  std::sort(atoms.begin(), atoms.end());
  CHECK(atoms[0].first == 0.0);
  CHECK(atoms[0].second == Catch::Approx(1.0 / 3.0).margin(1e-12));
  CHECK(atoms[1].first == Catch::Approx(0.75).margin(1e-12));
  CHECK(atoms[1].second == Catch::Approx(2.0 / 3.0).margin(1e-12));

  CHECK_THROWS_AS(gauss_quadrature(RealCanonicalVector{{0.5}, 0.3}),
                  std::invalid_argument);
}

TEST_CASE("principal representations reproduce moments and structure") {
  RngStream rng(83);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 9);
    auto m = random_interior_moments(rng, n);
    for (auto side : {RepresentationSide::Lower, RepresentationSide::Upper}) {
      auto nu = principal_representation(m, side);
      auto back = moments_interval(nu, n);
      for (int k = 0; k < n; ++k)
        CHECK(std::abs(back.entries[static_cast<std::size_t>(k)] -
                       m.entries[static_cast<std::size_t>(k)]) < 1e-10);

      int zero = 0, one = 0, interior = 0;
      for (double x : nu.points()) {
        if (x == 0.0)
          ++zero;
        else if (x == 1.0)
          ++one;
        else
          ++interior;
      }
      const bool odd = n % 2 == 1;
      const int N = (n + 1) / 2;
      if (odd && side == RepresentationSide::Lower) {
        CHECK(zero == 0);
        CHECK(one == 0);
        CHECK(interior == N);
      } else if (odd && side == RepresentationSide::Upper) {
        CHECK(zero == 1);
        CHECK(one == 1);
        CHECK(interior == N - 1);
      } else if (side == RepresentationSide::Lower) {
        CHECK(zero == 1);
        CHECK(one == 0);
        CHECK(interior == n / 2);
      } else {
        CHECK(zero == 0);
        CHECK(one == 1);
        CHECK(interior == n / 2);
      }
    }
  }
}
