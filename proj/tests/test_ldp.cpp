#include <catch2/catch_amalgamated.hpp>

#include "specmeas/ldp.hpp"

using namespace specmeas;

namespace {

// Primal oracle: minimize -int log m dlambda over densities on the grid with
// int m = 1 and int f m = x, by projected gradient with backtracking. The
// Euclidean projection onto the two affine constraints has a closed form.
double primal_rate_oracle(const TestFunction& f, double x, double beta,
                          int grid = 2048) {
  std::vector<double> fv(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i)
    fv[static_cast<std::size_t>(i)] = f.value_at_angle(-kPi + kTwoPi * i / grid);
  const double n = static_cast<double>(grid);

  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s / n;
  };
  const std::vector<double> ones(static_cast<std::size_t>(grid), 1.0);
  const double ff = dot(fv, fv), f1 = dot(fv, ones);

  auto project = [&](std::vector<double>& m) {
    // enforce <m,1> = 1 and <m,f> = x by solving the 2x2 Gram system
    const double c1 = dot(m, ones) - 1.0;
    const double c2 = dot(m, fv) - x;
    const double det = 1.0 * ff - f1 * f1;
    const double l1 = (ff * c1 - f1 * c2) / det;
    const double l2 = (1.0 * c2 - f1 * c1) / det;
    for (std::size_t i = 0; i < m.size(); ++i) m[i] -= l1 + l2 * fv[i];
  };

  std::vector<double> m(static_cast<std::size_t>(grid), 1.0);
  project(m);
  for (double& v : m) v = std::max(v, 1e-6);
  project(m);

  auto value = [&](const std::vector<double>& mm) {
    double s = 0.0;
    for (double v : mm) s += -std::log(v);
    return s / n;
  };

  double fv_cur = value(m);
  double step = 0.25;
  std::vector<double> g(m.size()), trial(m.size());
  for (int iter = 0; iter < 50000; ++iter) {
    for (std::size_t i = 0; i < m.size(); ++i) g[i] = -1.0 / m[i];
    // project the gradient onto the constraint tangent space
    const double c1 = dot(g, ones), c2 = dot(g, fv);
    const double det = ff - f1 * f1;
    const double l1 = (ff * c1 - f1 * c2) / det;
    const double l2 = (c2 - f1 * c1) / det;
    double gnorm = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] -= l1 + l2 * fv[i];
      gnorm += g[i] * g[i] / n;
    }
    if (std::sqrt(gnorm) < 1e-12) break;
    bool moved = false;
    for (int back = 0; back < 60; ++back, step *= 0.5) {
      bool positive = true;
      for (std::size_t i = 0; i < m.size(); ++i) {
        trial[i] = m[i] - step * g[i];
        if (trial[i] <= 0.0) {
          positive = false;
          break;
        }
      }
      if (!positive) continue;
      const double tv = value(trial);
      if (tv < fv_cur - 1e-16) {
        m.swap(trial);
        fv_cur = tv;
        moved = true;
        step *= 2.0;
        break;
      }
    }
    if (!moved) break;
  }
  return 0.5 * beta * fv_cur;
}

}  // namespace

TEST_CASE("reversed_kullback on reference examples") {
  GridDensity ref = GridDensity::uniform_circle(4096);
  CHECK(reversed_kullback(ref, ref) == 0.0);

  GridDensity half{GridDensity::Domain::CircleT, std::vector<double>(4096, 0.0)};
  for (int i = 0; i < 2048; ++i) half.values[static_cast<std::size_t>(i)] = 2.0;
  CHECK(std::isinf(reversed_kullback(ref, half)));

  GridDensity cosd{GridDensity::Domain::CircleT, std::vector<double>(4096)};
  for (int i = 0; i < 4096; ++i)
    cosd.values[static_cast<std::size_t>(i)] =
        1.0 + 0.5 * std::cos(-kPi + kTwoPi * i / 4096.0);
  const double got = reversed_kullback(ref, cosd);

  // high-resolution quadrature oracle
  const int M = 1000000;
  double oracle = 0.0;
  for (int i = 0; i < M; ++i)
    oracle -= std::log(1.0 + 0.5 * std::cos(-kPi + kTwoPi * i / M)) / M;
  CHECK(got == Catch::Approx(oracle).margin(1e-8));

  GridDensity bad{GridDensity::Domain::CircleT, std::vector<double>(100, 1.0)};
  CHECK_THROWS_AS(reversed_kullback(ref, bad), GridMismatch);
}

TEST_CASE("rate_linear_statistic vanishes at the mean and matches closed form") {
  TestFunction f = TestFunction::re_z();
  CHECK(rate_linear_statistic(f, 0.0, 2.0) == 0.0);

  // closed form for f = cos: J(x) = log((cosh t + 1)/2), x = tanh(t/2)
  for (double x : {0.2, 0.4, 0.6}) {
    const double t = 2.0 * std::atanh(x);
    const double expect = std::log((std::cosh(t) + 1.0) / 2.0);
    CHECK(rate_linear_statistic(f, x, 2.0) ==
          Catch::Approx(expect).margin(1e-10));
  }
  CHECK_THROWS_AS(rate_linear_statistic(f, 1.2, 2.0), OutOfRange);
}

TEST_CASE("rate solver agrees with the primal optimization oracle") {
  TestFunction f = TestFunction::re_z(2048);
  const double ours = rate_linear_statistic(f, 0.4, 2.0);
  const double oracle = primal_rate_oracle(f, 0.4, 2.0);
  CHECK(ours == Catch::Approx(oracle).margin(1e-4));
}

TEST_CASE("rate is increasing and convex on the upper tail") {
  TestFunction f = TestFunction::re_z();
  std::vector<double> xs{0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65};
  std::vector<double> js;
  for (double x : xs) js.push_back(rate_linear_statistic(f, x, 2.0));
  for (std::size_t i = 1; i < js.size(); ++i) CHECK(js[i] > js[i - 1]);
  for (std::size_t i = 2; i < js.size(); ++i)
    CHECK(js[i] - 2 * js[i - 1] + js[i - 2] > -1e-12);
}

TEST_CASE("duality: the dual family is maximized at the primal value") {
  TestFunction f = TestFunction::re_z(2048);
  const double x = 0.4;
  const double j = rate_linear_statistic(f, x, 2.0);

  // Recover the tilt parameters (a, b) of the minimizer density
  // m* = 1/(a f + b) by Newton on the two constraint integrals.
  const auto& v = f.grid_values();
  const double n = static_cast<double>(v.size());
  double a = 0.0, b = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    double r0 = -1.0, r1 = -x, j00 = 0, j01 = 0, j10 = 0;
    for (double fi : v) {
      const double den = a * fi + b;
      r0 += 1.0 / den / n;
      r1 += fi / den / n;
      const double w = 1.0 / (den * den) / n;
      j00 -= fi * w;       // dr0/da = dr1/db
      j01 -= w;            // dr0/db
      j10 -= fi * fi * w;  // dr1/da
    }
    if (std::abs(r0) + std::abs(r1) < 1e-13) break;
    const double det = j00 * j00 - j01 * j10;
    a += (-r0 * j00 + r1 * j01) / det;
    b += (-r1 * j00 + r0 * j10) / det;
  }

  // Evaluate the dual objective over the one-parameter family
  // g_s = s (1 - (a f + b)) against the tilted measure m* dlambda.
  auto dual = [&](double s) {
    double acc = 0.0;
    for (double fi : v) {
      const double den = a * fi + b;
      const double g = s * (1.0 - den);
      acc += g / den + std::log(1.0 - g);
    }
    return acc / n;
  };
  const double at_one = dual(1.0);
  CHECK(at_one == Catch::Approx(j).margin(1e-8));
  for (double s : {0.9, 0.95, 1.05, 1.1})
    CHECK(dual(s) <= at_one + 1e-12);
}

TEST_CASE("stieltjes transform closed forms") {
  TestFunction c = TestFunction::constant(0.7);
  CHECK(stieltjes_transform(c, 2.0) == Catch::Approx(1.0 / 1.3).margin(1e-12));
  CHECK_THROWS_AS(stieltjes_transform(c, 0.7), InsideSpectrum);

  TestFunction f = TestFunction::re_z();
  CHECK(stieltjes_transform(f, 2.0) ==
        Catch::Approx(1.0 / std::sqrt(3.0)).margin(1e-12));
  double prev = stieltjes_transform(f, 1.05);
  for (double x = 1.15; x < 4.0; x += 0.1) {
    const double h = stieltjes_transform(f, x);
    CHECK(h < prev);
    prev = h;
  }
}

TEST_CASE("r_transform inverts the stieltjes transform") {
  TestFunction c = TestFunction::constant(0.7);
  for (double y : {-0.7, 0.5, 2.0})
    CHECK(r_transform(c, y) == Catch::Approx(0.7).margin(1e-9));

  TestFunction f = TestFunction::re_z();
  for (double y : {0.4, 1.0, 2.5}) {
    const double expect = std::sqrt(1.0 + 1.0 / (y * y)) - 1.0 / y;
    CHECK(r_transform(f, y) == Catch::Approx(expect).margin(1e-9));
    CHECK(stieltjes_transform(f, r_transform(f, y) + 1.0 / y) ==
          Catch::Approx(y).margin(1e-9));
  }
}

TEST_CASE("spherical limit cases and shift covariance") {
  CHECK(spherical_limit(TestFunction::constant(0.0)) ==
        Catch::Approx(0.0).margin(1e-10));
  CHECK(spherical_limit(TestFunction::constant(0.8)) ==
        Catch::Approx(0.8).margin(1e-10));

  TestFunction f = TestFunction::re_z();
  const double v1 = std::sqrt(2.0) - 1.0;
  const double closed = v1 - std::log((std::sqrt(2.0) + 1.0) / 2.0);
  CHECK(spherical_limit(f) == Catch::Approx(closed).margin(1e-9));

  TestFunction shifted(TestFunction::Domain::Circle,
                       [](double t) { return std::cos(t) + 0.3; });
  CHECK(spherical_limit(shifted) ==
        Catch::Approx(spherical_limit(f) + 0.3).margin(1e-9));
}

TEST_CASE("mc_tail below the LLN value extrapolates to a zero rate") {
  RngStream rng(353);
  EnsembleSpec spec;
  spec.family = EnsembleFamily::CBetaE;
  spec.beta = 2.0;
  TestFunction f = TestFunction::re_z();
  auto est = mc_tail(rng, spec, f, -0.5, {6, 9, 12}, 4000);
  for (const auto& pt : est.points) {
    REQUIRE_FALSE(pt.dropped);
    CHECK(pt.rate >= 0.0);
    CHECK(pt.rate < 0.06);  // -log P(mu(f) >= x)/N for P near 1
  }
  // the N -> infinity extrapolation is indistinguishable from zero
  CHECK(std::abs(est.fitted_rate) < std::max(0.02, 3.0 * est.fitted_se));
}

TEST_CASE("mc_tail rate scales linearly in the Dirichlet weight parameter") {
  RngStream rng(359);
  EnsembleSpec spec;
  spec.family = EnsembleFamily::CBetaE;
  TestFunction f = TestFunction::re_z();
  spec.beta = 2.0;
  auto est2 = mc_tail(rng.substream(1), spec, f, 0.3, {6, 10}, 30000);
  spec.beta = 4.0;
  auto est4 = mc_tail(rng.substream(2), spec, f, 0.3, {6, 10}, 30000);
  CHECK(est4.theory_rate == Catch::Approx(2.0 * est2.theory_rate).margin(1e-12));
  const double ratio = est4.fitted_rate / est2.fitted_rate;
  CHECK(ratio > 2.0 * 0.7);
  CHECK(ratio < 2.0 * 1.3);
}

TEST_CASE("mc_tail on the Jacobi ensemble with the arcsine reference") {
  RngStream rng(367);
  EnsembleSpec spec;
  spec.family = EnsembleFamily::Jacobi;
  spec.beta = 2.0;
  spec.a = 0.5;
  spec.b = 0.5;
  TestFunction f = TestFunction::identity_x();
  CHECK(f.reference_mean() == Catch::Approx(0.5).margin(1e-12));
  auto est = mc_tail(rng, spec, f, 0.65, {6, 10, 14}, 20000);
  CHECK(est.theory_rate > 0.0);
  CHECK(est.fitted_rate > 0.0);
  CHECK(est.fitted_rate / est.theory_rate > 0.5);
  CHECK(est.fitted_rate / est.theory_rate < 2.0);
}

TEST_CASE("test functions report bracketing extrema") {
  TestFunction f(TestFunction::Domain::Circle,
                 [](double t) { return std::sin(2 * t) + 0.2 * std::cos(t); });
  for (double v : f.grid_values()) {
    CHECK(v >= f.fmin());
    CHECK(v <= f.fmax());
  }
}
