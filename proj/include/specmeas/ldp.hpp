// Large-deviations laboratory: reversed Kullback divergence on quadrature
// grids, the variational rate for linear statistics, Monte Carlo tail
// estimation across N, and the Stieltjes/R-transform machinery behind the
// spherical-integral limit F_phi(1).
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "specmeas/errors.hpp"
#include "specmeas/measures.hpp"
#include "specmeas/samplers.hpp"

namespace specmeas {

// Bounded continuous test function, tabulated on a periodic angle grid.
// Interval-domain functions are composed with x(theta) = (1 + cos theta)/2,
// so grid means integrate against lambda_T resp. its pushforward, the
// arcsine law on [0,1] -- exactly the reference measures of the two LDPs.
class TestFunction {
 public:
  enum class Domain { Circle, Interval };

  TestFunction(Domain domain, std::function<double(double)> f,
               int grid_size = 4096)
      : domain_(domain), f_(std::move(f)), grid_(grid_size) {
    if (grid_size < 16) throw std::invalid_argument("grid too small");
    values_.resize(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) {
      const double theta = -kPi + kTwoPi * i / grid_size;
      values_[static_cast<std::size_t>(i)] = value_at_angle(theta);
    }
    fmin_ = *std::min_element(values_.begin(), values_.end());
    fmax_ = *std::max_element(values_.begin(), values_.end());
    double s = 0.0;
    for (double v : values_) s += v;
    mean_ = s / grid_size;
  }

  static TestFunction re_z(int grid = 4096) {
    return TestFunction(Domain::Circle, [](double t) { return std::cos(t); },
                        grid);
  }
  static TestFunction identity_x(int grid = 4096) {
    return TestFunction(Domain::Interval, [](double x) { return x; }, grid);
  }
  static TestFunction constant(double c, int grid = 4096) {
    return TestFunction(Domain::Circle, [c](double) { return c; }, grid);
  }

  Domain domain() const { return domain_; }
  int grid_size() const { return grid_; }
  double eval(double arg) const { return f_(arg); }
  double value_at_angle(double theta) const {
    return domain_ == Domain::Circle ? f_(theta)
                                     : f_((1.0 + std::cos(theta)) / 2.0);
  }
  const std::vector<double>& grid_values() const { return values_; }
  double fmin() const { return fmin_; }
  double fmax() const { return fmax_; }
  // lambda_T(f) resp. arcsine(f)
  double reference_mean() const { return mean_; }

  double integrate_measure(const CircleAtomicMeasure& mu) const {
    if (domain_ != Domain::Circle)
      throw std::invalid_argument("interval function on a circle measure");
    double s = 0.0;
    for (std::size_t j = 0; j < mu.size(); ++j)
      s += mu.weights()[j] * f_(mu.angles()[j]);
    return s;
  }
  double integrate_measure(const IntervalAtomicMeasure& gamma) const {
    if (domain_ != Domain::Interval)
      throw std::invalid_argument("circle function on an interval measure");
    double s = 0.0;
    for (std::size_t j = 0; j < gamma.size(); ++j)
      s += gamma.weights()[j] * f_(gamma.points()[j]);
    return s;
  }

 private:
  Domain domain_;
  std::function<double(double)> f_;
  int grid_;
  std::vector<double> values_;
  double fmin_ = 0.0, fmax_ = 0.0, mean_ = 0.0;
};

// Density tabulated on a quadrature grid: w.r.t. lambda_T on the circle
// (uniform weights) or Lebesgue on [0,1] (trapezoid weights).
struct GridDensity {
  enum class Domain { CircleT, UnitInterval };
  Domain domain = Domain::CircleT;
  std::vector<double> values;

  static GridDensity uniform_circle(int m) {
    return GridDensity{Domain::CircleT, std::vector<double>(m, 1.0)};
  }
};

namespace detail {

inline double grid_integral(const GridDensity& g,
                            const std::vector<double>& integrand) {
  const std::size_t m = g.values.size();
  if (g.domain == GridDensity::Domain::CircleT) {
    double s = 0.0;
    for (double v : integrand) s += v;
    return s / static_cast<double>(m);
  }
  // trapezoid on [0,1] with nodes i/(m-1)
  const double h = 1.0 / static_cast<double>(m - 1);
  double s = 0.5 * (integrand.front() + integrand.back());
  for (std::size_t i = 1; i + 1 < m; ++i) s += integrand[i];
  return s * h;
}

}  // namespace detail

// K(reference | mu) = int log(d reference / d mu) d reference, evaluated by
// quadrature. Returns the +infinity sentinel when mu vanishes somewhere the
// reference does not (absolute-continuity failure).
inline double reversed_kullback(const GridDensity& reference,
                                const GridDensity& mu) {
  if (reference.domain != mu.domain ||
      reference.values.size() != mu.values.size())
    throw GridMismatch("densities live on different grids");
  for (double v : reference.values)
    if (!(v >= 0.0)) throw std::invalid_argument("negative reference density");
  for (double v : mu.values)
    if (!(v >= 0.0)) throw std::invalid_argument("negative density");
  const double mass = detail::grid_integral(reference, reference.values);
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument("reference must integrate to 1 within 1e-8");

  std::vector<double> integrand(reference.values.size(), 0.0);
  for (std::size_t i = 0; i < reference.values.size(); ++i) {
    const double r = reference.values[i];
    if (r == 0.0) continue;
    if (mu.values[i] <= 0.0) return std::numeric_limits<double>::infinity();
    integrand[i] = r * std::log(r / mu.values[i]);
  }
  return detail::grid_integral(reference, integrand);
}

// Contracted rate J(x) = int log(a f + b) d lambda for the unique (a, b)
// with int 1/(a f + b) = 1 and int f/(a f + b) = x, a f + b > 0; the return
// value is (beta/2) J(x). Solved by a damped two-dimensional Newton
// iteration.
inline double rate_linear_statistic(const TestFunction& f, double x,
                                    double beta) {
  const auto& v = f.grid_values();
  const double m = static_cast<double>(v.size());
  if (!(x > f.fmin() && x < f.fmax()))
    throw OutOfRange("x outside the essential range of f");
  if (x == f.reference_mean()) return 0.0;

  double a = 0.0, b = 1.0;
  auto residual = [&](double aa, double bb, double& r0, double& r1) {
    r0 = -1.0;
    r1 = -x;
    for (double fi : v) {
      const double den = aa * fi + bb;
      r0 += 1.0 / den / m;
      r1 += fi / den / m;
    }
  };
  auto min_den = [&](double aa, double bb) {
    double lo = std::numeric_limits<double>::max();
    for (double fi : v) lo = std::min(lo, aa * fi + bb);
    return lo;
  };

  double r0, r1;
  residual(a, b, r0, r1);
  double err = std::max(std::abs(r0), std::abs(r1));
  for (int iter = 0; iter < 500; ++iter) {
    if (err < 1e-10) {
      double j = 0.0;
      for (double fi : v) j += std::log(a * fi + b);
      return 0.5 * beta * j / m;
    }
    // Jacobian of the two constraint integrals.
    double j00 = 0.0, j01 = 0.0, j11 = 0.0;
    for (double fi : v) {
      const double den = a * fi + b;
      const double w = 1.0 / (den * den) / m;
      j00 -= fi * w;        // d r0 / d a
      j01 -= w;             // d r0 / d b
      j11 -= fi * fi * w;   // d r1 / d a
    }
    const double j10 = j11, j11b = j00;  // d r1 / da, d r1 / db
    const double det = j00 * j11b - j01 * j10;
    if (std::abs(det) < 1e-300) throw NewtonDivergence("singular Jacobian");
    const double da = (-r0 * j11b + r1 * j01) / det;
    const double db = (-r1 * j00 + r0 * j10) / det;
    double t = 1.0;
    for (int back = 0; back < 60; ++back, t *= 0.5) {
      const double an = a + t * da, bn = b + t * db;
      if (min_den(an, bn) <= 0.0) continue;
      double n0, n1;
      residual(an, bn, n0, n1);
      const double nerr = std::max(std::abs(n0), std::abs(n1));
      if (nerr < err || nerr < 1e-12) {
        a = an;
        b = bn;
        r0 = n0;
        r1 = n1;
        err = nerr;
        break;
      }
      if (back == 59) throw NewtonDivergence("line search failed");
    }
  }
  throw NewtonDivergence("rate solver did not converge in 500 iterations");
}

struct RatePoint {
  int N = 0;
  long long samples = 0;
  long long hits = 0;
  double p_hat = 0.0;
  double log_prob = 0.0;   // log p_hat
  double rate = 0.0;       // -(1/N) log p_hat
  double ci_low = 0.0;     // rate CI from substream batching
  double ci_high = 0.0;
  bool dropped = false;    // no exceedances: excluded from the fit
};

struct RateEstimate {
  std::vector<RatePoint> points;
  double fitted_rate = 0.0;  // intercept of the affine fit in 1/N
  double fitted_se = 0.0;
  double theory_rate = 0.0;  // rate_linear_statistic at the same (f, x, beta)
};

namespace detail {

inline int thread_budget() {
  if (const char* env = std::getenv("SPECMEAS_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) return t;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp<unsigned>(hc, 1u, 8u));
}

inline double measure_statistic(RngStream& rng, const EnsembleSpec& spec,
                                const TestFunction& f) {
  switch (spec.family) {
    case EnsembleFamily::CBetaE:
      return f.integrate_measure(
          sample_cbe_spectral(rng, spec.N, spec.beta).measure);
    case EnsembleFamily::SUN:
      return f.integrate_measure(sample_sun_spectral(rng, spec.N).measure);
    case EnsembleFamily::SO2N:
      return f.integrate_measure(sample_so2n_spectral(rng, spec.N).measure);
    case EnsembleFamily::Jtilde:
      return f.integrate_measure(
          sample_jtilde_spectral(rng, spec.N, spec.beta, spec.a, spec.b)
              .measure);
    case EnsembleFamily::Jacobi:
      return f.integrate_measure(
          sample_jacobi_gamma(rng, spec.N, spec.beta, spec.a, spec.b));
    case EnsembleFamily::Bizth:
      return f.integrate_measure(sample_bizth(rng, spec.bizth_case, spec.N));
    default:
      throw std::invalid_argument("ensemble has no measure-level sampler");
  }
}

}  // namespace detail

// Tail estimator: for each N, estimate -(1/N) log P(mu(f) >= x) with 20
// independent-substream batches, then fit rate ~ A + B/N by least squares.
// The intercept A is the reported rate. N values with zero exceedances are
// reported but dropped from the fit.
inline RateEstimate mc_tail(const RngStream& rng, EnsembleSpec spec,
                            const TestFunction& f, double x,
                            const std::vector<int>& N_list,
                            long long samples_per_N) {
  constexpr int kBatches = 20;
  RateEstimate est;
  est.theory_rate = rate_linear_statistic(f, x, spec.beta);

  const int threads = detail::thread_budget();
  for (std::size_t ni = 0; ni < N_list.size(); ++ni) {
    const int N = N_list[ni];
    spec.N = N;
    const long long per_batch = std::max<long long>(1, samples_per_N / kBatches);
    std::vector<long long> batch_hits(kBatches, 0);

    auto run_batch = [&](int b) {
      RngStream sub = rng.substream(1000003ull * (ni + 1) + b);
      long long h = 0;
      for (long long s = 0; s < per_batch; ++s)
        if (detail::measure_statistic(sub, spec, f) >= x) ++h;
      batch_hits[static_cast<std::size_t>(b)] = h;
    };
    if (threads > 1) {
      std::vector<std::thread> pool;
      std::atomic<int> next{0};
      for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
          for (;;) {
            const int b = next.fetch_add(1);
            if (b >= kBatches) return;
            run_batch(b);
          }
        });
      for (auto& th : pool) th.join();
    } else {
      for (int b = 0; b < kBatches; ++b) run_batch(b);
    }

    RatePoint pt;
    pt.N = N;
    pt.samples = per_batch * kBatches;
    for (long long h : batch_hits) pt.hits += h;
    pt.p_hat = static_cast<double>(pt.hits) / static_cast<double>(pt.samples);
    if (pt.hits == 0) {
      pt.dropped = true;
      est.points.push_back(pt);
      continue;
    }
    pt.log_prob = std::log(pt.p_hat);
    pt.rate = -pt.log_prob / N;

    // t-interval on the batch means of p, mapped through -log(p)/N.
    double mean = 0.0;
    for (long long h : batch_hits)
      mean += static_cast<double>(h) / static_cast<double>(per_batch);
    mean /= kBatches;
    double var = 0.0;
    for (long long h : batch_hits) {
      const double d = static_cast<double>(h) / static_cast<double>(per_batch) - mean;
      var += d * d;
    }
    var /= (kBatches - 1);
    const double se = std::sqrt(var / kBatches);
    const double t975 = 2.093;  // t quantile, 19 dof
    const double p_lo = mean - t975 * se;
    const double p_hi = mean + t975 * se;
    pt.ci_low = -std::log(std::min(p_hi, 1.0)) / N;
    pt.ci_high = (p_lo > 0.0) ? -std::log(p_lo) / N
                              : std::numeric_limits<double>::infinity();
    est.points.push_back(pt);
  }

  // Affine fit rate ~ A + B * (1/N) over the surviving points.
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (const RatePoint& pt : est.points) {
    if (pt.dropped) continue;
    const double u = 1.0 / pt.N;
    sw += 1.0;
    sx += u;
    sy += pt.rate;
    sxx += u * u;
    sxy += u * pt.rate;
    ++used;
  }
  if (used >= 2) {
    const double det = sw * sxx - sx * sx;
    est.fitted_rate = (sxx * sy - sx * sxy) / det;
    const double slope = (sw * sxy - sx * sy) / det;
    double rss = 0.0;
    for (const RatePoint& pt : est.points) {
      if (pt.dropped) continue;
      const double r = pt.rate - (est.fitted_rate + slope / pt.N);
      rss += r * r;
    }
    const double sigma2 = (used > 2) ? rss / (used - 2) : 0.0;
    est.fitted_se = std::sqrt(sigma2 * sxx / det);
  } else if (used == 1) {
    for (const RatePoint& pt : est.points)
      if (!pt.dropped) est.fitted_rate = pt.rate;
  }
  return est;
}

// H_phi(x) = int 1/(x - phi) d lambda_T by grid quadrature; x must lie
// outside the essential range.
inline double stieltjes_transform(const TestFunction& f, double x) {
  if (x >= f.fmin() && x <= f.fmax())
    throw InsideSpectrum("x inside the essential range of phi");
  double s = 0.0;
  for (double v : f.grid_values()) s += 1.0 / (x - v);
  return s / static_cast<double>(f.grid_values().size());
}

// One-sided limits of H at the endpoints of the range, grid-resolution
// limited: a geometric ladder detects divergence (reported as +-infinity).
struct StieltjesLimits {
  double at_max = std::numeric_limits<double>::infinity();   // lim x -> max+
  double at_min = -std::numeric_limits<double>::infinity();  // lim x -> min-
};

inline StieltjesLimits stieltjes_limits(const TestFunction& f) {
  StieltjesLimits lim;
  double prev = 0.0;
  bool diverged = true;
  for (int k = 2; k <= 7; ++k) {
    const double h = stieltjes_transform(f, f.fmax() + std::pow(10.0, -k));
    if (k > 2 && h < prev * 1.5) {
      diverged = false;
      lim.at_max = h;
    }
    prev = h;
    if (h > 1e8) break;
  }
  if (diverged) lim.at_max = std::numeric_limits<double>::infinity();
  prev = 0.0;
  diverged = true;
  for (int k = 2; k <= 7; ++k) {
    const double h = stieltjes_transform(f, f.fmin() - std::pow(10.0, -k));
    if (k > 2 && h > prev * 1.5) {
      diverged = false;
      lim.at_min = h;
    }
    prev = h;
    if (h < -1e8) break;
  }
  if (diverged) lim.at_min = -std::numeric_limits<double>::infinity();
  return lim;
}

// Solve H(R + 1/y) = y for R by bracketing plus Newton polish.
inline double r_transform(const TestFunction& f, double y) {
  if (y == 0.0) throw OutOfRange("y = 0 is outside the range of H");
  const StieltjesLimits lim = stieltjes_limits(f);
  if (y > 0.0 && y >= lim.at_max)
    throw OutOfRange("y above the attainable range of H");
  if (y < 0.0 && y <= lim.at_min)
    throw OutOfRange("y below the attainable range of H");

  // H is strictly decreasing on each side of the range and tends to 0 at
  // infinity; bracket the solution of H(x) = y and bisect.
  double a, b;  // H(a) - y and H(b) - y have opposite signs
  if (y > 0.0) {
    a = f.fmax() + 1e-12;
    b = f.fmax() + 1.0;
    while (stieltjes_transform(f, b) > y) b = f.fmax() + 2.0 * (b - f.fmax());
  } else {
    b = f.fmin() - 1e-12;
    a = f.fmin() - 1.0;
    while (stieltjes_transform(f, a) < y) a = f.fmin() - 2.0 * (f.fmin() - a);
  }
  // H is decreasing on both sides, so the bracket rule is uniform.
  for (int iter = 0; iter < 120; ++iter) {
    const double mid = 0.5 * (a + b);
    if (stieltjes_transform(f, mid) > y)
      a = mid;
    else
      b = mid;
  }
  double xx = 0.5 * (a + b);
  for (int iter = 0; iter < 50; ++iter) {
    const double h = stieltjes_transform(f, xx) - y;
    if (std::abs(h) < 1e-12) break;
    double dh = 0.0;
    for (double v : f.grid_values()) dh -= 1.0 / ((xx - v) * (xx - v));
    dh /= static_cast<double>(f.grid_values().size());
    const double step = h / dh;
    const double next = xx - step;
    if (y > 0.0 && next <= f.fmax()) break;
    if (y < 0.0 && next >= f.fmin()) break;
    xx = next;
  }
  if (std::abs(stieltjes_transform(f, xx) - y) > 1e-10)
    throw NewtonDivergence("R-transform solve missed the residual target");
  return xx - 1.0 / y;
}

// F_phi(1) = v(1) - int log(1 + v(1) - phi) d lambda_T with the standard
// case analysis on v(1).
inline double spherical_limit(const TestFunction& f) {
  const StieltjesLimits lim = stieltjes_limits(f);
  double v1;
  if (1.0 > lim.at_max)
    v1 = f.fmax() - 1.0;
  else if (1.0 < lim.at_min)
    v1 = f.fmin() - 1.0;
  else
    v1 = r_transform(f, 1.0);
  double integral = 0.0;
  std::size_t counted = 0;
  for (double v : f.grid_values()) {
    const double arg = 1.0 + v1 - v;
    if (arg < 1e-300) continue;  // grid-limited log singularity at the max
    integral += std::log(arg);
    ++counted;
  }
  integral /= static_cast<double>(counted);
  return v1 - integral;
}

}  // namespace specmeas
