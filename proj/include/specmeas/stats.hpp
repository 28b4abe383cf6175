// Statistical plumbing for the verification suites: regularized incomplete
// beta/gamma, Kolmogorov-Smirnov (one- and two-sample), a 2-D chi-square
// goodness-of-fit, and Spearman rank correlation.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "specmeas/errors.hpp"

namespace specmeas {

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t sample_size = 0;
  double alpha = 1e-3;
  bool pass = true;
};

inline TestReport make_report(std::string name, double stat, double p,
                              std::size_t n, double alpha) {
  TestReport r;
  r.name = std::move(name);
  r.statistic = stat;
  r.p_value = p;
  r.sample_size = n;
  r.alpha = alpha;
  r.pass = p > alpha;
  return r;
}

namespace detail {

inline double ln_gamma(double x) { return std::lgamma(x); }

// Continued fraction for the incomplete beta (Lentz), as in the classical
// special-function literature.
inline double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

// I_x(a, b), absolute error well under 1e-12 on (0,1).
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lbeta = detail::ln_gamma(a + b) - detail::ln_gamma(a) -
                       detail::ln_gamma(b) + a * std::log(x) +
                       b * std::log1p(-x);
  const double front = std::exp(lbeta);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::betacf(a, b, x) / a;
  return 1.0 - front * detail::betacf(b, a, 1.0 - x) / b;
}

// Regularized lower incomplete gamma P(a, x); Q(a, x) = 1 - P(a, x).
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("a must be > 0");
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) {
    // series
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 1000; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - detail::ln_gamma(a));
  }
  // continued fraction for Q
  constexpr double kFpMin = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / kFpMin, d = 1.0 / b, h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - detail::ln_gamma(a)) * h;
  return 1.0 - q;
}

inline double regularized_gamma_q(double a, double x) {
  return 1.0 - regularized_gamma_p(a, x);
}

// Gamma(shape, 1) CDF.
inline double gamma_cdf(double shape, double x) {
  return regularized_gamma_p(shape, x);
}

inline double beta_cdf(double a, double b, double x) {
  return regularized_incomplete_beta(a, b, x);
}

namespace detail {

// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1}
// exp(-2 k^2 lambda^2), truncated once terms drop below 1e-12.
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline double ks_pvalue(double d, double n_eff) {
  const double sq = std::sqrt(n_eff);
  return kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
}

}  // namespace detail

// One-sample KS against a CDF.
inline TestReport ks_test(std::vector<double> samples,
                          const std::function<double(double)>& cdf,
                          const std::string& name = "ks",
                          double alpha = 1e-3) {
  if (samples.size() < 100)
    throw std::invalid_argument("ks_test needs at least 100 samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  return make_report(name, d, detail::ks_pvalue(d, n), samples.size(), alpha);
}

inline TestReport two_sample_ks(std::vector<double> a, std::vector<double> b,
                                const std::string& name = "ks2",
                                double alpha = 1e-3) {
  if (a.size() < 100 || b.size() < 100)
    throw std::invalid_argument("two_sample_ks needs at least 100 samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double n_eff = na * nb / (na + nb);
  return make_report(name, d, detail::ks_pvalue(d, n_eff),
                     a.size() + b.size(), alpha);
}

// Chi-square test of 2-D samples against a target density, with explicit
// cell edges (use quantile-based edges for concentrated densities). Cell
// probabilities are computed with a per-cell Gauss-Legendre rule and
// renormalized; expected counts below 5 raise BinUnderflow.
inline TestReport chi2_2d(const std::vector<std::pair<double, double>>& samples,
                          const std::function<double(double, double)>& density,
                          const std::vector<double>& x_edges,
                          const std::vector<double>& y_edges,
                          const std::string& name = "chi2_2d",
                          double alpha = 1e-3) {
  if (x_edges.size() < 3 || y_edges.size() < 3)
    throw std::invalid_argument("need at least 2 bins per axis");
  const std::size_t bx = x_edges.size() - 1;
  const std::size_t by = y_edges.size() - 1;

  // 4-point Gauss-Legendre nodes on [0,1].
  static const double gl_x[4] = {0.06943184420297371, 0.33000947820757187,
                                 0.66999052179242813, 0.93056815579702629};
  static const double gl_w[4] = {0.17392742256872693, 0.32607257743127307,
                                 0.32607257743127307, 0.17392742256872693};

  std::vector<double> prob(bx * by, 0.0);
  double total = 0.0;
  for (std::size_t ix = 0; ix < bx; ++ix) {
    const double hx = x_edges[ix + 1] - x_edges[ix];
    for (std::size_t iy = 0; iy < by; ++iy) {
      const double hy = y_edges[iy + 1] - y_edges[iy];
      double cell = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          cell += gl_w[a] * gl_w[b] * density(x_edges[ix] + gl_x[a] * hx,
                                              y_edges[iy] + gl_x[b] * hy);
      cell *= hx * hy;
      prob[ix * by + iy] = cell;
      total += cell;
    }
  }
  for (double& p : prob) p /= total;

  auto locate = [](const std::vector<double>& edges, double v) -> int {
    if (v < edges.front() || v >= edges.back()) return -1;
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return static_cast<int>(it - edges.begin()) - 1;
  };

  std::vector<double> count(prob.size(), 0.0);
  std::size_t in_range = 0;
  for (const auto& [x, y] : samples) {
    const int ix = locate(x_edges, x);
    const int iy = locate(y_edges, y);
    if (ix < 0 || iy < 0) continue;
    count[static_cast<std::size_t>(ix) * by + static_cast<std::size_t>(iy)] += 1.0;
    ++in_range;
  }

  double stat = 0.0;
  for (std::size_t c = 0; c < prob.size(); ++c) {
    const double expected = prob[c] * static_cast<double>(in_range);
    if (expected < 5.0)
      throw BinUnderflow("expected count per bin must be >= 5");
    const double diff = count[c] - expected;
    stat += diff * diff / expected;
  }
  const double dof = static_cast<double>(prob.size()) - 1.0;
  const double p = regularized_gamma_q(dof / 2.0, stat / 2.0);
  return make_report(name, stat, p, samples.size(), alpha);
}

// Uniform-bin convenience overload on a rectangle.
inline TestReport chi2_2d(const std::vector<std::pair<double, double>>& samples,
                          const std::function<double(double, double)>& density,
                          int bins, double x0, double x1, double y0, double y1,
                          const std::string& name = "chi2_2d",
                          double alpha = 1e-3) {
  if (bins < 2) throw std::invalid_argument("bins must be >= 2");
  std::vector<double> xe(static_cast<std::size_t>(bins) + 1);
  std::vector<double> ye(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) {
    xe[static_cast<std::size_t>(i)] = x0 + (x1 - x0) * i / bins;
    ye[static_cast<std::size_t>(i)] = y0 + (y1 - y0) * i / bins;
  }
  return chi2_2d(samples, density, xe, ye, name, alpha);
}

namespace detail {

inline std::vector<double> ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace detail

// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a,
                       const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("spearman needs two equal-length samples");
  const auto ra = detail::ranks(a);
  const auto rb = detail::ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double num = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(va * vb);
}

}  // namespace specmeas
