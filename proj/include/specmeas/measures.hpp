// Atomic probability measures on the unit circle and on [0,1], their moment
// vectors, and the coefficient vectors (Verblunsky / canonical) that encode
// them. All types are immutable values after construction.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "specmeas/errors.hpp"

namespace specmeas {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Tolerances fixed for the whole library: weights must form a probability
// vector to 1e-12; atoms are considered distinct above 1e-10 (eigensolver
// accuracy at desk scale N <= 64 is far better than that).
inline constexpr double kWeightSumTol = 1e-12;
inline constexpr double kAtomSepTol = 1e-10;

// Canonicalize an angle into [-pi, pi).
inline double wrap_angle(double theta) {
  double t = std::remainder(theta, kTwoPi);
  if (t >= kPi) t -= kTwoPi;
  if (t < -kPi) t += kTwoPi;
  return t;
}

namespace detail {

inline void check_probability_weights(const std::vector<double>& w) {
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol)
    throw std::invalid_argument("weights must sum to 1 within 1e-12");
}

inline void check_distinct_sorted(std::vector<double> v, bool circular) {
  std::sort(v.begin(), v.end());
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] - v[i - 1] < kAtomSepTol)
      throw std::invalid_argument("atoms must be pairwise distinct");
  if (circular && v.size() > 1) {
    if ((v.front() + kTwoPi) - v.back() < kAtomSepTol)
      throw std::invalid_argument("atoms must be pairwise distinct");
  }
}

}  // namespace detail

// mu = sum_j w_j delta_{exp(i theta_j)}; angles stored in [-pi, pi).
class CircleAtomicMeasure {
 public:
  CircleAtomicMeasure(std::vector<double> angles, std::vector<double> weights)
      : angles_(std::move(angles)), weights_(std::move(weights)) {
    if (angles_.size() != weights_.size())
      throw std::invalid_argument("angles/weights length mismatch");
    for (double& t : angles_) t = wrap_angle(t);
    detail::check_probability_weights(weights_);
    detail::check_distinct_sorted(angles_, /*circular=*/true);
  }

  std::size_t size() const { return angles_.size(); }
  const std::vector<double>& angles() const { return angles_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> angles_;
  std::vector<double> weights_;
};

// gamma = sum_j w_j delta_{x_j} with x_j in [0,1].
class IntervalAtomicMeasure {
 public:
  IntervalAtomicMeasure(std::vector<double> points, std::vector<double> weights)
      : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.size() != weights_.size())
      throw std::invalid_argument("points/weights length mismatch");
    for (double x : points_)
      if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("points must lie in [0,1]");
    detail::check_probability_weights(weights_);
    detail::check_distinct_sorted(points_, /*circular=*/false);
  }

  std::size_t size() const { return points_.size(); }
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

// Ordinary moment vectors (t_1..t_N) resp. (m_1..m_n); entry 0 of the
// underlying storage is t_1 (the trivial zeroth moment is implicit).
struct MomentVectorT {
  std::vector<Complex> entries;
};

struct MomentVectorI {
  std::vector<double> entries;
};

// Verblunsky coefficients: interior ones lie strictly inside the unit disk,
// the optional terminal one on the unit circle (trivial measures).
struct VerblunskyVector {
  std::vector<Complex> interior;
  std::optional<Complex> terminal;

  std::size_t length() const {
    return interior.size() + (terminal ? 1u : 0u);
  }
};

// Real canonical moments: interior entries strictly inside (0,1); the
// optional terminal entry may sit anywhere in [0,1] (0/1 terminates the
// measure as a principal representation).
struct RealCanonicalVector {
  std::vector<double> interior;
  std::optional<double> terminal;

  std::size_t length() const {
    return interior.size() + (terminal ? 1u : 0u);
  }
};

// t_k = sum_j w_j exp(i k theta_j), k = 1..K.
inline MomentVectorT moments_circle(const CircleAtomicMeasure& mu, int K) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  MomentVectorT t;
  t.entries.resize(static_cast<std::size_t>(K));
  const std::size_t n = mu.size();
  std::vector<Complex> pow(n, Complex(1.0, 0.0));
  std::vector<Complex> step(n);
  for (std::size_t j = 0; j < n; ++j)
    step[j] = std::polar(1.0, mu.angles()[j]);
  for (int k = 0; k < K; ++k) {
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      pow[j] *= step[j];
      acc += mu.weights()[j] * pow[j];
    }
    t.entries[static_cast<std::size_t>(k)] = acc;
  }
  return t;
}

// m_k = sum_j w_j x_j^k, k = 1..K.
inline MomentVectorI moments_interval(const IntervalAtomicMeasure& gamma, int K) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  MomentVectorI m;
  m.entries.resize(static_cast<std::size_t>(K));
  const std::size_t n = gamma.size();
  std::vector<double> pow(n, 1.0);
  for (int k = 0; k < K; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      pow[j] *= gamma.points()[j];
      acc += gamma.weights()[j] * pow[j];
    }
    m.entries[static_cast<std::size_t>(k)] = acc;
  }
  return m;
}

// True iff every atom (theta, w) has a partner (-theta, w) within tol in
// both angle (circular distance) and weight.
inline bool is_symmetric(const CircleAtomicMeasure& mu, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  const auto& th = mu.angles();
  const auto& w = mu.weights();
  const std::size_t n = mu.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double target = wrap_angle(-th[i]);
    bool found = false;
    for (std::size_t j = 0; j < n; ++j) {
      double d = std::abs(std::remainder(th[j] - target, kTwoPi));
      if (d <= tol && std::abs(w[j] - w[i]) <= tol) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

// Pushforward of a symmetric circle measure under exp(i theta) -> (1+cos
// theta)/2. Conjugate pairs {+-theta} merge into one atom carrying their
// combined weight; atoms at theta in {0, pi} keep their full weight.
inline IntervalAtomicMeasure project_R(const CircleAtomicMeasure& mu,
                                       double tol = 1e-8) {
  if (!is_symmetric(mu, tol))
    throw NotSymmetric("project_R requires a conjugation-symmetric measure");
  const auto& th = mu.angles();
  const auto& w = mu.weights();
  const std::size_t n = mu.size();
  std::vector<char> used(n, 0);
  std::vector<double> points;
  std::vector<double> weights;
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    used[i] = 1;
    const double x = (1.0 + std::cos(th[i])) / 2.0;
    // Self-paired atoms: theta ~ 0 or theta ~ -pi.
    if (std::abs(th[i]) <= 1e-9 || std::abs(std::abs(th[i]) - kPi) <= 1e-9) {
      points.push_back(std::clamp(x, 0.0, 1.0));
      weights.push_back(w[i]);
      continue;
    }
    const double target = wrap_angle(-th[i]);
    std::size_t partner = n;
    double best = tol;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(std::remainder(th[j] - target, kTwoPi));
      if (d <= best) {
        best = d;
        partner = j;
      }
    }
    if (partner == n)
      throw NotSymmetric("unpaired atom in project_R");
    used[partner] = 1;
    points.push_back(x);
    weights.push_back(w[i] + w[partner]);
  }
  return IntervalAtomicMeasure(std::move(points), std::move(weights));
}

}  // namespace specmeas
