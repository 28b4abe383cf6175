// Canonical moments on [0,1]: the moment <-> canonical bijection, extreme
// moments, the Chebyshev lift to the circle, the chain-sequence three-term
// recurrence, and Gauss-quadrature reconstruction (principal
// representations).
//
// The chain convention is p_0 = 0, zeta_k = (1 - p_{k-1}) p_k; the Jacobi
// matrix has diag_j = zeta_{2j-2} + zeta_{2j-1} and offdiag_j =
// sqrt(zeta_{2j-1} zeta_{2j}). Moments are read off as <e_1, J^k e_1> via
// tridiagonal walks, which only ever touch zeta_1..zeta_k.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "specmeas/errors.hpp"
#include "specmeas/measures.hpp"

namespace specmeas {

struct RecurrenceCoefficients {
  std::vector<double> diag;
  std::vector<double> offdiag;
};

// Parity/side enumeration of the four principal-representation cases.
enum class RepresentationSide { Lower, Upper };

struct PrincipalRepSpec {
  bool odd;  // moment vector length 2N-1 (odd) or 2N (even)
  RepresentationSide side;
};

namespace detail {

inline std::vector<double> flatten_canonical(const RealCanonicalVector& p) {
  std::vector<double> vals = p.interior;
  if (p.terminal) vals.push_back(*p.terminal);
  return vals;
}

inline std::vector<double> zeta_chain(const std::vector<double>& p) {
  std::vector<double> zeta(p.size());
  double prev = 0.0;  // p_0 = 0
  for (std::size_t k = 0; k < p.size(); ++k) {
    zeta[k] = (1.0 - prev) * p[k];
    prev = p[k];
  }
  return zeta;
}

// Jacobi data with rows 1..s, taking zeta_k = 0 beyond the available chain
// (walks of length <= |p| never reach those entries).
inline RecurrenceCoefficients jacobi_from_zeta(const std::vector<double>& zeta,
                                               std::size_t s) {
  auto z = [&](std::size_t k) -> double {  // 1-based, zero-padded
    return (k >= 1 && k <= zeta.size()) ? zeta[k - 1] : 0.0;
  };
  RecurrenceCoefficients rc;
  rc.diag.resize(s);
  rc.offdiag.resize(s > 0 ? s - 1 : 0);
  for (std::size_t j = 1; j <= s; ++j)
    rc.diag[j - 1] = z(2 * j - 2) + z(2 * j - 1);
  for (std::size_t j = 1; j + 1 <= s; ++j)
    rc.offdiag[j - 1] = std::sqrt(z(2 * j - 1) * z(2 * j));
  return rc;
}

// m_k = <e_1, J^k e_1> for k = 1..n by iterated tridiagonal products.
inline std::vector<double> walk_moments(const RecurrenceCoefficients& rc,
                                        std::size_t n) {
  const std::size_t s = rc.diag.size();
  std::vector<double> v(s, 0.0), nv(s, 0.0);
  v[0] = 1.0;
  std::vector<double> m(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < s; ++i) {
      double acc = rc.diag[i] * v[i];
      if (i > 0) acc += rc.offdiag[i - 1] * v[i - 1];
      if (i + 1 < s) acc += rc.offdiag[i] * v[i + 1];
      nv[i] = acc;
    }
    std::swap(v, nv);
    m[k] = v[0];
  }
  return m;
}

inline std::vector<double> moments_from_values(const std::vector<double>& p) {
  const auto zeta = zeta_chain(p);
  const std::size_t s = p.size() / 2 + 1;
  return walk_moments(jacobi_from_zeta(zeta, s), p.size());
}

}  // namespace detail

// Inverse of the canonical bijection: m_i = m_i^- + p_i (m_i^+ - m_i^-),
// realized through the chain-sequence Jacobi walks.
inline MomentVectorI canonical_to_moments_real(const RealCanonicalVector& p) {
  const auto vals = detail::flatten_canonical(p);
  for (std::size_t i = 0; i + 1 < vals.size(); ++i)
    if (!(vals[i] > 0.0 && vals[i] < 1.0))
      throw std::invalid_argument("interior canonical entries must be in (0,1)");
  if (!vals.empty() && !(vals.back() >= 0.0 && vals.back() <= 1.0))
    throw std::invalid_argument("terminal canonical entry must be in [0,1]");
  return MomentVectorI{detail::moments_from_values(vals)};
}

// Triangular extraction of canonical moments. Boundary hits within the
// tolerance are snapped: at the last index they yield a terminal entry,
// earlier they mean the measure has terminated and the requested vector is
// degenerate.
//
// The relative position p_i is recovered from a difference of order
// range_i = prod_{j<i} p_j (1-p_j), so its noise floor grows like
// eps / range_i. While that floor is far below 1, violations and boundary
// hits are decidable and classified sharply; once it approaches 1 (deep
// coordinates of long vectors), interiority is numerically undecidable and
// the precondition (m interior except possibly at the last index) is
// trusted: p_i is clamped inside (0,1). The round trip back to moments is
// exact to ~range_i either way.
inline RealCanonicalVector moments_to_canonical_real(const MomentVectorI& m) {
  constexpr double kBoundaryTol = 1e-9;
  constexpr double kNoise = 64.0 * 2.22e-16;
  const std::size_t n = m.entries.size();
  RealCanonicalVector out;
  std::vector<double> prefix;
  double range = 1.0;  // m_i^+ - m_i^- = prod_{j<i} p_j (1 - p_j)
  for (std::size_t i = 0; i < n; ++i) {
    if (range < 1e-250)
      throw Degenerate("canonical moment range collapsed");
    prefix.push_back(0.0);
    const double lower = detail::moments_from_values(prefix).back();
    prefix.pop_back();
    double pi = (m.entries[i] - lower) / range;
    const double threshold = std::max(kBoundaryTol, kNoise / range);
    if (threshold <= 1e-6) {
      if (pi < -threshold || pi > 1.0 + threshold)
        throw MomentSpaceViolation("moment vector outside M_n^[0,1]");
      if (pi <= threshold || pi >= 1.0 - threshold) {
        const double snapped = (pi <= threshold) ? 0.0 : 1.0;
        if (i + 1 < n)
          throw Degenerate("measure supported on fewer points than requested");
        out.terminal = snapped;
        return out;
      }
    } else {
      pi = std::clamp(pi, kBoundaryTol, 1.0 - kBoundaryTol);
    }
    out.interior.push_back(pi);
    prefix.push_back(pi);
    range *= pi * (1.0 - pi);
  }
  return out;
}

// (m_{j+1}^-, m_{j+1}^+): pad the canonical vector with 0 resp. 1 and map
// back through the chain.
inline std::pair<double, double> extreme_moments(const MomentVectorI& m) {
  RealCanonicalVector p = moments_to_canonical_real(m);
  if (p.terminal)
    throw MomentSpaceViolation("extreme moments need an interior vector");
  std::vector<double> vals = p.interior;
  vals.push_back(0.0);
  const double lo = detail::moments_from_values(vals).back();
  vals.back() = 1.0;
  const double hi = detail::moments_from_values(vals).back();
  return {lo, hi};
}

// Circle moments of the symmetric lift: t_k = int T_k(2x-1) dgamma, with T_k
// the Chebyshev polynomial of the first kind. Exact integer coefficients of
// the shifted Chebyshev polynomials (exact in doubles through degree 26).
inline MomentVectorT chebyshev_lift(const MomentVectorI& gamma_moments) {
  try {
    (void)moments_to_canonical_real(gamma_moments);
  } catch (const Degenerate&) {
    // Boundary vectors (terminated measures) are fine to lift.
  }
  const std::size_t n = gamma_moments.entries.size();
  std::vector<double> prev{1.0};         // T*_0
  std::vector<double> cur{-1.0, 2.0};    // T*_1
  MomentVectorT t;
  t.entries.reserve(n);
  auto apply = [&](const std::vector<double>& coef) {
    double acc = coef[0];
    for (std::size_t j = 1; j < coef.size(); ++j)
      acc += coef[j] * gamma_moments.entries[j - 1];
    return Complex(acc, 0.0);
  };
  for (std::size_t k = 1; k <= n; ++k) {
    if (k > 1) {
      // T*_{k} = (4x - 2) T*_{k-1} - T*_{k-2}
      std::vector<double> next(cur.size() + 1, 0.0);
      for (std::size_t j = 0; j < cur.size(); ++j) {
        next[j + 1] += 4.0 * cur[j];
        next[j] -= 2.0 * cur[j];
      }
      for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= prev[j];
      prev = std::move(cur);
      cur = std::move(next);
    }
    t.entries.push_back(apply(cur));
  }
  return t;
}

// Three-term recurrence data for an interior canonical vector; the spectral
// measure of the returned Jacobi block w.r.t. e_1 reproduces
// canonical_to_moments_real(p).
inline RecurrenceCoefficients recurrence_from_canonical(
    const RealCanonicalVector& p) {
  const auto vals = detail::flatten_canonical(p);
  for (double v : vals)
    if (!(v > 0.0 && v < 1.0))
      throw std::invalid_argument("recurrence needs an interior vector");
  const auto zeta = detail::zeta_chain(vals);
  for (std::size_t j = 1; 2 * j <= zeta.size(); ++j)
    if (zeta[2 * j - 2] * zeta[2 * j - 1] < 1e-300)
      throw Degenerate("zeta product underflow");
  return detail::jacobi_from_zeta(zeta, vals.size() / 2 + 1);
}

// Golub-Welsch on the terminated chain. Input must end with a terminal 0/1;
// the chain then decouples after finitely many rows and the block's
// eigenvalues/first components give atoms and weights. Endpoint atoms are
// snapped exactly to 0/1 (the representation theory guarantees exact
// endpoint support).
inline IntervalAtomicMeasure gauss_quadrature(const RealCanonicalVector& p) {
  auto vals = detail::flatten_canonical(p);
  if (vals.empty()) throw std::invalid_argument("empty canonical vector");
  double& term = vals.back();
  if (std::abs(term) <= 1e-12)
    term = 0.0;
  else if (std::abs(term - 1.0) <= 1e-12)
    term = 1.0;
  else
    throw std::invalid_argument("gauss_quadrature needs terminal 0 or 1");
  for (std::size_t i = 0; i + 1 < vals.size(); ++i)
    if (!(vals[i] > 0.0 && vals[i] < 1.0))
      throw std::invalid_argument("interior canonical entries must be in (0,1)");

  const std::size_t L = vals.size();
  const std::size_t s = (term == 0.0 && L % 2 == 0) ? L / 2 : L / 2 + 1;
  const auto rc = detail::jacobi_from_zeta(detail::zeta_chain(vals), s);

  Eigen::VectorXd diag(static_cast<Eigen::Index>(s));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(s > 0 ? s - 1 : 0));
  for (std::size_t i = 0; i < s; ++i) diag[static_cast<Eigen::Index>(i)] = rc.diag[i];
  for (std::size_t i = 0; i + 1 < s; ++i)
    sub[static_cast<Eigen::Index>(i)] = rc.offdiag[i];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw EigensolverFailure("tridiagonal eigensolver failed");

  std::vector<double> points(s), weights(s);
  for (std::size_t k = 0; k < s; ++k) {
    double x = solver.eigenvalues()[static_cast<Eigen::Index>(k)];
    // Residual check against the solver contract.
    const auto v = solver.eigenvectors().col(static_cast<Eigen::Index>(k));
    Eigen::VectorXd r = diag.cwiseProduct(v) - x * v;
    for (Eigen::Index i = 0; i + 1 < static_cast<Eigen::Index>(s); ++i) {
      r[i] += sub[i] * v[i + 1];
      r[i + 1] += sub[i] * v[i];
    }
    if (r.lpNorm<Eigen::Infinity>() > 1e-8)
      throw EigensolverFailure("eigenpair residual above 1e-8");
    if (std::abs(x) < 1e-9)
      x = 0.0;
    else if (std::abs(x - 1.0) < 1e-9)
      x = 1.0;
    else if (x < 0.0 || x > 1.0)
      throw EigensolverFailure("quadrature node outside [0,1]");
    points[k] = x;
    weights[k] = v[0] * v[0];
  }
  double sum = 0.0;
  for (double w : weights) sum += w;
  for (double& w : weights) w /= sum;
  return IntervalAtomicMeasure(std::move(points), std::move(weights));
}

// Lower/upper principal representation of an interior moment vector: pad the
// canonical vector with 0 (lower) or 1 (upper) and run the quadrature.
inline IntervalAtomicMeasure principal_representation(const MomentVectorI& m,
                                                      RepresentationSide side) {
  RealCanonicalVector p = moments_to_canonical_real(m);
  if (p.terminal)
    throw MomentSpaceViolation("principal representation needs interior moments");
  p.terminal = (side == RepresentationSide::Lower) ? 0.0 : 1.0;
  return gauss_quadrature(p);
}

}  // namespace specmeas
