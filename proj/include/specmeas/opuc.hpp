// Orthogonal polynomials on the unit circle: Szegoe recursion, reversed
// polynomials, the moment <-> Verblunsky bijection, the moment disk, and
// reconstruction of a trivial measure from a terminated coefficient vector.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "specmeas/errors.hpp"
#include "specmeas/measures.hpp"

namespace specmeas {

// Monic polynomial, coefficients lowest degree first, leading coefficient
// exactly 1.
struct MonicPolynomial {
  std::vector<Complex> coefficients;

  static MonicPolynomial one() { return MonicPolynomial{{Complex(1.0, 0.0)}}; }

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }

  Complex eval(Complex z) const {
    Complex acc(0.0, 0.0);
    for (std::size_t k = coefficients.size(); k-- > 0;)
      acc = acc * z + coefficients[k];
    return acc;
  }
};

// Phi*(z) = z^deg conj(Phi(1/conj(z))): conjugate-reverse the coefficients.
inline std::vector<Complex> reversed(const MonicPolynomial& phi) {
  std::vector<Complex> out(phi.coefficients.size());
  const std::size_t d = phi.coefficients.size();
  for (std::size_t k = 0; k < d; ++k)
    out[k] = std::conj(phi.coefficients[d - 1 - k]);
  return out;
}

// One Szegoe step: Phi_j = z Phi_{j-1} - conj(c_j) Phi*_{j-1}.
inline MonicPolynomial szego_step(const MonicPolynomial& phi, Complex c) {
  if (std::abs(c) > 1.0 + 1e-12)
    throw CoefficientOutOfDisk("|c| exceeds 1 beyond tolerance");
  const std::vector<Complex> star = reversed(phi);
  MonicPolynomial out;
  out.coefficients.assign(phi.coefficients.size() + 1, Complex(0.0, 0.0));
  for (std::size_t k = 0; k < phi.coefficients.size(); ++k)
    out.coefficients[k + 1] = phi.coefficients[k];
  const Complex cbar = std::conj(c);
  for (std::size_t k = 0; k < star.size(); ++k)
    out.coefficients[k] -= cbar * star[k];
  out.coefficients.back() = Complex(1.0, 0.0);  // monic by construction
  return out;
}

// s_N (disk center) and r_N = prod (1 - |c_j|^2) (disk radius) for the range
// of the next admissible moment.
struct MomentDisk {
  Complex center;
  double radius = 1.0;
};

namespace detail {

// <1, f> = integral of f against mu, expressed through moments with the
// convention t_0 = 1, t_{-k} = conj(t_k). `moments[k-1]` holds t_k.
inline Complex pair_with_one(const std::vector<Complex>& poly,
                             const std::vector<Complex>& moments) {
  Complex acc = poly[0];
  for (std::size_t k = 1; k < poly.size(); ++k) acc += poly[k] * moments[k - 1];
  return acc;
}

}  // namespace detail

// Levinson-type recursion on the Toeplitz moment form: c_j = -conj(Phi_j(0))
// with Phi_j built by the Szegoe recursion, choosing each c_j so that
// <1, Phi_j> = 0. Triangular: c_1..c_k depend on t_1..t_k only.
inline VerblunskyVector moments_to_verblunsky(const MomentVectorT& t) {
  const std::size_t N = t.entries.size();
  VerblunskyVector out;
  MonicPolynomial phi = MonicPolynomial::one();
  double norm2 = 1.0;  // ||Phi_{j-1}||^2 = prod_{i<j} (1 - |c_i|^2)
  for (std::size_t j = 1; j <= N; ++j) {
    // <1, z Phi_{j-1}> is linear in t_j; dividing by ||Phi_{j-1}||^2 gives
    // conj(c_j).
    std::vector<Complex> shifted(phi.coefficients.size() + 1, Complex(0, 0));
    for (std::size_t k = 0; k < phi.coefficients.size(); ++k)
      shifted[k + 1] = phi.coefficients[k];
    const Complex num = detail::pair_with_one(shifted, t.entries);
    const Complex c = std::conj(num) / norm2;
    const double a2 = std::norm(c);
    const double next = norm2 * (1.0 - a2);
    if (next < -1e-10)
      throw MomentSpaceViolation("moment vector outside M_N^T");
    const bool unimodular = (1.0 - std::abs(c) < 1e-12) || next <= 1e-12;
    if (unimodular) {
      if (j < N)
        throw Degenerate("measure supported on fewer points than requested");
      out.terminal = c / std::abs(c);
      return out;
    }
    out.interior.push_back(c);
    phi = szego_step(phi, c);
    norm2 = next;
  }
  return out;
}

// Exact inverse: run the recursion with the given c_j and solve the linear
// orthogonality condition <1, Phi_j> = 0 for each new moment t_j.
inline MomentVectorT verblunsky_to_moments(const VerblunskyVector& c) {
  MomentVectorT t;
  MonicPolynomial phi = MonicPolynomial::one();
  const std::size_t N = c.length();
  t.entries.reserve(N);
  for (std::size_t j = 1; j <= N; ++j) {
    const Complex cj = (j <= c.interior.size()) ? c.interior[j - 1] : *c.terminal;
    phi = szego_step(phi, cj);
    // 0 = <1, Phi_j> = sum_k b_k t_k with b_j = 1 and t_1..t_{j-1} known.
    Complex acc = phi.coefficients[0];
    for (std::size_t k = 1; k + 1 < phi.coefficients.size(); ++k)
      acc += phi.coefficients[k] * t.entries[k - 1];
    t.entries.push_back(-acc);
  }
  return t;
}

// Range of the admissible next moment t_{N+1} given (t_1..t_N) interior:
// center from the recursion with c_{N+1} = 0, radius prod (1 - |c_j|^2).
inline MomentDisk moment_disk(const MomentVectorT& t) {
  VerblunskyVector c = moments_to_verblunsky(t);
  if (c.terminal)
    throw MomentSpaceViolation("moment vector not in the interior of M_N^T");
  double radius = 1.0;
  for (const Complex& cj : c.interior) radius *= 1.0 - std::norm(cj);
  c.interior.push_back(Complex(0.0, 0.0));
  const MomentVectorT extended = verblunsky_to_moments(c);
  return MomentDisk{extended.entries.back(), radius};
}

namespace detail {

// Aberth-Ehrlich simultaneous iteration. All our roots are simple and (for
// terminated Szegoe polynomials) unimodular, so equispaced starting points on
// the circle converge quickly. Residuals are measured against the
// coefficient scale.
inline std::vector<Complex> aberth_roots(const std::vector<Complex>& coeffs) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  if (deg < 1) return {};
  double scale = 0.0;
  for (const Complex& a : coeffs) scale = std::max(scale, std::abs(a));

  auto eval_both = [&](Complex z, Complex& p, Complex& dp) {
    p = coeffs[static_cast<std::size_t>(deg)];
    dp = Complex(0.0, 0.0);
    for (int k = deg - 1; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + coeffs[static_cast<std::size_t>(k)];
    }
  };

  std::vector<Complex> z(static_cast<std::size_t>(deg));
  for (int k = 0; k < deg; ++k)
    z[static_cast<std::size_t>(k)] =
        std::polar(1.0, kTwoPi * (k + 0.35) / deg + 0.27);

  const int max_iter = 200;
  for (int iter = 0; iter < max_iter; ++iter) {
    double worst = 0.0;
    for (int i = 0; i < deg; ++i) {
      Complex p, dp;
      eval_both(z[static_cast<std::size_t>(i)], p, dp);
      worst = std::max(worst, std::abs(p));
      if (std::abs(p) <= 1e-14 * scale) continue;
      Complex newton = (dp != Complex(0.0, 0.0)) ? p / dp : Complex(1e-8, 0.0);
      Complex repulse(0.0, 0.0);
      for (int j = 0; j < deg; ++j) {
        if (j == i) continue;
        const Complex d = z[static_cast<std::size_t>(i)] -
                          z[static_cast<std::size_t>(j)];
        if (std::abs(d) > 1e-300) repulse += 1.0 / d;
      }
      const Complex denom = Complex(1.0, 0.0) - newton * repulse;
      Complex step = (std::abs(denom) > 1e-300) ? newton / denom : newton;
      z[static_cast<std::size_t>(i)] -= step;
    }
    if (worst <= 1e-14 * scale) break;
  }

  // Individual Newton polish (quadratic, to limiting accuracy) followed by a
  // residual check against the coefficient scale. The extra accuracy matters
  // when a coefficient sits within ~1e-9 of the unit circle and the
  // Christoffel kernel amplifies root error by the inverse norm product.
  for (int i = 0; i < deg; ++i) {
    Complex& zi = z[static_cast<std::size_t>(i)];
    for (int it = 0; it < 4; ++it) {
      Complex p, dp;
      eval_both(zi, p, dp);
      if (std::abs(p) <= 1e-15 * scale || dp == Complex(0.0, 0.0)) break;
      zi -= p / dp;
    }
    Complex p, dp;
    eval_both(zi, p, dp);
    if (std::abs(p) > 1e-9 * scale * deg)
      throw RootFindingFailure("Aberth iteration did not converge");
  }
  return z;
}

}  // namespace detail

namespace detail {

// Christoffel-Darboux kernel sum_{j<K} |phi_j(z)|^2 for the orthonormal
// polynomials, evaluated by the normalized Szegoe recursion on the value
// pair (phi_j(z), phi*_j(z)). This keeps all intermediates on the measure
// scale instead of dividing tiny polynomial values by tiny norms.
inline double cd_kernel(const VerblunskyVector& c, Complex z) {
  const std::size_t K = c.length();
  Complex phi(1.0, 0.0), phistar(1.0, 0.0);
  double kernel = 1.0;
  for (std::size_t j = 0; j + 1 < K; ++j) {
    const Complex cj = c.interior[j];
    const double s = std::sqrt(1.0 - std::norm(cj));
    const Complex next = (z * phi - std::conj(cj) * phistar) / s;
    phistar = (phistar - cj * z * phi) / s;
    phi = next;
    kernel += std::norm(phi);
  }
  return kernel;
}

}  // namespace detail

// Rebuild the K-point measure from interior coefficients plus a terminal
// unimodular one. Atoms are the zeros of Phi_K; the weight at z_k is the
// Christoffel value 1 / sum_{j<K} |phi_j(z_k)|^2.
inline CircleAtomicMeasure verblunsky_to_measure(const VerblunskyVector& c) {
  if (!c.terminal)
    throw std::invalid_argument("terminal coefficient required");
  if (std::abs(std::abs(*c.terminal) - 1.0) > 1e-12)
    throw CoefficientOutOfDisk("terminal coefficient must be unimodular");
  const std::size_t K = c.length();

  MonicPolynomial phi_K = MonicPolynomial::one();
  for (std::size_t j = 0; j < K; ++j) {
    const Complex cj = (j < c.interior.size()) ? c.interior[j] : *c.terminal;
    // 1 - |c| < 1e-12 counts as unimodular, hence invalid as an interior entry.
    if (j < c.interior.size() && 1.0 - std::abs(cj) < 1e-12)
      throw CoefficientOutOfDisk("interior coefficient unimodular within tolerance");
    phi_K = szego_step(phi_K, cj);
  }

  std::vector<Complex> roots = detail::aberth_roots(phi_K.coefficients);
  for (const Complex& z : roots)
    if (std::abs(std::abs(z) - 1.0) > 1e-6)
      throw RootFindingFailure("zero of Phi_K off the unit circle");

  bool real_coefficients = true;
  for (const Complex& cj : c.interior)
    real_coefficients = real_coefficients && cj.imag() == 0.0;
  real_coefficients = real_coefficients && c.terminal->imag() == 0.0;
  if (real_coefficients) {
    // Roots of a real-coefficient Phi_K come in conjugate pairs; replace the
    // computed approximations by exact conjugates so the Christoffel
    // evaluation below produces bit-identical paired weights and the measure
    // is symmetric to the last ulp. Real unimodular roots are exactly +-1.
    std::vector<std::size_t> pos, neg;
    std::vector<Complex> rebuilt;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (roots[i].imag() > 1e-10)
        pos.push_back(i);
      else if (roots[i].imag() < -1e-10)
        neg.push_back(i);
      else
        rebuilt.push_back(Complex(roots[i].real() >= 0.0 ? 1.0 : -1.0, 0.0));
    }
    if (pos.size() != neg.size())
      throw RootFindingFailure("unpaired conjugate roots of a real vector");
    auto by_angle = [&](std::size_t a, std::size_t b) {
      return std::arg(roots[a]) < std::arg(roots[b]);
    };
    std::sort(pos.begin(), pos.end(), by_angle);
    std::sort(neg.begin(), neg.end(), by_angle);
    for (std::size_t k = 0; k < pos.size(); ++k) {
      const double up = std::arg(roots[pos[k]]);
      const double dn = -std::arg(roots[neg[neg.size() - 1 - k]]);
      if (std::abs(up - dn) > 1e-6)
        throw RootFindingFailure("conjugate root pairing failed");
      const double theta = 0.5 * (up + dn);
      rebuilt.push_back(std::polar(1.0, theta));
      rebuilt.push_back(std::polar(1.0, -theta));
    }
    roots = std::move(rebuilt);
  }

  std::vector<double> angles(K), weights(K);
  for (std::size_t k = 0; k < K; ++k) {
    const Complex z = roots[k] / std::abs(roots[k]);
    angles[k] = wrap_angle(std::arg(z));
    weights[k] = 1.0 / detail::cd_kernel(c, z);
  }
  double sum = 0.0;
  for (double w : weights) sum += w;
  // Near-degenerate vectors (interior coefficients close to T can merge two
  // atoms below root-finder resolution) lose a few digits here; the exact
  // sum is 1, so renormalization restores the simplex invariant while the
  // gate still catches structural breakage.
  if (std::abs(sum - 1.0) > 1e-3)
    throw RootFindingFailure("Christoffel weights failed to sum to 1");
  for (double& w : weights) w /= sum;

  // Sort atoms by angle for reproducible output.
  std::vector<std::size_t> order(K);
  for (std::size_t k = 0; k < K; ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return angles[a] < angles[b]; });
  std::vector<double> sa(K), sw(K);
  for (std::size_t k = 0; k < K; ++k) {
    sa[k] = angles[order[k]];
    sw[k] = weights[order[k]];
  }
  return CircleAtomicMeasure(std::move(sa), std::move(sw));
}

}  // namespace specmeas
