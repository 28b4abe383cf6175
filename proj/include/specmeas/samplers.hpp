// Elementary distribution samplers (gamma, Dirichlet, beta, symmetric beta,
// eta) and the coefficient-route spectral-measure samplers for the circular
// and Jacobi beta-ensembles. All randomness flows through an explicit
// RngStream; there is no hidden global state.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "specmeas/canonical_moments.hpp"
#include "specmeas/errors.hpp"
#include "specmeas/measures.hpp"
#include "specmeas/opuc.hpp"
#include "specmeas/rng.hpp"

namespace specmeas {

enum class EnsembleFamily {
  CBetaE,
  SUN,
  SO2N,
  Jtilde,
  Jacobi,
  UniformMomentsT,
  UniformMomentsI,
  Bizth,
};

struct EnsembleSpec {
  EnsembleFamily family = EnsembleFamily::CBetaE;
  int N = 1;
  double beta = 2.0;
  double a = 1.0;
  double b = 1.0;
  int bizth_case = 1;  // 1..4, Bizth only
};

// Marsaglia-Tsang for shape >= 1, with the usual U^{1/a} boost below 1.
inline double sample_gamma(RngStream& rng, double shape) {
  if (!(shape > 0.0)) throw std::invalid_argument("gamma shape must be > 0");
  if (shape < 1.0) {
    const double u = rng.uniform01_open();
    return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform01_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

// Normalized independent gammas; the output is renormalized to sum to 1.
inline std::vector<double> sample_dirichlet(RngStream& rng,
                                            const std::vector<double>& params) {
  if (params.empty()) throw std::invalid_argument("empty Dirichlet parameters");
  std::vector<double> y(params.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    y[i] = sample_gamma(rng, params[i]);
    sum += y[i];
  }
  for (double& v : y) v /= sum;
  return y;
}

inline double sample_beta(RngStream& rng, double a, double b) {
  const double x = sample_gamma(rng, a);
  const double y = sample_gamma(rng, b);
  // Keep strictly inside (0,1); the endpoints are hit only by rounding.
  return std::clamp(x / (x + y), 0x1p-1074, 0x1.fffffffffffffp-1);
}

// 2 Beta(a, b) - 1 on (-1, 1); the first parameter governs the (1+x) factor
// of the density.
inline double sample_beta_s(RngStream& rng, double a, double b) {
  return 2.0 * sample_beta(rng, a, b) - 1.0;
}

// Interior coefficient draws are kept at least this far inside the unit
// circle: closer in, the reconstruction's norm products degrade and two
// atoms can merge below separation tolerance. Clamping moves the affected
// draws by less than 1e-9 in value, which shifts any CDF comparison by
// ~1e-4 at most -- far below KS resolution at our sample sizes.
inline constexpr double kInteriorMargin = 1e-9;

inline double sample_interior_beta_s(RngStream& rng, double a, double b) {
  const double x = sample_beta_s(rng, a, b);
  return std::clamp(x, -1.0 + kInteriorMargin, 1.0 - kInteriorMargin);
}

// eta_r density (r+1)/pi (1-|z|^2)^r on the open disk: uniform argument and
// |z|^2 ~ Beta(1, r+1), drawn by CDF inversion.
inline Complex sample_eta(RngStream& rng, double r) {
  if (!(r > -1.0)) throw std::invalid_argument("eta parameter must be > -1");
  const double b = 1.0 - std::pow(rng.uniform01_open(), 1.0 / (r + 1.0));
  const double phi = rng.uniform(0.0, kTwoPi);
  return std::polar(std::sqrt(std::min(b, 1.0 - 2.0 * kInteriorMargin)), phi);
}

struct CircleSample {
  CircleAtomicMeasure measure;
  VerblunskyVector coefficients;  // ground truth used to build the measure
};

// C beta E spectral measure via the Killip-Nenciu coefficient laws:
// c_j ~ eta_{beta(N-j)/2 - 1} for j < N, c_N uniform on T.
inline CircleSample sample_cbe_spectral(RngStream& rng, int N, double beta) {
  if (N < 1 || !(beta > 0.0)) throw std::invalid_argument("bad CbetaE spec");
  VerblunskyVector c;
  for (int j = 1; j < N; ++j)
    c.interior.push_back(sample_eta(rng, beta * (N - j) / 2.0 - 1.0));
  c.terminal = std::polar(1.0, rng.uniform(0.0, kTwoPi));
  CircleAtomicMeasure mu = verblunsky_to_measure(c);
  return CircleSample{std::move(mu), std::move(c)};
}

// Haar SU(N): the CUE coefficient laws conditioned on c_N = (-1)^{N+1}.
inline CircleSample sample_sun_spectral(RngStream& rng, int N) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  VerblunskyVector c;
  for (int j = 1; j < N; ++j)
    c.interior.push_back(sample_eta(rng, static_cast<double>(N - j - 1)));
  c.terminal = Complex((N % 2 == 0) ? -1.0 : 1.0, 0.0);
  CircleAtomicMeasure mu = verblunsky_to_measure(c);
  return CircleSample{std::move(mu), std::move(c)};
}

// Haar SO(2N): 2N-1 real coefficients Beta_s((2N-k)/2, (2N-k)/2), then
// c_{2N} = -1. The measure is conjugation-symmetric with no atoms at +-1.
inline CircleSample sample_so2n_spectral(RngStream& rng, int N) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  VerblunskyVector c;
  for (int k = 1; k <= 2 * N - 1; ++k) {
    const double h = (2.0 * N - k) / 2.0;
    c.interior.push_back(Complex(sample_interior_beta_s(rng, h, h), 0.0));
  }
  c.terminal = Complex(-1.0, 0.0);
  CircleAtomicMeasure mu = verblunsky_to_measure(c);
  return CircleSample{std::move(mu), std::move(c)};
}

// J~(beta, a, b, N): independent real coefficients with the odd/even
// symmetric-beta laws, c_{2N} = -1. The paper states the laws in its
// Beta_s(b, a)-pushforward notation; mapped here so that `a` weights the
// (1 - cos theta) factor of the support density, i.e. the projected
// interior points follow J(beta, a, b, N) with density x^{b-1} (1-x)^{a-1}.
inline CircleSample sample_jtilde_spectral(RngStream& rng, int N, double beta,
                                           double a, double b) {
  if (N < 1 || !(beta > 0.0) || !(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("bad Jtilde spec");
  VerblunskyVector c;
  for (int k = 1; k <= 2 * N - 1; ++k) {
    double x;
    if (k % 2 == 1) {
      const double base = (2.0 * N - k - 1.0) / 4.0 * beta;
      x = sample_interior_beta_s(rng, base + b, base + a);
    } else {
      x = sample_interior_beta_s(rng, (2.0 * N - k) / 4.0 * beta,
                                 (2.0 * N - k - 2.0) / 4.0 * beta + a + b);
    }
    c.interior.push_back(Complex(x, 0.0));
  }
  c.terminal = Complex(-1.0, 0.0);
  CircleAtomicMeasure mu = verblunsky_to_measure(c);
  return CircleSample{std::move(mu), std::move(c)};
}

// Jacobi ensemble with Dirichlet(beta/2) weights, as the projection of the
// symmetric Jtilde measure.
inline IntervalAtomicMeasure sample_jacobi_gamma(RngStream& rng, int N,
                                                 double beta, double a,
                                                 double b) {
  return project_R(sample_jtilde_spectral(rng, N, beta, a, b).measure);
}

// Uniform draw on int M_N^T: c_j ~ eta_{N-j}, mapped through the inverse
// bijection.
inline MomentVectorT sample_uniform_moments_circle(RngStream& rng, int N) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  VerblunskyVector c;
  for (int j = 1; j <= N; ++j)
    c.interior.push_back(sample_eta(rng, static_cast<double>(N - j)));
  return verblunsky_to_moments(c);
}

// Uniform draw on int M_n^[0,1]: p_j ~ Beta(n-j+1, n-j+1).
inline MomentVectorI sample_uniform_moments_interval(RngStream& rng, int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  RealCanonicalVector p;
  for (int j = 1; j <= n; ++j) {
    const double h = static_cast<double>(n - j + 1);
    p.interior.push_back(sample_beta(rng, h, h));
  }
  return canonical_to_moments_real(p);
}

// The four uniform-moment measure models: uniform canonical draws padded into
// the matching principal representation. Cases 1,2 are lower (terminal 0),
// cases 3,4 upper (terminal 1); cases 1,3 have 2N-1 moments, cases 2,4 have
// 2N.
inline IntervalAtomicMeasure sample_bizth(RngStream& rng, int bizth_case,
                                          int N) {
  if (bizth_case < 1 || bizth_case > 4)
    throw std::invalid_argument("case must be 1..4");
  if (N < 1 || (bizth_case == 3 && N < 2))
    throw std::invalid_argument("N too small for this case");
  const int n = (bizth_case == 1 || bizth_case == 3) ? 2 * N - 1 : 2 * N;
  RealCanonicalVector p;
  for (int j = 1; j <= n; ++j) {
    const double h = static_cast<double>(n - j + 1);
    p.interior.push_back(sample_beta(rng, h, h));
  }
  p.terminal = (bizth_case <= 2) ? 0.0 : 1.0;
  return gauss_quadrature(p);
}

}  // namespace specmeas
