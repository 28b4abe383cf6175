// Dense-matrix oracle samplers: Haar unitary / special orthogonal matrices,
// spectral-measure extraction from the pair (A, e_1), and the dual
// composition g -> g^D g. O(N^3) per draw is fine here; these exist to
// cross-validate the coefficient-route samplers.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "specmeas/errors.hpp"
#include "specmeas/measures.hpp"
#include "specmeas/rng.hpp"

namespace specmeas {

using UnitaryMatrix = Eigen::MatrixXcd;
using SpecialOrthogonalMatrix = Eigen::MatrixXd;

// QR of a complex Ginibre matrix with the diagonal phases normalized; the
// resulting Q is Haar on U(N).
inline UnitaryMatrix haar_unitary(RngStream& rng, int N) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  Eigen::MatrixXcd g(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      g(i, j) = Complex(rng.normal(), rng.normal());
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < N; ++j) {
    const Complex d = r(j, j);
    const double m = std::abs(d);
    q.col(j) *= (m > 0.0) ? d / m : Complex(1.0, 0.0);
  }
  return q;
}

// QR of a real Ginibre matrix, diagonal signs normalized; a negative
// determinant is fixed by flipping the last column (right multiplication by
// a fixed matrix preserves left invariance, so the result is Haar on SO).
inline SpecialOrthogonalMatrix haar_special_orthogonal(RngStream& rng, int n2) {
  if (n2 < 2 || n2 % 2 != 0)
    throw std::invalid_argument("dimension must be even and >= 2");
  Eigen::MatrixXd g(n2, n2);
  for (int i = 0; i < n2; ++i)
    for (int j = 0; j < n2; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n2; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  if (q.determinant() < 0.0) q.col(n2 - 1) *= -1.0;
  return q;
}

// g^D = J g^T J^T with J = [[0, -I], [I, 0]]; returns g^D g.
inline UnitaryMatrix dual_compose(const SpecialOrthogonalMatrix& g) {
  const int n2 = static_cast<int>(g.rows());
  if (n2 % 2 != 0 || g.cols() != n2)
    throw std::invalid_argument("dual_compose needs an even square matrix");
  const int n = n2 / 2;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n2, n2);
  j.block(0, n, n, n) = -Eigen::MatrixXd::Identity(n, n);
  j.block(n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd dual = j * g.transpose() * j.transpose();
  return (dual * g).cast<Complex>();
}

struct SpectralMeasureResult {
  CircleAtomicMeasure measure;
  bool cyclicity_warning = false;  // some weight fell below 1e-12
  double min_weight = 0.0;
};

namespace detail {

// Eigenpairs of a unitary matrix, MGS-orthonormalized and residual-checked,
// sorted by eigenvalue argument.
inline void unitary_eigenpairs(const UnitaryMatrix& M,
                               std::vector<double>& angles,
                               std::vector<double>& weights) {
  const int N = static_cast<int>(M.rows());
  if ((M.adjoint() * M - Eigen::MatrixXcd::Identity(N, N))
          .cwiseAbs()
          .maxCoeff() > 1e-10)
    throw std::invalid_argument("matrix is not unitary within 1e-10");

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(M, true);
  if (solver.info() != Eigen::Success)
    throw EigensolverFailure("complex eigensolver failed");
  Eigen::MatrixXcd v = solver.eigenvectors();
  Eigen::VectorXcd lambda = solver.eigenvalues();

  // Sort by argument first so Gram-Schmidt runs within contiguous clusters.
  std::vector<int> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return wrap_angle(std::arg(lambda[a])) < wrap_angle(std::arg(lambda[b]));
  });
  Eigen::MatrixXcd vs(N, N);
  Eigen::VectorXcd ls(N);
  for (int k = 0; k < N; ++k) {
    vs.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    ls[k] = lambda[order[static_cast<std::size_t>(k)]];
  }

  // Modified Gram-Schmidt. For simple spectra this only polishes columns;
  // inside a degenerate cluster it fixes an orthonormal eigenspace basis,
  // which is all the weight sum below depends on.
  for (int k = 0; k < N; ++k) {
    for (int j = 0; j < k; ++j)
      vs.col(k) -= vs.col(j).dot(vs.col(k)) * vs.col(j);
    vs.col(k).normalize();
  }
  for (int k = 0; k < N; ++k) {
    const double resid = (M * vs.col(k) - ls[k] * vs.col(k)).norm();
    if (resid > 1e-8)
      throw EigensolverFailure("eigenpair residual above 1e-8");
  }

  angles.resize(static_cast<std::size_t>(N));
  weights.resize(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    angles[static_cast<std::size_t>(k)] = wrap_angle(std::arg(ls[k]));
    weights[static_cast<std::size_t>(k)] = std::norm(vs(0, k));
  }
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= sum;
}

}  // namespace detail

// Spectral measure of (M, e_1) for a matrix with simple spectrum: atoms at
// the eigenvalue arguments, weights the squared first components of the
// orthonormal eigenvectors.
inline SpectralMeasureResult spectral_measure(const UnitaryMatrix& M) {
  std::vector<double> angles, weights;
  detail::unitary_eigenpairs(M, angles, weights);
  const double min_w = *std::min_element(weights.begin(), weights.end());
  SpectralMeasureResult out{
      CircleAtomicMeasure(std::move(angles), std::move(weights)),
      min_w < 1e-12, min_w};
  return out;
}

// Spectral measure allowing repeated eigenvalues: eigenvalues closer than
// cluster_tol (circularly) are merged into one atom whose weight is the
// squared norm of the e_1 projection onto the whole eigenspace. Self-dual
// matrices like g^D g need this (Kramers doubling). If expected_multiplicity
// is nonzero, any cluster of a different size is an error.
inline SpectralMeasureResult spectral_measure_clustered(
    const UnitaryMatrix& M, double cluster_tol,
    int expected_multiplicity = 0) {
  std::vector<double> angles, weights;
  detail::unitary_eigenpairs(M, angles, weights);
  const std::size_t n = angles.size();

  std::vector<double> ca, cw;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    double wsum = weights[i];
    while (j + 1 < n && angles[j + 1] - angles[j] < cluster_tol) {
      ++j;
      wsum += weights[j];
    }
    ca.push_back(angles[(i + j) / 2]);
    cw.push_back(wsum);
    if (expected_multiplicity > 0 &&
        static_cast<int>(j - i + 1) != expected_multiplicity)
      throw EigensolverFailure("unexpected eigenvalue multiplicity");
    i = j + 1;
  }
  // Wrap-around cluster (atoms straddling -pi).
  if (ca.size() > 1 && (ca.front() + kTwoPi) - ca.back() < cluster_tol)
    throw EigensolverFailure("eigenvalue cluster straddles the branch cut");

  const double min_w = *std::min_element(cw.begin(), cw.end());
  SpectralMeasureResult out{CircleAtomicMeasure(std::move(ca), std::move(cw)),
                            min_w < 1e-12, min_w};
  return out;
}

namespace detail {

inline bool eigenvalues_collide(const CircleAtomicMeasure& mu) {
  const auto& th = mu.angles();  // sorted by construction path
  std::vector<double> s(th);
  std::sort(s.begin(), s.end());
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] - s[i - 1] < 1e-10) return true;
  if (s.size() > 1 && (s.front() + kTwoPi) - s.back() < 1e-10) return true;
  return false;
}

}  // namespace detail

// Haar-unitary spectral measure with collision rejection (weight attribution
// is ill-posed when two eigenvalues nearly coincide).
inline CircleAtomicMeasure sample_cue_matrix_spectral(RngStream& rng, int N,
                                                      int* rejections = nullptr) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      SpectralMeasureResult r = spectral_measure(haar_unitary(rng, N));
      return r.measure;
    } catch (const std::invalid_argument&) {
      if (rejections) ++*rejections;
    } catch (const EigensolverFailure&) {
      if (rejections) ++*rejections;
    }
  }
  throw EigensolverFailure("persistent failure sampling a CUE spectral measure");
}

// Spectral measure of g^D g for Haar g on SO(2n); symmetric by construction.
// g^D g is self-dual, so every eigenvalue is doubly degenerate: the measure
// has n distinct atoms, one per two-dimensional eigenspace.
inline CircleAtomicMeasure sample_unif2_spectral(RngStream& rng, int n,
                                                 int* rejections = nullptr) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      SpectralMeasureResult r = spectral_measure_clustered(
          dual_compose(haar_special_orthogonal(rng, 2 * n)), 1e-7, 2);
      return r.measure;
    } catch (const std::invalid_argument&) {
      if (rejections) ++*rejections;
    } catch (const EigensolverFailure&) {
      if (rejections) ++*rejections;
    }
  }
  throw EigensolverFailure("persistent failure sampling a g^D g spectral measure");
}

}  // namespace specmeas
