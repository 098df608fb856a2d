#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace pingpong {

template <typename Real>
struct HermitianEigen {
  std::vector<Real> values;  // descending
  Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> vectors;  // column k pairs with values[k]
  int sweeps = 0;
};

inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;

/// Frobenius norm of the strictly off-diagonal part.
template <typename Derived>
typename Derived::RealScalar off_diagonal_norm(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  Real sum = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += std::norm(a(i, j));
  return std::sqrt(sum);
}

/// Cyclic Jacobi diagonalization of a dense Hermitian matrix.
///
/// Each rotation first removes the phase of a(p,q) with a diagonal unitary,
/// then applies the real symmetric Jacobi rotation that zeroes it. Sweeps
/// stop once the off-diagonal Frobenius norm drops below `tolerance`.
/// Throws std::invalid_argument for non-square or non-Hermitian input
/// (defect above 1e-10) and std::runtime_error if `max_sweeps` is exhausted.
template <typename Derived>
HermitianEigen<typename Derived::RealScalar> jacobi_eigen(const Eigen::MatrixBase<Derived>& input,
                                                          double tolerance = kJacobiTolerance,
                                                          int max_sweeps = kJacobiMaxSweeps) {
  using Real = typename Derived::RealScalar;
  using Complex = std::complex<Real>;
  using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

  if (input.rows() != input.cols()) throw std::invalid_argument("jacobi_eigen: matrix is not square");
  Matrix a = input.template cast<Complex>();
  const Eigen::Index n = a.rows();
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > Real(1e-10))
    throw std::invalid_argument("jacobi_eigen: matrix is not Hermitian");
  a = (a + a.adjoint()) / Real(2);

  Matrix v = Matrix::Identity(n, n);
  int sweep = 0;
  while (off_diagonal_norm(a) >= Real(tolerance)) {
    if (sweep == max_sweeps) throw std::runtime_error("jacobi_eigen: no convergence");
    ++sweep;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const Real mag = std::abs(apq);
        if (mag == Real(0)) continue;
        const Complex phase = apq / mag;
        const Real theta = (a(q, q).real() - a(p, p).real()) / (2 * mag);
        const Real t = (theta >= 0 ? Real(1) : Real(-1)) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const Real c = 1 / std::sqrt(t * t + 1);
        const Real s = t * c;
        // G = diag(1, conj(phase)) * [[c, s], [-s, c]] restricted to (p, q).
        const Complex gpp = c, gpq = s, gqp = -s * std::conj(phase), gqq = c * std::conj(phase);

        // a <- a * G
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        // a <- G^H * a
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = a(q, p) = Complex(0);
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        // v <- v * G
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() > a(y, y).real(); });

  HermitianEigen<Real> result;
  result.sweeps = sweep;
  result.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    result.values.push_back(a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real());
    result.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return result;
}

/// Real eigenvalues of a Hermitian matrix in descending order.
template <typename Derived>
std::vector<typename Derived::RealScalar> eigvals_hermitian(const Eigen::MatrixBase<Derived>& m) {
  return jacobi_eigen(m).values;
}

}  // namespace pingpong
