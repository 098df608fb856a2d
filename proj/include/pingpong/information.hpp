#pragma once

#include "pingpong/state.hpp"

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace pingpong {

/// -x log2 x with 0 log 0 = 0.
template <typename Real>
Real entropy_term(Real x) {
  return x > Real(0) ? -x * std::log2(x) : Real(0);
}

/// Shannon entropy in bits of a spectrum. Entries in [-1e-9, 0) are
/// clamped to zero; anything lower throws std::domain_error.
template <typename Real>
Real spectrum_entropy(std::span<const Real> eigenvalues) {
  Real h = 0;
  for (Real l : eigenvalues) {
    if (l < Real(-kPsdTolerance)) throw std::domain_error("negative eigenvalue " + std::to_string(double(l)));
    h += entropy_term(l);
  }
  return h;
}

/// -sum lambda_i log2 lambda_i over the eigenvalues of rho.
template <typename Real>
Real von_neumann_entropy(const DensityOperator<Real>& rho) {
  const auto eig = eigvals_hermitian(rho);
  return spectrum_entropy<Real>(eig);
}

/// 1 + q log2 q + (1-q) log2(1-q). Throws std::domain_error outside [0, 1].
template <typename Real>
Real binary_capacity(Real q) {
  if (!(q >= Real(0) && q <= Real(1))) throw std::domain_error("binary_capacity: q outside [0,1]");
  const Real p = Real(1) - q;
  const Real a = q > Real(0) ? q * std::log2(q) : Real(0);
  const Real b = p > Real(0) ? p * std::log2(p) : Real(0);
  return Real(1) + (a + b);
}

/// Plug-in mutual information (bits) of a 2x2 contingency table
/// counts[x][y].
inline double empirical_mutual_information(const std::array<std::array<long long, 2>, 2>& counts) {
  double n = 0;
  for (const auto& row : counts)
    for (long long c : row) n += static_cast<double>(c);
  if (n == 0) throw std::invalid_argument("empirical_mutual_information: empty table");
  double mi = 0;
  for (int x = 0; x < 2; ++x) {
    const double px = static_cast<double>(counts[x][0] + counts[x][1]) / n;
    for (int y = 0; y < 2; ++y) {
      const double py = static_cast<double>(counts[0][y] + counts[1][y]) / n;
      const double pxy = static_cast<double>(counts[x][y]) / n;
      if (pxy > 0) mi += pxy * std::log2(pxy / (px * py));
    }
  }
  return mi;
}

}  // namespace pingpong
