#pragma once

#include "pingpong/state.hpp"

#include <Eigen/QR>

#include <cmath>
#include <random>
#include <vector>

namespace testing {

using pingpong::CMatrix;
using pingpong::CVector;
using pingpong::Density;
using pingpong::Role;
using pingpong::State;
using pingpong::SubsystemLayout;
using Complex = std::complex<double>;

/// Generators for property tests; each owns its engine so cases replay exactly.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  CMatrix<double> gaussian(Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal;
    CMatrix<double> m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(normal(engine_), normal(engine_));
    return m;
  }

  State state(const SubsystemLayout& layout) {
    CVector<double> v = gaussian(layout.total_dim(), 1).col(0);
    return State::normalized(layout, v);
  }

  /// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
  CMatrix<double> unitary(Eigen::Index n) {
    Eigen::HouseholderQR<CMatrix<double>> qr(gaussian(n, n));
    return qr.householderQ() * CMatrix<double>::Identity(n, n);
  }

  /// Random mixed state of the given rank (Wishart construction).
  Density density(const SubsystemLayout& layout, int rank) {
    const CMatrix<double> g = gaussian(layout.total_dim(), rank);
    CMatrix<double> m = g * g.adjoint();
    m /= m.trace().real();
    return Density(layout, m);
  }

  /// Layout of 1 to 3 subsystems with random dims drawn from {2, 3}.
  SubsystemLayout layout() {
    static const Role roles[] = {Role::Home, Role::Travel, Role::Ancilla, Role::ModeX, Role::ModeY};
    const int n = integer(1, 3);
    std::vector<pingpong::Subsystem> parts;
    std::vector<Role> pool(std::begin(roles), std::end(roles));
    std::shuffle(pool.begin(), pool.end(), engine_);
    for (int i = 0; i < n; ++i) parts.push_back({pool[static_cast<std::size_t>(i)], integer(2, 3)});
    return SubsystemLayout(parts);
  }

 private:
  std::mt19937_64 engine_;
};

inline CMatrix<double> kron(const CMatrix<double>& a, const CMatrix<double>& b) {
  CMatrix<double> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline double hermiticity_defect(const CMatrix<double>& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

inline SubsystemLayout qubits(std::initializer_list<Role> roles) {
  std::vector<pingpong::Subsystem> parts;
  for (Role r : roles) parts.push_back({r, 2});
  return SubsystemLayout(parts);
}

}  // namespace testing
