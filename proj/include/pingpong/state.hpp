#pragma once

#include "pingpong/jacobi.hpp"
#include "pingpong/layout.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pingpong {

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-9;

/// Normalized pure state of a composite system.
template <typename Real>
class StateVector {
 public:
  /// Throws std::invalid_argument on a dimension mismatch, a non-finite
  /// amplitude or a norm further than 1e-10 from one.
  StateVector(SubsystemLayout layout, CVector<Real> amps) : layout_(std::move(layout)), amps_(std::move(amps)) {
    if (amps_.size() != layout_.total_dim())
      throw std::invalid_argument("state dimension " + std::to_string(amps_.size()) + " does not match layout " +
                                  to_string(layout_));
    if (!amps_.allFinite()) throw std::invalid_argument("state has non-finite amplitudes");
    if (std::abs(amps_.norm() - Real(1)) > Real(kNormTolerance))
      throw std::invalid_argument("state is not normalized (norm " + std::to_string(double(amps_.norm())) + ")");
  }

  /// Scales `amps` to unit norm; throws std::domain_error for a zero vector.
  static StateVector normalized(SubsystemLayout layout, CVector<Real> amps) {
    const Real n = amps.norm();
    if (!(n > Real(0))) throw std::domain_error("cannot normalize a zero-norm state");
    amps /= n;
    return StateVector(std::move(layout), std::move(amps));
  }

  /// Product basis state with the given level per subsystem.
  static StateVector basis(SubsystemLayout layout, std::initializer_list<int> levels) {
    if (levels.size() != layout.size()) throw std::invalid_argument("basis: one level per subsystem required");
    int index = 0;
    std::size_t i = 0;
    for (int level : levels) {
      if (level < 0 || level >= layout[i].dim) throw std::invalid_argument("basis: level out of range");
      index = index * layout[i].dim + level;
      ++i;
    }
    CVector<Real> amps = CVector<Real>::Zero(layout.total_dim());
    amps(index) = Real(1);
    return StateVector(std::move(layout), std::move(amps));
  }

  [[nodiscard]] const SubsystemLayout& layout() const { return layout_; }
  [[nodiscard]] const CVector<Real>& amplitudes() const { return amps_; }
  [[nodiscard]] std::complex<Real> amplitude(Eigen::Index i) const { return amps_(i); }
  [[nodiscard]] Eigen::Index dim() const { return amps_.size(); }

 private:
  SubsystemLayout layout_;
  CVector<Real> amps_;
};

/// Hermitian, unit-trace, positive-semidefinite operator.
template <typename Real>
class DensityOperator {
 public:
  /// Validates Hermiticity (1e-10), unit trace (1e-10) and that the smallest
  /// eigenvalue is at least -1e-9. Throws std::invalid_argument otherwise.
  DensityOperator(SubsystemLayout layout, CMatrix<Real> matrix)
      : DensityOperator(std::move(layout), std::move(matrix), Trusted{}) {
    const auto eig = eigvals_hermitian(matrix_);
    if (!eig.empty() && eig.back() < Real(-kPsdTolerance))
      throw std::invalid_argument("density operator has a negative eigenvalue " + std::to_string(double(eig.back())));
  }

  static DensityOperator pure(const StateVector<Real>& psi) {
    return DensityOperator(psi.layout(), psi.amplitudes() * psi.amplitudes().adjoint(), Trusted{});
  }

  /// Convex combination; weights must be nonnegative and sum to one.
  static DensityOperator mixture(std::span<const Real> weights, std::span<const DensityOperator> parts) {
    if (weights.size() != parts.size() || parts.empty()) throw std::invalid_argument("mixture: size mismatch");
    CMatrix<Real> m = CMatrix<Real>::Zero(parts[0].dim(), parts[0].dim());
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!(parts[i].layout() == parts[0].layout())) throw std::invalid_argument("mixture: layout mismatch");
      if (weights[i] < Real(0)) throw std::invalid_argument("mixture: negative weight");
      m += weights[i] * parts[i].matrix();
    }
    return DensityOperator(parts[0].layout(), std::move(m), Trusted{});
  }

  [[nodiscard]] const SubsystemLayout& layout() const { return layout_; }
  [[nodiscard]] const CMatrix<Real>& matrix() const { return matrix_; }
  [[nodiscard]] Eigen::Index dim() const { return matrix_.rows(); }
  [[nodiscard]] std::complex<Real> operator()(Eigen::Index i, Eigen::Index j) const { return matrix_(i, j); }

 private:
  struct Trusted {};

  // Skips the eigenvalue check for operators that are PSD by construction
  // (pure projectors, mixtures, partial traces).
  DensityOperator(SubsystemLayout layout, CMatrix<Real> matrix, Trusted)
      : layout_(std::move(layout)), matrix_(std::move(matrix)) {
    const Eigen::Index n = layout_.total_dim();
    if (matrix_.rows() != n || matrix_.cols() != n)
      throw std::invalid_argument("density matrix shape does not match layout " + to_string(layout_));
    if (!matrix_.allFinite()) throw std::invalid_argument("density matrix has non-finite entries");
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > Real(kHermitianTolerance))
      throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(matrix_.trace() - std::complex<Real>(1)) > Real(kTraceTolerance))
      throw std::invalid_argument("density matrix trace is not one");
  }

  template <typename R>
  friend DensityOperator<R> partial_trace(const DensityOperator<R>&, std::span<const Role>);

  SubsystemLayout layout_;
  CMatrix<Real> matrix_;
};

using State = StateVector<double>;
using Density = DensityOperator<double>;

/// Amplitudes as a (target_dim x rest_dim) matrix.
template <typename Real>
CMatrix<Real> reshape_targets(const CVector<Real>& amps, const IndexSplit& split) {
  CMatrix<Real> m(split.target_dim, split.rest_dim);
  for (int t = 0; t < split.target_dim; ++t)
    for (int r = 0; r < split.rest_dim; ++r) m(t, r) = amps(split.at(t, r));
  return m;
}

template <typename Real>
CVector<Real> flatten_targets(const CMatrix<Real>& m, const IndexSplit& split) {
  CVector<Real> amps(static_cast<Eigen::Index>(split.full_index.size()));
  for (int t = 0; t < split.target_dim; ++t)
    for (int r = 0; r < split.rest_dim; ++r) amps(split.at(t, r)) = m(t, r);
  return amps;
}

/// Composite state a (x) b. Throws std::invalid_argument on a label collision.
template <typename Real>
StateVector<Real> tensor(const StateVector<Real>& a, const StateVector<Real>& b) {
  SubsystemLayout layout = a.layout().concat(b.layout());
  CVector<Real> amps(a.dim() * b.dim());
  for (Eigen::Index i = 0; i < a.dim(); ++i) amps.segment(i * b.dim(), b.dim()) = a.amplitude(i) * b.amplitudes();
  return StateVector<Real>(std::move(layout), std::move(amps));
}

/// How apply_on validates its operator.
enum class OpContract {
  Unitary,         ///< op^H op = I within 1e-10
  NormPreserving,  ///< declared partial isometry: the output must keep unit norm
  Renormalize,     ///< arbitrary linear map, output rescaled to unit norm
};

/// Applies `op` to the subsystems `targets` (op's basis ordered as listed),
/// identity elsewhere.
template <typename Real, typename Derived>
StateVector<Real> apply_on(const StateVector<Real>& state, const Eigen::MatrixBase<Derived>& op,
                           std::span<const Role> targets, OpContract contract = OpContract::Unitary) {
  const IndexSplit split = split_index(state.layout(), targets);
  if (op.rows() != split.target_dim || op.cols() != split.target_dim)
    throw std::invalid_argument("apply_on: operator dimension does not match targets");
  const CMatrix<Real> u = op.template cast<std::complex<Real>>();
  if (contract == OpContract::Unitary &&
      (u.adjoint() * u - CMatrix<Real>::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() > Real(kNormTolerance))
    throw std::invalid_argument("apply_on: operator is not unitary");

  CVector<Real> out = flatten_targets<Real>(u * reshape_targets<Real>(state.amplitudes(), split), split);
  if (contract == OpContract::NormPreserving && std::abs(out.norm() - Real(1)) > Real(kNormTolerance))
    throw std::domain_error("apply_on: state lies outside the operator's isometric domain");
  if (contract == OpContract::Renormalize) return StateVector<Real>::normalized(state.layout(), std::move(out));
  return StateVector<Real>(state.layout(), std::move(out));
}

template <typename Real, typename Derived>
StateVector<Real> apply_on(const StateVector<Real>& state, const Eigen::MatrixBase<Derived>& op,
                           std::initializer_list<Role> targets, OpContract contract = OpContract::Unitary) {
  return apply_on(state, op, std::span<const Role>(targets.begin(), targets.size()), contract);
}

/// Re-embeds subsystem `role` through the isometry `embedding`
/// (new_dim x old_dim), e.g. a qubit into a 3-level photon mode.
template <typename Real, typename Derived>
StateVector<Real> embed(const StateVector<Real>& state, Role role, const Eigen::MatrixBase<Derived>& embedding) {
  const Role targets[] = {role};
  const IndexSplit split = split_index(state.layout(), targets);
  if (embedding.cols() != split.target_dim) throw std::invalid_argument("embed: dimension mismatch");
  const CMatrix<Real> e = embedding.template cast<std::complex<Real>>();
  SubsystemLayout layout = state.layout().with_dim(role, static_cast<int>(e.rows()));
  const IndexSplit out_split = split_index(layout, targets);
  CVector<Real> out = flatten_targets<Real>(e * reshape_targets<Real>(state.amplitudes(), split), out_split);
  if (std::abs(out.norm() - Real(1)) > Real(kNormTolerance))
    throw std::invalid_argument("embed: map is not an isometry on this state");
  return StateVector<Real>(std::move(layout), std::move(out));
}

/// Reduced operator on `keep`; the result keeps the original subsystem order.
template <typename Real>
DensityOperator<Real> partial_trace(const DensityOperator<Real>& rho, std::span<const Role> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  std::vector<Role> ordered;
  for (const auto& p : rho.layout().parts())
    for (Role r : keep)
      if (r == p.role) ordered.push_back(r);
  if (ordered.size() != keep.size()) {
    for (Role r : keep) (void)rho.layout().position(r);  // throws on unknown label
    throw std::invalid_argument("partial_trace: duplicate label");
  }
  const IndexSplit split = split_index(rho.layout(), ordered);
  CMatrix<Real> out = CMatrix<Real>::Zero(split.target_dim, split.target_dim);
  for (int i = 0; i < split.target_dim; ++i)
    for (int j = 0; j < split.target_dim; ++j)
      for (int r = 0; r < split.rest_dim; ++r) out(i, j) += rho(split.at(i, r), split.at(j, r));
  return DensityOperator<Real>(rho.layout().select(ordered), std::move(out),
                               typename DensityOperator<Real>::Trusted{});
}

template <typename Real>
DensityOperator<Real> partial_trace(const DensityOperator<Real>& rho, std::initializer_list<Role> keep) {
  return partial_trace(rho, std::span<const Role>(keep.begin(), keep.size()));
}

/// <v|rho|v>, clamped to [0, 1]. Throws std::invalid_argument on a layout
/// mismatch and std::domain_error if the raw value is out of [-1e-9, 1+1e-9]
/// or has an imaginary part above 1e-10.
template <typename Real>
Real born_weight(const DensityOperator<Real>& rho, const StateVector<Real>& v) {
  if (!(rho.layout() == v.layout())) throw std::invalid_argument("born_weight: layout mismatch");
  const std::complex<Real> w = v.amplitudes().dot(rho.matrix() * v.amplitudes());
  if (std::abs(w.imag()) > Real(kNormTolerance)) throw std::domain_error("born_weight: complex expectation");
  if (w.real() < Real(-kPsdTolerance) || w.real() > Real(1 + kPsdTolerance))
    throw std::domain_error("born_weight: probability out of range");
  return std::clamp(w.real(), Real(0), Real(1));
}

template <typename Real>
std::complex<Real> inner(const StateVector<Real>& a, const StateVector<Real>& b) {
  if (!(a.layout() == b.layout())) throw std::invalid_argument("inner: layout mismatch");
  return a.amplitudes().dot(b.amplitudes());
}

template <typename Real>
std::vector<Real> eigvals_hermitian(const DensityOperator<Real>& rho) {
  return eigvals_hermitian(rho.matrix());
}

/// Largest absolute entry of a - b.
template <typename DerivedA, typename DerivedB>
typename DerivedA::RealScalar max_abs_distance(const Eigen::MatrixBase<DerivedA>& a,
                                               const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("max_abs_distance: shape mismatch");
  return (a - b).cwiseAbs().maxCoeff();
}

template <typename Real>
Real max_abs_distance(const DensityOperator<Real>& a, const DensityOperator<Real>& b) {
  if (!(a.layout() == b.layout())) throw std::invalid_argument("max_abs_distance: layout mismatch");
  return max_abs_distance(a.matrix(), b.matrix());
}

}  // namespace pingpong
