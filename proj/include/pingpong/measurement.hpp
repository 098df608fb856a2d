#pragma once

#include "pingpong/random.hpp"
#include "pingpong/state.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace pingpong {

/// Rank-1 projective measurement on a group of subsystems. If the vectors do
/// not span the target space, an extra "residual" outcome (index
/// `size()`) projects onto the orthogonal complement.
template <typename Real>
class MeasurementBasis {
 public:
  /// Throws std::invalid_argument unless the vectors share `layout` and are
  /// pairwise orthonormal within 1e-10.
  MeasurementBasis(SubsystemLayout layout, std::vector<StateVector<Real>> vectors)
      : layout_(std::move(layout)), vectors_(std::move(vectors)) {
    if (vectors_.empty() || static_cast<int>(vectors_.size()) > layout_.total_dim())
      throw std::invalid_argument("measurement basis size out of range");
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
      if (!(vectors_[i].layout() == layout_)) throw std::invalid_argument("basis vector layout mismatch");
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(inner(vectors_[i], vectors_[j])) > Real(kNormTolerance))
          throw std::invalid_argument("basis vectors are not orthogonal");
    }
    roles_.reserve(layout_.size());
    for (const auto& p : layout_.parts()) roles_.push_back(p.role);
  }

  [[nodiscard]] const SubsystemLayout& layout() const { return layout_; }
  [[nodiscard]] std::span<const Role> targets() const { return roles_; }
  [[nodiscard]] const std::vector<StateVector<Real>>& vectors() const { return vectors_; }
  [[nodiscard]] std::size_t size() const { return vectors_.size(); }
  [[nodiscard]] bool complete() const { return static_cast<int>(vectors_.size()) == layout_.total_dim(); }
  /// Number of outcomes including the residual one.
  [[nodiscard]] std::size_t outcome_count() const { return complete() ? size() : size() + 1; }
  [[nodiscard]] std::size_t residual_outcome() const { return size(); }

 private:
  SubsystemLayout layout_;
  std::vector<StateVector<Real>> vectors_;
  std::vector<Role> roles_;
};

template <typename Real>
struct MeasurementBranch {
  std::size_t outcome;
  Real probability;
  std::optional<StateVector<Real>> post;  // empty when probability is zero
};

template <typename Real>
struct MeasurementResult {
  std::size_t outcome;
  Real probability;
  StateVector<Real> post;
};

inline constexpr double kZeroBranch = 1e-15;

/// Every outcome with its exact Born weight and renormalized post state.
template <typename Real>
std::vector<MeasurementBranch<Real>> measurement_branches(const StateVector<Real>& state,
                                                          const MeasurementBasis<Real>& basis) {
  for (const auto& p : basis.layout().parts())
    if (state.layout().dim_of(p.role) != p.dim)
      throw std::invalid_argument("measurement basis does not fit subsystem " + to_string(p.role));
  const IndexSplit split = split_index(state.layout(), basis.targets());
  const CMatrix<Real> m = reshape_targets<Real>(state.amplitudes(), split);
  CMatrix<Real> residual = m;

  std::vector<MeasurementBranch<Real>> branches;
  auto push = [&](std::size_t outcome, const CMatrix<Real>& projected) {
    const Real p = projected.squaredNorm();
    if (p <= Real(kZeroBranch)) {
      branches.push_back({outcome, Real(0), std::nullopt});
      return;
    }
    branches.push_back(
        {outcome, p, StateVector<Real>::normalized(state.layout(), flatten_targets<Real>(projected, split))});
  };
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto& v = basis.vectors()[k].amplitudes();
    const CMatrix<Real> projected = v * (v.adjoint() * m);
    residual -= projected;
    push(k, projected);
  }
  if (!basis.complete()) push(basis.residual_outcome(), residual);
  return branches;
}

/// Samples one outcome by the Born rule. Throws std::logic_error if a
/// zero-probability branch is selected.
template <typename Real>
MeasurementResult<Real> measure(const StateVector<Real>& state, const MeasurementBasis<Real>& basis,
                                RandomSource& rng) {
  auto branches = measurement_branches(state, basis);
  const Real u = static_cast<Real>(rng.uniform());
  Real total = 0;
  for (const auto& b : branches) total += b.probability;
  Real cumulative = 0;
  std::size_t chosen = branches.size();
  for (std::size_t k = 0; k < branches.size(); ++k) {
    cumulative += branches[k].probability / total;
    if (u < cumulative) {
      chosen = k;
      break;
    }
  }
  if (chosen == branches.size()) {
    // Rounding left u above the final cumulative sum; take the last live branch.
    for (std::size_t k = branches.size(); k-- > 0;)
      if (branches[k].post) {
        chosen = k;
        break;
      }
  }
  auto& b = branches.at(chosen);
  if (!b.post) throw std::logic_error("measure: sampled a zero-probability outcome");
  return {b.outcome, b.probability, std::move(*b.post)};
}

// ---------------------------------------------------------------------------
// Standard states and bases. Qubit values on a 3-level mode sit above |vac>.

template <typename Real = double>
StateVector<Real> qubit_state(Role role, int dim, std::complex<Real> a0, std::complex<Real> a1) {
  CVector<Real> amps = CVector<Real>::Zero(dim);
  amps(level_of_bit(dim, 0)) = a0;
  amps(level_of_bit(dim, 1)) = a1;
  return StateVector<Real>::normalized(SubsystemLayout{{role, dim}}, std::move(amps));
}

template <typename Real = double>
StateVector<Real> plus_state(Role role, int dim = 2) {
  return qubit_state<Real>(role, dim, 1, 1);
}

template <typename Real = double>
StateVector<Real> minus_state(Role role, int dim = 2) {
  return qubit_state<Real>(role, dim, 1, -1);
}

/// Level-by-level basis of one subsystem (B_z, with |vac> first on modes).
template <typename Real = double>
MeasurementBasis<Real> computational_basis(Role role, int dim) {
  SubsystemLayout layout{{role, dim}};
  std::vector<StateVector<Real>> vectors;
  for (int level = 0; level < dim; ++level) vectors.push_back(StateVector<Real>::basis(layout, {level}));
  return MeasurementBasis<Real>(std::move(layout), std::move(vectors));
}

enum class BellState { PsiPlus = 0, PsiMinus = 1, PhiPlus = 2, PhiMinus = 3 };

/// Bell vector on (first, second) where `second` may be a 3-level mode.
template <typename Real = double>
StateVector<Real> bell_state(BellState which, Role first, Role second, int second_dim = 2) {
  SubsystemLayout layout{{first, 2}, {second, second_dim}};
  CVector<Real> amps = CVector<Real>::Zero(layout.total_dim());
  auto at = [&](int a, int b) -> std::complex<Real>& { return amps(a * second_dim + level_of_bit(second_dim, b)); };
  const Real sign = (which == BellState::PsiMinus || which == BellState::PhiMinus) ? Real(-1) : Real(1);
  if (which == BellState::PsiPlus || which == BellState::PsiMinus) {
    at(0, 1) = 1;
    at(1, 0) = sign;
  } else {
    at(0, 0) = 1;
    at(1, 1) = sign;
  }
  return StateVector<Real>::normalized(std::move(layout), std::move(amps));
}

/// {psi+, psi-, phi+, phi-}; incomplete (residual = vacuum) on a 3-level mode.
template <typename Real = double>
MeasurementBasis<Real> bell_basis(Role first, Role second, int second_dim = 2) {
  std::vector<StateVector<Real>> vectors;
  for (auto w : {BellState::PsiPlus, BellState::PsiMinus, BellState::PhiPlus, BellState::PhiMinus})
    vectors.push_back(bell_state<Real>(w, first, second, second_dim));
  auto layout = vectors.front().layout();
  return MeasurementBasis<Real>(std::move(layout), std::move(vectors));
}

/// Two-outcome test {|v><v|, residual}.
template <typename Real>
MeasurementBasis<Real> projector_test(const StateVector<Real>& v) {
  return MeasurementBasis<Real>(v.layout(), {v});
}

}  // namespace pingpong
