#include "pingpong/analysis.hpp"

#include "pingpong/information.hpp"
#include "pingpong/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace pingpong::analysis {

namespace {

constexpr Role kTravel[] = {Role::Travel};
constexpr Role kTravelAncilla[] = {Role::Travel, Role::Ancilla};
constexpr Role kHomeTravel[] = {Role::Home, Role::Travel};
constexpr Role kTravelModes[] = {Role::Travel, Role::ModeX, Role::ModeY};

const SubsystemLayout kLayoutTA{{Role::Travel, 2}, {Role::Ancilla, 2}};
const SubsystemLayout kLayoutHT{{Role::Home, 2}, {Role::Travel, 2}};
const SubsystemLayout kLayoutHTA{{Role::Home, 2}, {Role::Travel, 2}, {Role::Ancilla, 2}};

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

CMatrix<double> pauli_z(int dim) {
  CMatrix<double> z = CMatrix<double>::Identity(dim, dim);
  z(level_of_bit(dim, 1), level_of_bit(dim, 1)) = -1.0;
  return z;
}

}  // namespace

State encoded_state(double p0) {
  check_unit(p0, "p0");
  const CVector<double> amps = std::sqrt(p0) * bell_state(BellState::PsiPlus, Role::Home, Role::Travel).amplitudes() +
                               std::sqrt(1.0 - p0) * bell_state(BellState::PsiMinus, Role::Home, Role::Travel).amplitudes();
  return State(kLayoutHT, amps);
}

OpaqueReport opaque_closed_form(double p0) {
  check_unit(p0, "p0");
  // Eve's B_z read r leaves the pair in |1-r>_h |r>_t; the overlaps of the
  // encoded state with |10> and |01> are (sqrt p0 -+ sqrt p1)/sqrt2.
  const double root_pp = std::sqrt(p0 * (1.0 - p0));
  OpaqueReport r;
  r.p0 = p0;
  r.q0 = 0.5 + root_pp;
  r.q1 = 0.5 - root_pp;
  // root_pp <= 1/2 makes q1 exact and the rounding of q0 cancels in the sum.
  r.q = (r.q0 + r.q1) / 2;
  r.i_ab = binary_capacity(r.q);
  return r;
}

TranslucentReport translucent_closed_form(double p0, double d) {
  check_unit(p0, "p0");
  check_unit(d, "D");
  const double p1 = 1.0 - p0;
  const double f = 1.0 - d;
  const double bias = p0 - p1;
  const double root_df = std::sqrt(d * f);
  const double root_pp = std::sqrt(p0 * p1);

  CMatrix<double> at2 = CMatrix<double>::Zero(4, 4);
  at2(0, 0) = 0.5 + root_pp;
  at2(3, 3) = 0.5 - root_pp;
  at2(0, 3) = at2(3, 0) = bias * root_df;

  const double spread = std::sqrt(p0 * p1 + bias * bias * d * f);
  std::array<double, 4> eig{0.5 + spread, 0.5 - spread, 0.0, 0.0};
  std::sort(eig.begin(), eig.end(), std::greater<>());

  // (home, travel, ancilla): nonzero rows/cols |000>, |011>, |100>, |111>.
  CMatrix<double> full = CMatrix<double>::Zero(8, 8);
  const int a = 0b000, b = 0b011, c = 0b100, e = 0b111;
  full(a, a) = d / 2;
  full(b, b) = f / 2;
  full(c, c) = f / 2;
  full(e, e) = d / 2;
  full(a, b) = full(b, a) = bias * root_df / 2;
  full(a, c) = full(c, a) = root_df / 2;
  full(a, e) = full(e, a) = bias * d / 2;
  full(b, c) = full(c, b) = bias * f / 2;
  full(b, e) = full(e, b) = root_df / 2;
  full(c, e) = full(e, c) = bias * root_df / 2;

  CMatrix<double> ht3 = CMatrix<double>::Zero(4, 4);
  const double shift = 0.5 * std::sqrt(p0 * (1.0 - p0)) * (2 * d - 1);
  ht3(0, 0) = ht3(1, 1) = 0.25 + shift;
  ht3(2, 2) = ht3(3, 3) = 0.25 - shift;
  ht3(0, 2) = ht3(2, 0) = ht3(1, 3) = ht3(3, 1) = 0.5 * root_df;

  const double q = 0.75 - p0 * (1.0 - p0) * (2 * d - 1);
  return TranslucentReport{
      .p0 = p0,
      .d = d,
      .rho_at2 = Density(kLayoutTA, at2),
      .eigenvalues = eig,
      .i_ae = entropy_term(eig[0]) + entropy_term(eig[1]),
      .rho_full = Density(kLayoutHTA, full),
      .p_i = 0.5 + bias * root_df,
      .p_z = 0.5 - bias * root_df,
      .rho_ht3 = Density(kLayoutHT, ht3),
      .qber_fidelity = q,
      .i_ab = binary_capacity(q),
      .control_detection = d,
  };
}

TranslucentReport translucent_exact_engine(double p0, double d) {
  check_unit(p0, "p0");
  check_unit(d, "D");
  const double p1 = 1.0 - p0;

  const State epr = bell_state(BellState::PsiPlus, Role::Home, Role::Travel);
  const State chi0 = State::basis(SubsystemLayout{{Role::Ancilla, 2}}, {0});
  const State psi1 = apply_on(tensor(epr, chi0), attacks::translucent_interaction(d), kTravelAncilla,
                              OpContract::NormPreserving);

  const CMatrix<double> z = pauli_z(2);
  const CMatrix<double> coherent = std::sqrt(p0) * CMatrix<double>::Identity(2, 2) + std::sqrt(p1) * z;
  const State psi2 = apply_on(psi1, coherent, kTravel, OpContract::NormPreserving);
  const Density rho2 = Density::pure(psi2);

  const Density rho_at2 = partial_trace(rho2, kTravelAncilla);
  const auto eig_list = eigvals_hermitian(rho_at2);
  std::array<double, 4> eig{};
  std::copy_n(eig_list.begin(), 4, eig.begin());

  const double weights[] = {p0, p1};
  const Density ensemble[] = {Density::pure(psi1), Density::pure(apply_on(psi1, z, kTravel))};
  Density rho_full = Density::mixture(std::span<const double>(weights), std::span<const Density>(ensemble));

  const State phi_i = attacks::eve_phi_identity();
  const State phi_z = attacks::eve_phi_z();
  const MeasurementBasis<double> eve_basis(kLayoutTA, {phi_i, phi_z});

  // Bob's pair averaged over Eve's outcomes.
  std::vector<double> branch_weights;
  std::vector<Density> branch_states;
  for (const auto& branch : measurement_branches(psi2, eve_basis)) {
    if (!branch.post) continue;
    branch_weights.push_back(branch.probability);
    branch_states.push_back(partial_trace(Density::pure(*branch.post), kHomeTravel));
  }
  Density rho_ht3 = Density::mixture(std::span<const double>(branch_weights), std::span<const Density>(branch_states));

  const double q = 1.0 - born_weight(rho_ht3, encoded_state(p0));

  const Density rho_ht1 = partial_trace(Density::pure(psi1), kHomeTravel);
  const double detection = born_weight(rho_ht1, State::basis(kLayoutHT, {0, 0})) +
                           born_weight(rho_ht1, State::basis(kLayoutHT, {1, 1}));

  return TranslucentReport{
      .p0 = p0,
      .d = d,
      .rho_at2 = rho_at2,
      .eigenvalues = eig,
      .i_ae = von_neumann_entropy(rho_at2),
      .rho_full = std::move(rho_full),
      .p_i = born_weight(rho_at2, phi_i),
      .p_z = born_weight(rho_at2, phi_z),
      .rho_ht3 = std::move(rho_ht3),
      .qber_fidelity = q,
      .i_ab = binary_capacity(q),
      .control_detection = detection,
  };
}

double ReportDistance::max() const {
  return std::max({rho_at2, eigenvalues, i_ae, rho_full, p_i, p_z, rho_ht3, qber, i_ab, control_detection});
}

ReportDistance distance(const TranslucentReport& a, const TranslucentReport& b) {
  ReportDistance r;
  r.rho_at2 = max_abs_distance(a.rho_at2, b.rho_at2);
  for (std::size_t i = 0; i < 4; ++i) r.eigenvalues = std::max(r.eigenvalues, std::abs(a.eigenvalues[i] - b.eigenvalues[i]));
  r.i_ae = std::abs(a.i_ae - b.i_ae);
  r.rho_full = max_abs_distance(a.rho_full, b.rho_full);
  r.p_i = std::abs(a.p_i - b.p_i);
  r.p_z = std::abs(a.p_z - b.p_z);
  r.rho_ht3 = max_abs_distance(a.rho_ht3, b.rho_ht3);
  r.qber = std::abs(a.qber_fidelity - b.qber_fidelity);
  r.i_ab = std::abs(a.i_ab - b.i_ab);
  r.control_detection = std::abs(a.control_detection - b.control_detection);
  return r;
}

std::vector<double> default_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
  return grid;
}

std::vector<SweepRow> sweep(std::span<const double> p0_grid, std::span<const double> d_grid) {
  if (p0_grid.empty() || d_grid.empty()) throw std::invalid_argument("sweep: empty grid");
  for (double v : p0_grid) check_unit(v, "p0 grid value");
  for (double v : d_grid) check_unit(v, "D grid value");
  std::vector<SweepRow> rows;
  rows.reserve(p0_grid.size() * d_grid.size());
  for (double p0 : p0_grid) {
    for (double d : d_grid) {
      const auto closed = translucent_closed_form(p0, d);
      const auto exact = translucent_exact_engine(p0, d);
      rows.push_back({p0, d, closed.qber_fidelity, exact.qber_fidelity, closed.i_ab, closed.i_ae, closed.p_i,
                      closed.p_z, closed.control_detection});
    }
  }
  return rows;
}

Density wojcik_returned_decoy(int alice_op) {
  if (alice_op != 0 && alice_op != 1) throw std::invalid_argument("alice_op must be 0 or 1");
  const SubsystemLayout modes{{Role::ModeX, 3}, {Role::ModeY, 3}};
  State s = tensor(plus_state(Role::Travel, 3), State::basis(modes, {kVacuumLevel, level_of_bit(3, 0)}));
  s = apply_on(s, attacks::wojcik_forward(), kTravelModes, OpContract::NormPreserving);
  if (alice_op == 1) s = apply_on(s, pauli_z(3), kTravel);
  s = apply_on(s, attacks::wojcik_inverse(), kTravelModes, OpContract::NormPreserving);
  return partial_trace(Density::pure(s), kTravel);
}

double dpd_click_probability(bool eve_present) {
  if (eve_present) return born_weight(wojcik_returned_decoy(1), plus_state(Role::Travel, 3));
  const State returned = apply_on(plus_state(Role::Travel), pauli_z(2), kTravel);
  return born_weight(Density::pure(returned), plus_state(Role::Travel));
}

std::optional<double> exact_qber_fidelity(const attacks::AttackSpec& attack, double p0) {
  switch (attack.kind) {
    case attacks::AttackKind::None: {
      const State encoded = encoded_state(p0);
      return 1.0 - born_weight(Density::pure(encoded), encoded);
    }
    case attacks::AttackKind::Opaque: return opaque_closed_form(p0).q;
    case attacks::AttackKind::Translucent: return translucent_closed_form(p0, attack.disturbance).qber_fidelity;
    default: return std::nullopt;
  }
}

}  // namespace pingpong::analysis
