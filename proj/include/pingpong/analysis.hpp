#pragma once

#include "pingpong/attacks.hpp"
#include "pingpong/state.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace pingpong::analysis {

/// Everything the translucent-attack analysis produces for one (p0, D).
///
/// Matrix layouts (row-major, first subsystem most significant):
///   rho_at2  (travel, ancilla)        basis |0 chi0>, |0 chi1>, |1 chi0>, |1 chi1>
///   rho_full (home, travel, ancilla)
///   rho_ht3  (home, travel)
struct TranslucentReport {
  double p0 = 0;
  double d = 0;
  Density rho_at2;
  std::array<double, 4> eigenvalues{};  // descending
  double i_ae = 0;
  Density rho_full;
  double p_i = 0;
  double p_z = 0;
  Density rho_ht3;
  double qber_fidelity = 0;
  double i_ab = 0;
  double control_detection = 0;
};

struct OpaqueReport {
  double p0 = 0;
  double q0 = 0;  // Eve read |0> on the way to Alice
  double q1 = 0;  // Eve read |1>
  double q = 0;
  double i_ab = 0;
};

/// sqrt(p0)|psi+> + sqrt(1-p0)|psi-> on (home, travel).
State encoded_state(double p0);

/// Intercept-resend QBER: q0 = 1/2 + sqrt(p0 p1), q1 = 1/2 - sqrt(p0 p1),
/// i.e. one minus the encoded state's weight on |10> and |01>. Throws std::invalid_argument unless p0 lies in [0,1].
OpaqueReport opaque_closed_form(double p0);

/// Closed-form expressions, matrices filled entrywise.
TranslucentReport translucent_closed_form(double p0, double d);

/// Re-derivation from the ancilla interaction using only state-level
/// primitives (tensor, apply_on, partial_trace, measurement branches,
/// Jacobi eigenvalues). Alice's encoding is the coherent operator
/// sqrt(p0) Z^0 + sqrt(p1) Z^1, except for rho_full, which is the
/// whole-system ensemble p0 rho + p1 Z rho Z over Alice's bit.
TranslucentReport translucent_exact_engine(double p0, double d);

/// Largest per-field discrepancy between two reports (matrices entrywise).
struct ReportDistance {
  double rho_at2 = 0, eigenvalues = 0, i_ae = 0, rho_full = 0, p_i = 0, p_z = 0, rho_ht3 = 0, qber = 0, i_ab = 0,
         control_detection = 0;
  [[nodiscard]] double max() const;
};
ReportDistance distance(const TranslucentReport& a, const TranslucentReport& b);

struct SweepRow {
  double p0 = 0;
  double d = 0;
  double q_formula = 0;
  double q_exact = 0;
  double i_ab = 0;
  double i_ae = 0;
  double p_i = 0;
  double p_z = 0;
  double control_detection = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// 0, 0.1, ..., 1.0 computed as k / 10.
std::vector<double> default_grid();

/// One row per (p0, d), p0-major. Throws std::invalid_argument for empty
/// grids or values outside [0,1].
std::vector<SweepRow> sweep(std::span<const double> p0_grid, std::span<const double> d_grid);

/// <+|rho|+> for the decoy Bob gets back after Alice's Z^1, with or without
/// the vacuum-mode attack in line.
double dpd_click_probability(bool eve_present);

/// Decoy state Bob receives after Alice's Z^j with the vacuum-mode attack in
/// line, reduced to the travel mode (3-level, {vac, 0, 1}).
Density wojcik_returned_decoy(int alice_op);

/// Exact fidelity-convention QBER, where a closed form exists for the attack
/// (none, opaque, translucent).
std::optional<double> exact_qber_fidelity(const attacks::AttackSpec& attack, double p0);

}  // namespace pingpong::analysis
