#include "pingpong/analysis.hpp"
#include "pingpong/information.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace pingpong;
using namespace pingpong::analysis;

namespace {

const SubsystemLayout kHT{{Role::Home, 2}, {Role::Travel, 2}};

/// Plain-formula oracle for the Fig. 2 quantities, independent of the library.
struct Formula {
  double q, i_ab, l_plus, l_minus, i_ae, p_i;
};

Formula formula(double p0, double d) {
  const double p1 = 1 - p0;
  const double q = 0.75 - p0 * p1 * (2 * d - 1);
  auto h = [](double x) { return x > 0 ? -x * std::log2(x) : 0.0; };
  const double s = std::sqrt(p0 * p1 + (p0 - p1) * (p0 - p1) * d * (1 - d));
  return {q, 1 - h(q) - h(1 - q), 0.5 + s, 0.5 - s, h(0.5 + s) + h(0.5 - s), 0.5 + (p0 - p1) * std::sqrt(d * (1 - d))};
}

/// Eve's interaction on the EPR pair followed by sqrt(p0) I + sqrt(p1) Z.
State coherent_post_encoding(double p0, double d) {
  const State epr = bell_state(BellState::PsiPlus, Role::Home, Role::Travel);
  const State chi0 = State::basis(SubsystemLayout{{Role::Ancilla, 2}}, {0});
  const State psi1 = apply_on(tensor(epr, chi0), attacks::translucent_interaction(d), {Role::Travel, Role::Ancilla},
                              OpContract::NormPreserving);
  CMatrix<double> encode = CMatrix<double>::Zero(2, 2);
  encode(0, 0) = std::sqrt(p0) + std::sqrt(1 - p0);
  encode(1, 1) = std::sqrt(p0) - std::sqrt(1 - p0);
  return apply_on(psi1, encode, {Role::Travel}, OpContract::NormPreserving);
}

}  // namespace

TEST_CASE("encoded state examples") {
  const double h = 1 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(inner(encoded_state(1.0), bell_state(BellState::PsiPlus, Role::Home, Role::Travel))) - 1) < 1e-15);
  CHECK(std::abs(std::abs(inner(encoded_state(0.0), bell_state(BellState::PsiMinus, Role::Home, Role::Travel))) - 1) < 1e-15);
  const auto half = encoded_state(0.5);
  CHECK(std::abs(half.amplitude(1) - 1.0) < 1e-15);
  CHECK(std::abs(half.amplitude(2)) < 1e-15);
  const auto s = encoded_state(0.3);
  CHECK(std::abs(s.amplitude(1) - (std::sqrt(0.3) + std::sqrt(0.7)) * h) < 1e-15);
  CHECK(std::abs(s.amplitude(2) - (std::sqrt(0.3) - std::sqrt(0.7)) * h) < 1e-15);
  CHECK_THROWS_AS(encoded_state(1.1), std::invalid_argument);
}

TEST_CASE("opaque closed form against the overlap oracle") {
  for (int k = 0; k <= 10; ++k) {
    const double p0 = k / 10.0;
    const auto r = opaque_closed_form(p0);
    const auto psi = encoded_state(p0);
    const double q0 = 1 - std::norm(inner(psi, State::basis(kHT, {1, 0})));
    const double q1 = 1 - std::norm(inner(psi, State::basis(kHT, {0, 1})));
    CHECK(std::abs(r.q0 - q0) < 1e-15);
    CHECK(std::abs(r.q1 - q1) < 1e-15);
    CHECK(std::abs(r.q0 + r.q1 - 1) < 1e-12);
    CHECK(r.q == 0.5);
    CHECK(r.i_ab == 0.0);
  }
  const auto half = opaque_closed_form(0.5);
  CHECK(half.q0 == 1.0);
  CHECK(half.q1 == 0.0);
  const auto one = opaque_closed_form(1.0);
  CHECK(one.q0 == 0.5);
  CHECK(one.q1 == 0.5);
}

TEST_CASE("property: opaque QBER is exactly one half for any p0") {
  testing::Gen gen(31);
  for (int c = 0; c < 20000; ++c) {
    const auto r = opaque_closed_form(gen.uniform());
    CHECK(r.q == 0.5);
    CHECK(r.i_ab == 0.0);
  }
}

TEST_CASE("translucent closed form examples") {
  const auto a = translucent_closed_form(0.5, 0.0);
  CHECK(a.qber_fidelity == 1.0);
  CHECK(a.i_ab == 1.0);
  CHECK(std::abs(a.i_ae) < 1e-12);

  const auto b = translucent_closed_form(0.5, 0.5);
  CHECK(std::abs(b.qber_fidelity - 0.75) < 1e-15);
  CHECK(std::abs(b.i_ab - (1 + 0.75 * std::log2(0.75) + 0.25 * std::log2(0.25))) < 1e-15);
  CHECK(std::abs(b.i_ab - 0.18872) < 1e-5);

  // p0 = 1, D = 1/2: p(I) = 1/2 + sqrt(1/4) = 1
  CHECK(std::abs(translucent_closed_form(1.0, 0.5).p_i - 1.0) < 1e-15);

  const auto c = translucent_closed_form(0.3, 0.1);
  const double s = std::sqrt(0.21 + 0.16 * 0.09);
  CHECK(std::abs(c.eigenvalues[0] - (0.5 + s)) < 1e-15);
  CHECK(std::abs(c.eigenvalues[1] - (0.5 - s)) < 1e-15);
  CHECK(c.eigenvalues[2] == 0.0);
  CHECK(c.eigenvalues[3] == 0.0);
  CHECK_THROWS_AS(translucent_closed_form(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("closed form matches the plain-formula oracle and an external eigensolver") {
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const double p0 = i / 10.0, d = j / 10.0;
      const auto r = translucent_closed_form(p0, d);
      const auto f = formula(p0, d);
      CHECK(std::abs(r.qber_fidelity - f.q) < 1e-15);
      CHECK(std::abs(r.i_ab - f.i_ab) < 1e-12);
      CHECK(std::abs(r.i_ae - f.i_ae) < 1e-12);
      CHECK(std::abs(r.p_i - f.p_i) < 1e-15);

      Eigen::SelfAdjointEigenSolver<CMatrix<double>> at2(r.rho_at2.matrix());
      CHECK(std::abs(at2.eigenvalues()(3) - f.l_plus) < 1e-10);
      CHECK(std::abs(at2.eigenvalues()(2) - f.l_minus) < 1e-10);
      CHECK(std::abs(at2.eigenvalues()(1)) < 1e-10);
    }
  }
}

TEST_CASE("exact engine reproduces the closed form on the full grid") {
  for (int i = 0; i <= 10; ++i) {
    for (int j = 0; j <= 10; ++j) {
      const double p0 = i / 10.0, d = j / 10.0;
      const auto closed = translucent_closed_form(p0, d);
      const auto exact = translucent_exact_engine(p0, d);
      const auto dist = distance(closed, exact);
      CHECK_MESSAGE(dist.max() < 1e-10, "p0=", p0, " D=", d, " rho_full=", dist.rho_full, " rho_ht3=", dist.rho_ht3);
      CHECK(std::abs(exact.control_detection - d) < 1e-12);
    }
  }
}

TEST_CASE("report invariants") {
  testing::Gen gen(77);
  for (int c = 0; c < 300; ++c) {
    const double p0 = gen.uniform(), d = gen.uniform();
    const auto r = translucent_closed_form(p0, d);
    CHECK(std::abs(r.p_i + r.p_z - 1) < 1e-12);
    CHECK(std::abs(r.eigenvalues[0] + r.eigenvalues[1] + r.eigenvalues[2] + r.eigenvalues[3] - 1) < 1e-12);
    CHECK(r.qber_fidelity >= 0.0);
    CHECK(r.qber_fidelity <= 1.0);
    CHECK(std::abs(translucent_closed_form(1 - p0, d).qber_fidelity - r.qber_fidelity) < 1e-12);
    CHECK(std::abs(translucent_closed_form(0.5, d).i_ae) < 1e-12);
  }
}

TEST_CASE("p0 = 1/2: Eve's ancilla state is pure for every D") {
  for (int j = 0; j <= 10; ++j) {
    const auto r = translucent_exact_engine(0.5, j / 10.0);
    CHECK(std::abs(r.eigenvalues[0] - 1) < 1e-12);
    CHECK(std::abs(r.i_ae) < 1e-12);
    CHECK(r.i_ab >= r.i_ae);
  }
}

TEST_CASE("whole-system matrix is the classical mixture over Alice's choice") {
  // The tripartite matrix is p0 |psi1><psi1| + p1 Z|psi1><psi1|Z, while the
  // reduced matrices follow the coherent encoding sqrt(p0) I + sqrt(p1) Z.
  // Both give the same distribution for Eve's phi measurement.
  const double p0 = 0.3, d = 0.2;
  const auto r = translucent_closed_form(p0, d);
  const auto coherent = Density::pure(coherent_post_encoding(p0, d));
  CHECK(max_abs_distance(coherent, r.rho_full) > 0.1);

  const auto ensemble_ta = partial_trace(r.rho_full, {Role::Travel, Role::Ancilla});
  CHECK(std::abs(born_weight(ensemble_ta, attacks::eve_phi_identity()) - r.p_i) < 1e-12);
  CHECK(std::abs(born_weight(ensemble_ta, attacks::eve_phi_z()) - r.p_z) < 1e-12);
}

TEST_CASE("sweep rows are p0-major and cover the grid") {
  const auto grid = default_grid();
  REQUIRE(grid.size() == 11);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 1.0);
  const auto rows = sweep(grid, grid);
  REQUIRE(rows.size() == 121);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].p0 == grid[i / 11]);
    CHECK(rows[i].d == grid[i % 11]);
    CHECK(std::abs(rows[i].q_formula - rows[i].q_exact) < 1e-10);
    const auto& mirror = rows[(10 - i / 11) * 11 + i % 11];
    CHECK(std::abs(rows[i].q_formula - mirror.q_formula) < 1e-12);
    CHECK(std::abs(rows[i].i_ab - mirror.i_ab) < 1e-12);
    CHECK(std::abs(rows[i].i_ae - mirror.i_ae) < 1e-12);
  }
  const auto center = rows[5 * 11];
  CHECK(std::abs(center.i_ab - 1) < 1e-12);
  CHECK(std::abs(center.i_ae) < 1e-12);
  CHECK_THROWS_AS(sweep(std::vector<double>{}, grid), std::invalid_argument);
  CHECK_THROWS_AS(sweep(std::vector<double>{1.5}, grid), std::invalid_argument);
}

TEST_CASE("DPD click probability and the returned decoy") {
  CHECK(std::abs(dpd_click_probability(true) - 0.5) < 1e-12);
  CHECK(dpd_click_probability(false) < 1e-15);
  const auto plus = plus_state(Role::Travel, 3);
  CHECK(std::abs(born_weight(wojcik_returned_decoy(0), plus) - 1) < 1e-12);
  const auto z = wojcik_returned_decoy(1);
  CHECK(std::abs(z(1, 1) - 0.5) < 1e-15);
  CHECK(std::abs(z(2, 2) - 0.5) < 1e-15);
  CHECK(std::abs(z(1, 2)) < 1e-15);
  CHECK(std::abs(z(0, 0)) < 1e-15);
  CHECK_THROWS_AS(wojcik_returned_decoy(2), std::invalid_argument);
}

TEST_CASE("exact fidelity QBER by attack") {
  using attacks::AttackKind;
  CHECK(std::abs(*exact_qber_fidelity({AttackKind::None, 0}, 0.3)) < 1e-15);
  CHECK(*exact_qber_fidelity({AttackKind::Opaque, 0}, 0.3) == 0.5);
  CHECK(std::abs(*exact_qber_fidelity({AttackKind::Translucent, 0.5}, 0.5) - 0.75) < 1e-15);
  CHECK_FALSE(exact_qber_fidelity({AttackKind::Wojcik, 0}, 0.5).has_value());
  CHECK_FALSE(exact_qber_fidelity({AttackKind::Cai, 0}, 0.5).has_value());
}
