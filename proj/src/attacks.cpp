#include "pingpong/attacks.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace pingpong::attacks {

namespace {

constexpr Role kTravelAncilla[] = {Role::Travel, Role::Ancilla};
constexpr Role kTravelModes[] = {Role::Travel, Role::ModeX, Role::ModeY};

// Level indices inside a {vac, 0, 1} mode, and the (t, x, y) basis index.
constexpr int kVac = 0, kZero = 1, kOne = 2;
constexpr int txy(int t, int x, int y) { return 9 * t + 3 * x + y; }

int measure_travel_bz(State& state, AttackContext& ctx, RandomSource& rng) {
  const int dim = state.layout().dim_of(Role::Travel);
  auto result = measure(state, computational_basis(Role::Travel, dim), rng);
  state = std::move(result.post);
  const int bit = bit_of_level(dim, static_cast<int>(result.outcome));
  ctx.record(bit < 0 ? "bz:vac" : "bz:" + std::to_string(bit));
  return bit;
}

}  // namespace

void AttackContext::set_guess(int bit) {
  if (guess_) throw std::logic_error("attack guess already set for this round");
  guess_ = bit;
}

State AttackStrategy::on_b_to_a(State state, AttackContext&, RandomSource&) const { return state; }
State AttackStrategy::on_a_to_b(State state, AttackContext&, RandomSource&) const { return state; }

// The post-measurement carrier is the basis state Eve read, so forwarding the
// collapsed mode is the same as resending a freshly prepared |outcome>.
State OpaqueAttack::on_b_to_a(State state, AttackContext& ctx, RandomSource& rng) const {
  ctx.b_to_a_outcome = measure_travel_bz(state, ctx, rng);
  return state;
}

State OpaqueAttack::on_a_to_b(State state, AttackContext& ctx, RandomSource& rng) const {
  const int bit = measure_travel_bz(state, ctx, rng);
  if (bit >= 0) ctx.set_guess(bit);
  return state;
}

TranslucentAttack::TranslucentAttack(double disturbance) : disturbance_(disturbance) {
  if (!(disturbance >= 0.0 && disturbance <= 1.0))
    throw std::invalid_argument("translucent attack: D must lie in [0,1]");
}

std::string TranslucentAttack::name() const {
  return to_string(AttackSpec{AttackKind::Translucent, disturbance_});
}

State TranslucentAttack::on_b_to_a(State state, AttackContext& ctx, RandomSource&) const {
  if (state.layout().dim_of(Role::Travel) != 2)
    throw std::invalid_argument("translucent attack needs a qubit travel subsystem");
  State joint = tensor(state, State::basis(SubsystemLayout{{Role::Ancilla, 2}}, {0}));
  ctx.record("ancilla");
  return apply_on(joint, translucent_interaction(disturbance_), kTravelAncilla, OpContract::Renormalize);
}

State TranslucentAttack::on_a_to_b(State state, AttackContext& ctx, RandomSource& rng) const {
  const MeasurementBasis<double> basis(SubsystemLayout{{Role::Travel, 2}, {Role::Ancilla, 2}},
                                      {eve_phi_identity(), eve_phi_z()});
  auto result = measure(state, basis, rng);
  if (result.outcome == basis.residual_outcome())
    throw std::logic_error("translucent attack: (travel, ancilla) left Eve's measurement subspace");
  ctx.record(result.outcome == 0 ? "phi:I" : "phi:Z");
  ctx.set_guess(static_cast<int>(result.outcome));
  return std::move(result.post);
}

State WojcikAttack::on_b_to_a(State state, AttackContext& ctx, RandomSource&) const {
  if (state.layout().dim_of(Role::Travel) == 2) state = embed(state, Role::Travel, mode_embedding());
  const SubsystemLayout modes{{Role::ModeX, 3}, {Role::ModeY, 3}};
  State joint = tensor(state, State::basis(modes, {kVac, kZero}));
  ctx.record("q");
  return apply_on(joint, wojcik_forward(), kTravelModes, OpContract::NormPreserving);
}

State WojcikAttack::on_a_to_b(State state, AttackContext& ctx, RandomSource&) const {
  ctx.record("q_inverse");
  return apply_on(state, wojcik_inverse(), kTravelModes, OpContract::NormPreserving);
}

State CaiMeasureAttack::on_a_to_b(State state, AttackContext& ctx, RandomSource& rng) const {
  const int bit = measure_travel_bz(state, ctx, rng);
  if (bit >= 0) ctx.set_guess(bit);
  return state;
}

// ---------------------------------------------------------------------------

AttackSpec parse_attack(std::string_view text, double default_disturbance) {
  auto check_d = [](double d) {
    if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("attack disturbance D must lie in [0,1]");
    return d;
  };
  if (text == "none") return {AttackKind::None, 0.0};
  if (text == "opaque") return {AttackKind::Opaque, 0.0};
  if (text == "wojcik") return {AttackKind::Wojcik, 0.0};
  if (text == "cai") return {AttackKind::Cai, 0.0};
  if (text == "translucent") return {AttackKind::Translucent, check_d(default_disturbance)};
  constexpr std::string_view prefix = "translucent:D=";
  if (text.starts_with(prefix)) {
    const std::string value(text.substr(prefix.size()));
    std::size_t used = 0;
    double d = 0;
    try {
      d = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size())
      throw std::invalid_argument("malformed disturbance in attack '" + std::string(text) + "'");
    return {AttackKind::Translucent, check_d(d)};
  }
  throw std::invalid_argument("unknown attack '" + std::string(text) + "'");
}

std::string to_string(const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackKind::None: return "none";
    case AttackKind::Opaque: return "opaque";
    case AttackKind::Wojcik: return "wojcik";
    case AttackKind::Cai: return "cai";
    case AttackKind::Translucent: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "translucent:D=%.12g", spec.disturbance);
      return buf;
    }
  }
  return "?";
}

std::unique_ptr<const AttackStrategy> make_attack(const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackKind::None: return std::make_unique<NoAttack>();
    case AttackKind::Opaque: return std::make_unique<OpaqueAttack>();
    case AttackKind::Translucent: return std::make_unique<TranslucentAttack>(spec.disturbance);
    case AttackKind::Wojcik: return std::make_unique<WojcikAttack>();
    case AttackKind::Cai: return std::make_unique<CaiMeasureAttack>();
  }
  throw std::invalid_argument("unknown attack kind");
}

// ---------------------------------------------------------------------------

CMatrix<double> translucent_interaction(double disturbance) {
  const double f = std::sqrt(1.0 - disturbance);
  const double d = std::sqrt(disturbance);
  // (travel, ancilla) index = 2 t + a.
  CMatrix<double> k = CMatrix<double>::Zero(4, 4);
  k(0b00, 0b00) = f;
  k(0b11, 0b00) = d;
  k(0b11, 0b10) = f;
  k(0b00, 0b10) = d;
  return k;
}

State eve_phi_identity() {
  return bell_state(BellState::PhiPlus, Role::Travel, Role::Ancilla);
}

State eve_phi_z() {
  return bell_state(BellState::PhiMinus, Role::Travel, Role::Ancilla);
}

CMatrix<double> wojcik_forward() {
  const double h = 1.0 / std::sqrt(2.0);
  CMatrix<double> q = CMatrix<double>::Zero(27, 27);
  q(txy(kZero, kZero, kVac), txy(kZero, kVac, kZero)) = h;
  q(txy(kVac, kZero, kOne), txy(kZero, kVac, kZero)) = h;
  q(txy(kVac, kOne, kZero), txy(kOne, kVac, kZero)) = h;
  q(txy(kOne, kOne, kVac), txy(kOne, kVac, kZero)) = h;
  return q;
}

CMatrix<double> wojcik_inverse() {
  const double h = 1.0 / std::sqrt(2.0);
  CMatrix<double> r = wojcik_forward().adjoint();
  r(txy(kOne, kVac, kOne), txy(kVac, kOne, kZero)) = h;
  r(txy(kOne, kVac, kOne), txy(kOne, kOne, kVac)) = -h;
  return r;
}

CMatrix<double> mode_embedding() {
  CMatrix<double> e = CMatrix<double>::Zero(3, 2);
  e(kZero, 0) = 1;
  e(kOne, 1) = 1;
  return e;
}

}  // namespace pingpong::attacks
