#include "pingpong/protocol.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace pingpong;
using namespace pingpong::protocol;
using testing::qubits;

namespace {

const double kH = 1.0 / std::sqrt(2.0);

ProtocolConfig config_with(std::int64_t rounds, std::uint64_t seed) {
  ProtocolConfig c;
  c.rounds = rounds;
  c.master_seed = seed;
  return c;
}

double sigma5(double p, double n) { return 5 * std::sqrt(p * (1 - p) / n); }

}  // namespace

TEST_CASE("config validation") {
  ProtocolConfig c;
  CHECK_NOTHROW(c.validate());
  c.p0 = 1.2;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.rounds = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.sample_fraction = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.false_prob = -0.1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(parse_qber_convention("bell-decode") == QberConvention::BellDecode);
  CHECK(to_string(parse_qber_convention("fidelity")) == "fidelity");
  CHECK_THROWS_AS(parse_qber_convention("other"), std::invalid_argument);
}

TEST_CASE("bob_prepare") {
  const auto epr = bob_prepare(PhotonKind::True);
  CHECK(epr.layout() == qubits({Role::Home, Role::Travel}));
  CHECK(std::abs(epr.amplitude(1) - kH) < 1e-15);
  CHECK(std::abs(epr.amplitude(2) - kH) < 1e-15);
  CHECK(std::abs(epr.amplitude(0)) + std::abs(epr.amplitude(3)) == 0.0);
  const auto home = partial_trace(Density::pure(epr), {Role::Home});
  CHECK(std::abs(home(0, 0) - 0.5) < 1e-15);

  const auto decoy = bob_prepare(PhotonKind::False);
  CHECK(decoy.layout() == qubits({Role::Travel}));
  CHECK(std::abs(decoy.amplitude(0) - kH) < 1e-15);
  CHECK(std::abs(decoy.amplitude(1) - kH) < 1e-15);
}

TEST_CASE("alice_encode") {
  const auto minus = alice_encode(bob_prepare(PhotonKind::True), 1);
  CHECK(std::abs(std::abs(inner(minus, bell_state(BellState::PsiMinus, Role::Home, Role::Travel))) - 1.0) < 1e-15);
  const auto decoy = alice_encode(bob_prepare(PhotonKind::False), 1);
  CHECK(std::abs(std::abs(inner(decoy, minus_state(Role::Travel))) - 1.0) < 1e-15);
  const auto same = alice_encode(bob_prepare(PhotonKind::True), 0);
  CHECK((same.amplitudes() - bob_prepare(PhotonKind::True).amplitudes()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(alice_encode(State::basis(qubits({Role::Home}), {0}), 1), std::invalid_argument);
  CHECK_THROWS_AS(alice_encode(bob_prepare(PhotonKind::True), 2), std::invalid_argument);

  // The vacuum level of a photon mode is left alone.
  const SubsystemLayout mode{{Role::Travel, 3}};
  const auto vac = State::basis(mode, {kVacuumLevel});
  CHECK(std::abs(alice_encode(vac, 1).amplitude(0) - 1.0) < 1e-15);
}

TEST_CASE("control round: announcement and anti-correlation") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RandomSource rng(seed);
    const auto a = alice_control(bob_prepare(PhotonKind::True), rng);
    REQUIRE(a.bit.has_value());
    const auto check = bob_control_check(a.post, a.bit, rng);
    CHECK(check.home_bit == 1 - *a.bit);
    CHECK(check.mismatch == false);
  }
  RandomSource rng(3);
  const auto zero = State::basis(qubits({Role::Home, Role::Travel}), {1, 0});
  for (int i = 0; i < 20; ++i) CHECK(alice_control(alice_encode(zero, i % 2), rng).bit == 0);
  const auto lost = bob_control_check(zero, std::nullopt, rng);
  CHECK(lost.photon_lost);
  CHECK_FALSE(lost.mismatch.has_value());
}

TEST_CASE("control round on a photon mode reports vacuum as loss") {
  // |vac> with amplitude 1/sqrt2, |0>, |1> with 1/2 each
  CVector<double> v = CVector<double>::Zero(3);
  v(0) = kH;
  v(1) = v(2) = 0.5;
  const State mode(SubsystemLayout{{Role::Travel, 3}}, v);
  int lost = 0, zeros = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    RandomSource rng(derive_stream_seed(1, static_cast<std::uint64_t>(i)));
    const auto a = alice_control(mode, rng);
    lost += a.bit ? 0 : 1;
    zeros += a.bit == 0 ? 1 : 0;
  }
  CHECK(std::abs(lost / double(n) - 0.5) < sigma5(0.5, n));
  CHECK(std::abs(zeros / double(n) - 0.25) < sigma5(0.25, n));
}

TEST_CASE("Bell decode of the encoded pair") {
  RandomSource rng(1);
  for (int i = 0; i < 50; ++i) {
    CHECK(bob_decode_bell(alice_encode(bob_prepare(PhotonKind::True), 0), rng) == BellOutcome::PsiPlus);
    CHECK(bob_decode_bell(alice_encode(bob_prepare(PhotonKind::True), 1), rng) == BellOutcome::PsiMinus);
  }
  const auto ten = State::basis(qubits({Role::Home, Role::Travel}), {1, 0});
  for (int i = 0; i < 50; ++i) CHECK(decoded_bit(bob_decode_bell(ten, rng)).has_value());
  CHECK(decoded_bit(BellOutcome::PhiPlus) == std::nullopt);
  CHECK(decoded_bit(BellOutcome::PsiMinus) == 1);
}

TEST_CASE("DPD check") {
  RandomSource rng(1);
  CHECK(bob_dpd_check(plus_state(Role::Travel), 0, rng) == DpdResult::Discard);
  for (int i = 0; i < 100; ++i) CHECK(bob_dpd_check(minus_state(Role::Travel), 1, rng) == DpdResult::NoClick);
  CHECK(bob_dpd_check(State::basis(SubsystemLayout{{Role::Travel, 3}}, {kVacuumLevel}), 1, rng) == DpdResult::Lost);
}

TEST_CASE("round flow and record invariants across attacks") {
  const std::vector<attacks::AttackSpec> specs{{attacks::AttackKind::None, 0},
                                               {attacks::AttackKind::Opaque, 0},
                                               {attacks::AttackKind::Translucent, 0.3},
                                               {attacks::AttackKind::Wojcik, 0},
                                               {attacks::AttackKind::Cai, 0}};
  for (const auto& spec : specs) {
    const auto attack = attacks::make_attack(spec);
    const auto session = run_session(config_with(3000, 17), *attack);
    std::int64_t message = 0, false_message = 0, lost_true_message = 0;
    for (const auto& r : session.records) {
      if (r.mode == RoundMode::Control) {
        CHECK_FALSE(r.alice_bit.has_value());
        CHECK_FALSE(r.bob_bit.has_value());
        CHECK_FALSE(r.dpd_click.has_value());
        if (r.kind == PhotonKind::False) CHECK(r.discarded);
      } else {
        ++message;
        CHECK_FALSE(r.control_alice.has_value());
        CHECK_FALSE(r.control_mismatch.has_value());
        if (r.kind == PhotonKind::False) ++false_message;
        if (r.kind == PhotonKind::True && r.photon_lost) ++lost_true_message;
        if (r.dpd_click) {
          CHECK(r.kind == PhotonKind::False);
          CHECK(r.alice_bit == 1);
        }
      }
    }
    CHECK(session.stats.qber_rounds == message - false_message - lost_true_message);
    const auto& c = session.stats.counts;
    CHECK(c.control_true + c.control_false + c.message_true + c.message_false == 3000);
  }
}

TEST_CASE("no attack: perfect key, no detections") {
  const attacks::NoAttack none;
  const auto session = run_session(config_with(10000, 7), none);
  for (const auto& r : session.records) {
    if (r.mode == RoundMode::Message && r.kind == PhotonKind::True) CHECK(r.bob_bit == r.alice_bit);
    if (r.control_mismatch) CHECK_FALSE(*r.control_mismatch);
    if (r.dpd_click) CHECK_FALSE(*r.dpd_click);
  }
  CHECK(session.stats.qber_bell == 0.0);
  CHECK(session.stats.control_detection_rate == 0.0);
  CHECK(session.stats.dpd_click_rate == 0.0);
  CHECK(session.stats.auth_mismatch == 0.0);
  CHECK(session.stats.loss_rate == 0.0);
  CHECK_FALSE(session.stats.eve_accuracy.has_value());
}

TEST_CASE("opaque: QBER near one half") {
  const attacks::OpaqueAttack eve;
  auto c = config_with(20000, 2);
  c.false_prob = 0;
  const auto s = run_session(c, eve).stats;
  CHECK(std::abs(*s.qber_bell - 0.5) < sigma5(0.5, double(s.qber_rounds)));
}

TEST_CASE("translucent: control mismatch tracks D") {
  const attacks::TranslucentAttack eve(0.2);
  const auto s = run_session(config_with(20000, 3), eve).stats;
  CHECK(std::abs(*s.control_detection_rate - 0.2) < sigma5(0.2, double(s.control_checked)));
}

TEST_CASE("wojcik: decoy clicks and visible loss") {
  const attacks::WojcikAttack eve;
  const auto s = run_session(config_with(20000, 4), eve).stats;
  CHECK(std::abs(*s.dpd_click_rate - 0.5) < sigma5(0.5, double(s.dpd_applicable)));
  CHECK(s.loss_rate > 0.0);
}

TEST_CASE("authenticate") {
  RandomSource rng(1);
  const std::vector<int> a{0, 1, 1, 0, 1, 0, 0, 1};
  std::vector<int> flipped;
  for (int x : a) flipped.push_back(1 - x);
  CHECK(authenticate(a, a, 0.5, rng).mismatch_rate == 0.0);
  const auto all = authenticate(a, flipped, 1.0, rng);
  CHECK(all.mismatch_rate == 1.0);
  CHECK(all.sampled.size() == a.size());
  const auto part = authenticate(a, a, 0.3, rng);
  CHECK(part.sampled.size() == 3);  // ceil(0.3 * 8)
  CHECK(std::is_sorted(part.sampled.begin(), part.sampled.end()));
  CHECK(std::adjacent_find(part.sampled.begin(), part.sampled.end()) == part.sampled.end());
  CHECK_THROWS_AS(authenticate(std::span<const int>{}, std::span<const int>{}, 0.5, rng), std::invalid_argument);
  CHECK_THROWS_AS(authenticate(a, std::span<const int>(a).first(3), 0.5, rng), std::invalid_argument);
}

TEST_CASE("authentication removes the sample from the final key") {
  const attacks::NoAttack none;
  auto c = config_with(2000, 5);
  c.sample_fraction = 0.25;
  const auto s = run_session(c, none).stats;
  CHECK(s.auth_sampled == static_cast<std::size_t>(std::ceil(0.25 * double(s.sifted_key_length))));
  CHECK(s.final_key_length + s.auth_sampled == s.sifted_key_length);
}

TEST_CASE("sessions are reproducible and independent of thread count") {
  const attacks::TranslucentAttack eve(0.4);
  const auto c = config_with(3000, 99);
  const auto one = run_session(c, eve, {1});
  const auto four = run_session(c, eve, {4});
  const auto seven = run_session(c, eve, {7});
  CHECK(one.records == four.records);
  CHECK(one.records == seven.records);
  CHECK(*one.stats.auth_mismatch == *seven.stats.auth_mismatch);
  auto other = c;
  other.master_seed = 100;
  CHECK_FALSE(run_session(other, eve, {1}).records == one.records);
}

namespace {

/// Replaces the EPR pair with a bare decoy, losing the home qubit.
class DropsHome final : public attacks::AttackStrategy {
 public:
  [[nodiscard]] std::string name() const override { return "drops-home"; }
  [[nodiscard]] State on_b_to_a(State, attacks::AttackContext&, RandomSource&) const override {
    return plus_state(Role::Travel);
  }
};

}  // namespace

TEST_CASE("attack contract violations abort the round") {
  const DropsHome bad;
  auto c = config_with(10, 1);
  c.false_prob = 0;
  CHECK_THROWS_AS(run_session(c, bad, {2}), std::logic_error);
}
