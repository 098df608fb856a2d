#pragma once

#include "pingpong/measurement.hpp"
#include "pingpong/random.hpp"
#include "pingpong/state.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace pingpong::attacks {

/// Eve's per-round scratch space, created fresh by the round executor.
class AttackContext {
 public:
  [[nodiscard]] const std::optional<int>& guess() const { return guess_; }
  /// Records Eve's inferred Alice operation; throws std::logic_error if a
  /// guess was already made this round.
  void set_guess(int bit);

  /// Outcome of an intercept measurement on the way to Alice, if any.
  std::optional<int> b_to_a_outcome;

  /// Counts of Eve-side measurement outcomes, keyed like "bz:0" or "phi:I".
  [[nodiscard]] const std::map<std::string, long long>& ledger() const { return ledger_; }
  void record(const std::string& key) { ++ledger_[key]; }

 private:
  std::optional<int> guess_;
  std::map<std::string, long long> ledger_;
};

/// An eavesdropping strategy. Hooks see the full joint state, may adjoin
/// Eve-owned subsystems and must return a normalized state without acting
/// on the home qubit. Strategies hold no per-round state and are safe to
/// share between concurrently executing rounds.
class AttackStrategy {
 public:
  virtual ~AttackStrategy() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  /// Bob -> Alice leg.
  [[nodiscard]] virtual State on_b_to_a(State state, AttackContext& ctx, RandomSource& rng) const;
  /// Alice -> Bob leg (message mode only; control-mode photons do not return).
  [[nodiscard]] virtual State on_a_to_b(State state, AttackContext& ctx, RandomSource& rng) const;
};

class NoAttack final : public AttackStrategy {
 public:
  [[nodiscard]] std::string name() const override { return "none"; }
};

/// Intercept-resend: measure the carrier in B_z on both legs.
class OpaqueAttack final : public AttackStrategy {
 public:
  [[nodiscard]] std::string name() const override { return "opaque"; }
  [[nodiscard]] State on_b_to_a(State state, AttackContext& ctx, RandomSource& rng) const override;
  [[nodiscard]] State on_a_to_b(State state, AttackContext& ctx, RandomSource& rng) const override;
};

/// Ancilla interaction with disturbance D on the way to Alice, Bell-type
/// measurement of (travel, ancilla) on the way back.
class TranslucentAttack final : public AttackStrategy {
 public:
  /// Throws std::invalid_argument unless 0 <= d <= 1.
  explicit TranslucentAttack(double disturbance);
  [[nodiscard]] double disturbance() const { return disturbance_; }
  [[nodiscard]] std::string name() const override;
  [[nodiscard]] State on_b_to_a(State state, AttackContext& ctx, RandomSource& rng) const override;
  [[nodiscard]] State on_a_to_b(State state, AttackContext& ctx, RandomSource& rng) const override;

 private:
  double disturbance_;
};

/// Vacuum-mode attack: Q on (travel, x, y) going to Alice, Q^-1 coming back.
class WojcikAttack final : public AttackStrategy {
 public:
  [[nodiscard]] std::string name() const override { return "wojcik"; }
  [[nodiscard]] State on_b_to_a(State state, AttackContext& ctx, RandomSource& rng) const override;
  [[nodiscard]] State on_a_to_b(State state, AttackContext& ctx, RandomSource& rng) const override;
};

/// B_z measurement of the returning carrier in message mode.
class CaiMeasureAttack final : public AttackStrategy {
 public:
  [[nodiscard]] std::string name() const override { return "cai"; }
  [[nodiscard]] State on_a_to_b(State state, AttackContext& ctx, RandomSource& rng) const override;
};

// ---------------------------------------------------------------------------

enum class AttackKind { None, Opaque, Translucent, Wojcik, Cai };

struct AttackSpec {
  AttackKind kind = AttackKind::None;
  double disturbance = 0.0;  // translucent only

  friend bool operator==(const AttackSpec&, const AttackSpec&) = default;
};

/// Parses `none | opaque | translucent:D=<float> | translucent | wojcik | cai`.
/// A bare `translucent` takes `default_disturbance`. Throws
/// std::invalid_argument for unknown names or D outside [0, 1].
AttackSpec parse_attack(std::string_view text, double default_disturbance = 0.0);
std::string to_string(const AttackSpec& spec);
std::unique_ptr<const AttackStrategy> make_attack(const AttackSpec& spec);

// ---------------------------------------------------------------------------
// Operators shared with the exact analysis engine.

/// Ancilla interaction on (travel, ancilla), ancilla entering as |chi0>:
///   |0>|chi0> -> sqrt(F)|0>|chi0> + sqrt(D)|1>|chi1>
///   |1>|chi0> -> sqrt(F)|1>|chi1> + sqrt(D)|0>|chi0>
/// Columns for an ancilla entering as |chi1> are zero. Not an isometry for
/// 0 < D < 1; it preserves the norm of states whose travel marginal is
/// diagonal in B_z, such as half of an EPR pair.
CMatrix<double> translucent_interaction(double disturbance);

/// Eve's measurement vectors phi^I, phi^Z on (travel, ancilla).
State eve_phi_identity();
State eve_phi_z();

/// Partial isometry Q on (travel, x, y), each a 3-level mode {vac, 0, 1}:
///   |0,vac,0> -> (|0,0,vac> + |vac,0,1>)/sqrt2
///   |1,vac,0> -> (|vac,1,0> + |1,1,vac>)/sqrt2
CMatrix<double> wojcik_forward();
/// Partial inverse of Q on span{Q|0,vac,0>, Q|1,vac,0>} extended with
///   (|vac,1,0> - |1,1,vac>)/sqrt2 -> |1,vac,1>.
CMatrix<double> wojcik_inverse();
/// Qubit -> 3-level mode embedding |0> -> level 1, |1> -> level 2.
CMatrix<double> mode_embedding();

}  // namespace pingpong::attacks
