#pragma once

#include "pingpong/attacks.hpp"
#include "pingpong/measurement.hpp"
#include "pingpong/random.hpp"
#include "pingpong/state.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pingpong::protocol {

/// Which QBER feeds the I_AB estimate of a session.
enum class QberConvention { BellDecode, Fidelity };

std::string to_string(QberConvention convention);
/// Accepts "bell-decode" or "fidelity"; throws std::invalid_argument otherwise.
QberConvention parse_qber_convention(const std::string& text);

struct ProtocolConfig {
  double p0 = 0.5;            // probability Alice encodes bit 0
  double control_prob = 0.5;  // probability of a control round
  double false_prob = 0.25;   // probability Bob sends a |+> decoy; 0 disables DPD
  std::int64_t rounds = 10000;
  std::uint64_t master_seed = 0;
  QberConvention qber_convention = QberConvention::Fidelity;
  double sample_fraction = 0.5;  // share of the sifted key sacrificed to authentication

  /// Throws std::invalid_argument on probabilities outside [0,1], rounds < 1
  /// or sample_fraction outside (0,1].
  void validate() const;
};

enum class RoundMode { Control, Message };
enum class PhotonKind { True, False };

std::string to_string(RoundMode mode);
std::string to_string(PhotonKind kind);

struct RoundRecord {
  std::int64_t index = 0;
  RoundMode mode = RoundMode::Message;
  PhotonKind kind = PhotonKind::True;
  std::optional<int> alice_bit;
  std::optional<int> bob_bit;
  std::optional<int> control_alice;
  std::optional<int> control_bob;
  std::optional<bool> control_mismatch;  // true when outcomes are NOT anti-correlated
  std::optional<bool> dpd_click;
  bool photon_lost = false;
  bool discarded = false;
  // Not part of the exported transcript.
  bool bell_tamper = false;  // Bob's Bell measurement gave phi+ or phi-
  std::optional<int> eve_guess;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

// ---------------------------------------------------------------------------
// Round steps.

/// True -> |psi+> on (home, travel); False -> |+> on travel.
State bob_prepare(PhotonKind kind);

/// Z^j on the travel subsystem (|vac> is left fixed on 3-level modes).
State alice_encode(const State& state, int j);

struct ControlAnnouncement {
  std::optional<int> bit;  // empty: Alice found the vacuum (photon lost)
  State post;
};
ControlAnnouncement alice_control(const State& state, RandomSource& rng);

struct ControlCheck {
  std::optional<int> home_bit;
  std::optional<bool> mismatch;
  bool photon_lost = false;
};
/// Bob's B_z measurement of the home qubit against Alice's announcement.
ControlCheck bob_control_check(const State& state, std::optional<int> announcement, RandomSource& rng);

enum class BellOutcome { PsiPlus, PsiMinus, PhiPlus, PhiMinus, Lost };
/// psi+ -> 0, psi- -> 1, otherwise empty.
std::optional<int> decoded_bit(BellOutcome outcome);
BellOutcome bob_decode_bell(const State& state, RandomSource& rng);

enum class DpdResult { Discard, Click, NoClick, Lost };
/// Projector test {P+, residual} on a returned decoy. alice_op = 0 discards.
DpdResult bob_dpd_check(const State& state, int alice_op, RandomSource& rng);

/// Executes round `index` with its own generator seeded from
/// derive_stream_seed(master_seed, index).
RoundRecord run_round(const ProtocolConfig& config, const attacks::AttackStrategy& attack, std::int64_t index);

// ---------------------------------------------------------------------------
// Sessions.

struct AuthResult {
  double mismatch_rate = 0.0;
  std::vector<std::size_t> sampled;  // ascending positions, removed from the final key
};

/// Compares ceil(fraction * n) positions sampled without replacement.
/// Throws std::invalid_argument on a length mismatch, an empty key or a
/// fraction outside (0, 1].
AuthResult authenticate(std::span<const int> alice_bits, std::span<const int> bob_bits, double sample_fraction,
                        RandomSource& rng);

struct CategoryCounts {
  std::int64_t control_true = 0;
  std::int64_t control_false = 0;
  std::int64_t message_true = 0;
  std::int64_t message_false = 0;
  std::int64_t discarded = 0;
  std::int64_t photon_lost = 0;
  std::int64_t bell_tamper = 0;
};

struct SessionStats {
  std::int64_t rounds = 0;
  CategoryCounts counts;

  std::int64_t qber_rounds = 0;  // true-photon message rounds that reached Bob
  std::int64_t qber_errors = 0;  // decoded bit wrong or phi+/phi- outcome
  std::optional<double> qber_bell;

  std::int64_t control_checked = 0;
  std::int64_t control_mismatches = 0;
  std::optional<double> control_detection_rate;

  std::int64_t dpd_applicable = 0;
  std::int64_t dpd_clicks = 0;
  std::optional<double> dpd_click_rate;

  std::size_t sifted_key_length = 0;
  std::size_t auth_sampled = 0;
  std::size_t final_key_length = 0;
  std::optional<double> auth_mismatch;

  std::int64_t eve_guesses = 0;
  std::int64_t eve_correct = 0;
  std::optional<double> eve_accuracy;

  double loss_rate = 0.0;
};

struct Session {
  SessionStats stats;
  std::vector<RoundRecord> records;
};

struct SessionOptions {
  /// Worker threads; 0 picks PINGPONG_THREADS or the hardware concurrency.
  unsigned threads = 0;
};

/// Runs config.rounds rounds (possibly in parallel) and aggregates them.
/// Output depends only on config and the attack, never on thread count.
Session run_session(const ProtocolConfig& config, const attacks::AttackStrategy& attack,
                    SessionOptions options = {});

/// Aggregation used by run_session; authentication draws from the stream
/// derive_stream_seed(master_seed, UINT64_MAX).
SessionStats summarize(const ProtocolConfig& config, std::span<const RoundRecord> records);

}  // namespace pingpong::protocol
