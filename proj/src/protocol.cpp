#include "pingpong/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <thread>

namespace pingpong::protocol {

namespace {

constexpr Role kTravel[] = {Role::Travel};

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

// Hooks must hand back the carrier, and the home qubit for EPR rounds.
void check_attack_output(const State& state, PhotonKind kind, const attacks::AttackStrategy& attack) {
  if (!state.layout().contains(Role::Travel) || (kind == PhotonKind::True && !state.layout().contains(Role::Home)) ||
      (kind == PhotonKind::True && state.layout().dim_of(Role::Home) != 2))
    throw std::logic_error("attack '" + attack.name() + "' violated the strategy contract");
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PINGPONG_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

std::string to_string(QberConvention convention) {
  return convention == QberConvention::BellDecode ? "bell-decode" : "fidelity";
}

QberConvention parse_qber_convention(const std::string& text) {
  if (text == "bell-decode") return QberConvention::BellDecode;
  if (text == "fidelity") return QberConvention::Fidelity;
  throw std::invalid_argument("unknown QBER convention '" + text + "'");
}

void ProtocolConfig::validate() const {
  check_probability(p0, "p0");
  check_probability(control_prob, "control probability");
  check_probability(false_prob, "false-photon probability");
  if (rounds < 1) throw std::invalid_argument("rounds must be at least 1");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0))
    throw std::invalid_argument("sample fraction must lie in (0,1]");
}

std::string to_string(RoundMode mode) { return mode == RoundMode::Control ? "control" : "message"; }
std::string to_string(PhotonKind kind) { return kind == PhotonKind::True ? "true" : "false"; }

State bob_prepare(PhotonKind kind) {
  if (kind == PhotonKind::False) return plus_state(Role::Travel);
  return bell_state(BellState::PsiPlus, Role::Home, Role::Travel);
}

State alice_encode(const State& state, int j) {
  if (j != 0 && j != 1) throw std::invalid_argument("alice_encode: bit must be 0 or 1");
  const int dim = state.layout().dim_of(Role::Travel);
  CMatrix<double> z = CMatrix<double>::Identity(dim, dim);
  if (j == 1) z(level_of_bit(dim, 1), level_of_bit(dim, 1)) = -1.0;
  return apply_on(state, z, kTravel);
}

ControlAnnouncement alice_control(const State& state, RandomSource& rng) {
  const int dim = state.layout().dim_of(Role::Travel);
  auto result = measure(state, computational_basis(Role::Travel, dim), rng);
  const int bit = bit_of_level(dim, static_cast<int>(result.outcome));
  return {bit < 0 ? std::nullopt : std::optional<int>(bit), std::move(result.post)};
}

ControlCheck bob_control_check(const State& state, std::optional<int> announcement, RandomSource& rng) {
  if (!announcement) return {std::nullopt, std::nullopt, true};
  if (*announcement != 0 && *announcement != 1) throw std::invalid_argument("announcement must be 0 or 1");
  auto result = measure(state, computational_basis(Role::Home, 2), rng);
  const int home = static_cast<int>(result.outcome);
  return {home, home == *announcement, false};
}

std::optional<int> decoded_bit(BellOutcome outcome) {
  switch (outcome) {
    case BellOutcome::PsiPlus: return 0;
    case BellOutcome::PsiMinus: return 1;
    default: return std::nullopt;
  }
}

BellOutcome bob_decode_bell(const State& state, RandomSource& rng) {
  const int dim = state.layout().dim_of(Role::Travel);
  const auto basis = bell_basis(Role::Home, Role::Travel, dim);
  const auto result = measure(state, basis, rng);
  if (!basis.complete() && result.outcome == basis.residual_outcome()) return BellOutcome::Lost;
  return static_cast<BellOutcome>(result.outcome);
}

DpdResult bob_dpd_check(const State& state, int alice_op, RandomSource& rng) {
  if (alice_op == 0) return DpdResult::Discard;
  const int dim = state.layout().dim_of(Role::Travel);
  // {P+, P-} with the vacuum as residual; only the P+ outcome is a click.
  const MeasurementBasis<double> basis(SubsystemLayout{{Role::Travel, dim}},
                                       {plus_state(Role::Travel, dim), minus_state(Role::Travel, dim)});
  const auto result = measure(state, basis, rng);
  if (result.outcome == 0) return DpdResult::Click;
  if (result.outcome == 1) return DpdResult::NoClick;
  return DpdResult::Lost;
}

RoundRecord run_round(const ProtocolConfig& config, const attacks::AttackStrategy& attack, std::int64_t index) {
  RandomSource rng(derive_stream_seed(config.master_seed, static_cast<std::uint64_t>(index)));
  RoundRecord rec;
  rec.index = index;
  rec.kind = rng.bernoulli(config.false_prob) ? PhotonKind::False : PhotonKind::True;

  attacks::AttackContext ctx;
  State state = attack.on_b_to_a(bob_prepare(rec.kind), ctx, rng);
  check_attack_output(state, rec.kind, attack);

  rec.mode = rng.bernoulli(config.control_prob) ? RoundMode::Control : RoundMode::Message;
  if (rec.mode == RoundMode::Control) {
    auto announcement = alice_control(state, rng);
    rec.control_alice = announcement.bit;
    rec.photon_lost = !announcement.bit.has_value();
    if (rec.kind == PhotonKind::False) {
      rec.discarded = true;  // Bob asks Alice to drop decoy control rounds
    } else if (announcement.bit) {
      const auto check = bob_control_check(announcement.post, announcement.bit, rng);
      rec.control_bob = check.home_bit;
      rec.control_mismatch = check.mismatch;
    }
  } else {
    const int j = rng.bernoulli(config.p0) ? 0 : 1;
    rec.alice_bit = j;
    state = attack.on_a_to_b(alice_encode(state, j), ctx, rng);
    check_attack_output(state, rec.kind, attack);
    if (rec.kind == PhotonKind::True) {
      const BellOutcome outcome = bob_decode_bell(state, rng);
      rec.photon_lost = outcome == BellOutcome::Lost;
      rec.bob_bit = decoded_bit(outcome);
      rec.bell_tamper = outcome == BellOutcome::PhiPlus || outcome == BellOutcome::PhiMinus;
    } else {
      switch (bob_dpd_check(state, j, rng)) {
        case DpdResult::Discard: rec.discarded = true; break;
        case DpdResult::Click: rec.dpd_click = true; break;
        case DpdResult::NoClick: rec.dpd_click = false; break;
        case DpdResult::Lost: rec.photon_lost = true; break;
      }
    }
  }
  rec.eve_guess = ctx.guess();
  return rec;
}

AuthResult authenticate(std::span<const int> alice_bits, std::span<const int> bob_bits, double sample_fraction,
                        RandomSource& rng) {
  if (alice_bits.size() != bob_bits.size()) throw std::invalid_argument("authenticate: key lengths differ");
  if (alice_bits.empty()) throw std::invalid_argument("authenticate: empty key");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0))
    throw std::invalid_argument("authenticate: sample fraction must lie in (0,1]");

  const std::size_t n = alice_bits.size();
  const auto k = std::min(n, static_cast<std::size_t>(std::ceil(sample_fraction * static_cast<double>(n))));
  // Partial Fisher-Yates: the first k entries become the sample.
  std::vector<std::size_t> positions(n);
  for (std::size_t i = 0; i < n; ++i) positions[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(positions[i], positions[i + rng.below(n - i)]);
  positions.resize(k);
  std::sort(positions.begin(), positions.end());

  std::size_t mismatches = 0;
  for (auto p : positions) mismatches += alice_bits[p] != bob_bits[p] ? 1 : 0;
  return {static_cast<double>(mismatches) / static_cast<double>(k), std::move(positions)};
}

SessionStats summarize(const ProtocolConfig& config, std::span<const RoundRecord> records) {
  SessionStats s;
  s.rounds = static_cast<std::int64_t>(records.size());
  std::vector<int> alice_key, bob_key;
  for (const auto& r : records) {
    const bool is_true = r.kind == PhotonKind::True;
    if (r.mode == RoundMode::Control) {
      ++(is_true ? s.counts.control_true : s.counts.control_false);
      if (r.control_mismatch) {
        ++s.control_checked;
        s.control_mismatches += *r.control_mismatch ? 1 : 0;
      }
    } else {
      ++(is_true ? s.counts.message_true : s.counts.message_false);
      if (is_true && !r.photon_lost) {
        ++s.qber_rounds;
        if (!r.bob_bit || *r.bob_bit != *r.alice_bit) ++s.qber_errors;
        if (r.bob_bit) {
          alice_key.push_back(*r.alice_bit);
          bob_key.push_back(*r.bob_bit);
        }
      }
      if (r.dpd_click) {
        ++s.dpd_applicable;
        s.dpd_clicks += *r.dpd_click ? 1 : 0;
      }
      if (r.eve_guess && r.alice_bit) {
        ++s.eve_guesses;
        s.eve_correct += *r.eve_guess == *r.alice_bit ? 1 : 0;
      }
    }
    s.counts.discarded += r.discarded ? 1 : 0;
    s.counts.photon_lost += r.photon_lost ? 1 : 0;
    s.counts.bell_tamper += r.bell_tamper ? 1 : 0;
  }

  auto rate = [](std::int64_t num, std::int64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  s.qber_bell = rate(s.qber_errors, s.qber_rounds);
  s.control_detection_rate = rate(s.control_mismatches, s.control_checked);
  s.dpd_click_rate = rate(s.dpd_clicks, s.dpd_applicable);
  s.eve_accuracy = rate(s.eve_correct, s.eve_guesses);
  s.loss_rate = s.rounds ? static_cast<double>(s.counts.photon_lost) / static_cast<double>(s.rounds) : 0.0;

  s.sifted_key_length = alice_key.size();
  if (!alice_key.empty()) {
    RandomSource rng(derive_stream_seed(config.master_seed, UINT64_MAX));
    const auto auth = authenticate(alice_key, bob_key, config.sample_fraction, rng);
    s.auth_mismatch = auth.mismatch_rate;
    s.auth_sampled = auth.sampled.size();
    s.final_key_length = alice_key.size() - auth.sampled.size();
  }
  return s;
}

Session run_session(const ProtocolConfig& config, const attacks::AttackStrategy& attack, SessionOptions options) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.rounds);
  std::vector<RoundRecord> records(n);

  const std::size_t workers = std::min<std::size_t>(resolve_threads(options.threads), n);
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      for (std::size_t i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i)
        records[i] = run_round(config, attack, static_cast<std::int64_t>(i));
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Session session;
  session.stats = summarize(config, records);
  session.records = std::move(records);
  return session;
}

}  // namespace pingpong::protocol
