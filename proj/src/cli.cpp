#include "pingpong/cli.hpp"

#include "pingpong/analysis.hpp"
#include "pingpong/attacks.hpp"
#include "pingpong/csv.hpp"
#include "pingpong/information.hpp"
#include "pingpong/protocol.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pingpong::cli {

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  std::string attack = "none";
  double p0 = 0.5;
  double d = 0.0;
  double control_prob = 0.5;
  double false_prob = 0.25;
  long long rounds = 10000;
  std::uint64_t seed = 0;
  std::string out;
  std::string transcript;
  double sample_fraction = 0.5;
  std::string qber_convention = "fidelity";
  std::string p0_grid;
  std::string d_grid;
};

std::string fmt(const std::optional<double>& v) { return v ? csv::format_number(*v) : "NA"; }
std::string fmt(double v) { return csv::format_number(v); }

/// key=value lines, flushed to stdout and optionally a file.
class Summary {
 public:
  template <typename T>
  Summary& add(const std::string& key, const T& value) {
    text_ << key << '=' << value << '\n';
    return *this;
  }
  void emit(std::ostream& out, const std::string& path) const {
    out << text_.str();
    if (!path.empty()) {
      std::ofstream file(path);
      if (!(file << text_.str()) || !file.flush()) throw IoError("cannot write summary to '" + path + "'");
    }
  }

 private:
  std::ostringstream text_;
};

protocol::ProtocolConfig make_config(const RunSpec& spec) {
  protocol::ProtocolConfig config;
  config.p0 = spec.p0;
  config.control_prob = spec.control_prob;
  config.false_prob = spec.false_prob;
  config.rounds = spec.rounds;
  config.master_seed = spec.seed;
  config.sample_fraction = spec.sample_fraction;
  config.qber_convention = protocol::parse_qber_convention(spec.qber_convention);
  config.validate();
  return config;
}

int simulate(const RunSpec& spec, std::ostream& out) {
  const auto attack_spec = attacks::parse_attack(spec.attack, spec.d);
  const auto config = make_config(spec);
  const auto attack = attacks::make_attack(attack_spec);
  const auto session = protocol::run_session(config, *attack);
  const auto& s = session.stats;

  const auto q_fid = analysis::exact_qber_fidelity(attack_spec, config.p0);
  const auto q_used = config.qber_convention == protocol::QberConvention::Fidelity ? q_fid : s.qber_bell;
  std::optional<double> i_ab;
  if (q_used) i_ab = binary_capacity(*q_used);

  if (!spec.transcript.empty()) {
    std::ofstream file(spec.transcript);
    if (file) csv::write_transcript(file, session.records);
    if (!file || !file.flush()) throw IoError("cannot write transcript to '" + spec.transcript + "'");
  }

  Summary summary;
  summary.add("command", "simulate")
      .add("attack", attack->name())
      .add("rounds", config.rounds)
      .add("seed", config.master_seed)
      .add("p0", fmt(config.p0))
      .add("control_prob", fmt(config.control_prob))
      .add("false_prob", fmt(config.false_prob))
      .add("control_rounds", s.counts.control_true + s.counts.control_false)
      .add("message_rounds", s.counts.message_true + s.counts.message_false)
      .add("false_photon_rounds", s.counts.control_false + s.counts.message_false)
      .add("discarded", s.counts.discarded)
      .add("photon_lost", s.counts.photon_lost)
      .add("bell_tamper", s.counts.bell_tamper)
      .add("qber_rounds", s.qber_rounds)
      .add("qber_bell", fmt(s.qber_bell))
      .add("qber_fidelity", fmt(q_fid))
      .add("qber_convention", protocol::to_string(config.qber_convention))
      .add("i_ab", fmt(i_ab))
      .add("control_checked", s.control_checked)
      .add("control_detection_rate", fmt(s.control_detection_rate))
      .add("dpd_applicable", s.dpd_applicable)
      .add("dpd_clicks", s.dpd_clicks)
      .add("dpd_click_rate", fmt(s.dpd_click_rate))
      .add("sifted_key", s.sifted_key_length)
      .add("auth_sampled", s.auth_sampled)
      .add("final_key", s.final_key_length)
      .add("auth_mismatch", fmt(s.auth_mismatch))
      .add("eve_guesses", s.eve_guesses)
      .add("eve_accuracy", fmt(s.eve_accuracy))
      .add("loss_rate", fmt(s.loss_rate));
  summary.emit(out, spec.out);
  return kExitOk;
}

int exact(const RunSpec& spec, std::ostream& out) {
  const auto attack_spec = attacks::parse_attack(spec.attack, spec.d);
  Summary summary;
  summary.add("command", "exact").add("attack", attacks::to_string(attack_spec)).add("p0", fmt(spec.p0));
  switch (attack_spec.kind) {
    case attacks::AttackKind::Opaque: {
      const auto r = analysis::opaque_closed_form(spec.p0);
      summary.add("q0", fmt(r.q0)).add("q1", fmt(r.q1)).add("q", fmt(r.q)).add("i_ab", fmt(r.i_ab));
      break;
    }
    case attacks::AttackKind::Translucent: {
      const auto r = analysis::translucent_closed_form(spec.p0, attack_spec.disturbance);
      const auto e = analysis::translucent_exact_engine(spec.p0, attack_spec.disturbance);
      summary.add("d", fmt(r.d));
      for (std::size_t i = 0; i < 4; ++i) summary.add("lambda" + std::to_string(i + 1), fmt(r.eigenvalues[i]));
      summary.add("i_ae", fmt(r.i_ae))
          .add("p_i", fmt(r.p_i))
          .add("p_z", fmt(r.p_z))
          .add("qber_fidelity", fmt(r.qber_fidelity))
          .add("i_ab", fmt(r.i_ab))
          .add("control_detection", fmt(r.control_detection))
          .add("engine_max_deviation", fmt(analysis::distance(r, e).max()));
      break;
    }
    case attacks::AttackKind::Wojcik:
      summary.add("dpd_click_probability_present", fmt(analysis::dpd_click_probability(true)))
          .add("dpd_click_probability_absent", fmt(analysis::dpd_click_probability(false)));
      break;
    default:
      throw std::invalid_argument("exact supports opaque, translucent and wojcik");
  }
  summary.emit(out, spec.out);
  return kExitOk;
}

int sweep(const RunSpec& spec, std::ostream& out) {
  const auto p0_grid = spec.p0_grid.empty() ? analysis::default_grid() : parse_grid(spec.p0_grid);
  const auto d_grid = spec.d_grid.empty() ? analysis::default_grid() : parse_grid(spec.d_grid);
  const auto rows = analysis::sweep(p0_grid, d_grid);
  if (spec.out.empty()) {
    csv::write_sweep(out, rows);
    return kExitOk;
  }
  std::ofstream file(spec.out);
  if (file) csv::write_sweep(file, rows);
  if (!file || !file.flush()) throw IoError("cannot write sweep to '" + spec.out + "'");
  return kExitOk;
}

int dpd_demo(const RunSpec& spec, std::ostream& out) {
  const auto attack_spec = attacks::parse_attack(spec.attack);
  if (attack_spec.kind != attacks::AttackKind::None && attack_spec.kind != attacks::AttackKind::Wojcik)
    throw std::invalid_argument("dpd-demo supports only --attack none or wojcik");
  RunSpec forced = spec;
  forced.p0 = 0.0;  // Alice always applies Z^1
  forced.control_prob = 0.0;
  forced.false_prob = 1.0;
  const auto config = make_config(forced);
  const auto attack = attacks::make_attack(attack_spec);
  const auto session = protocol::run_session(config, *attack);
  const auto& s = session.stats;

  Summary summary;
  summary.add("command", "dpd-demo")
      .add("attack", attack->name())
      .add("rounds", config.rounds)
      .add("seed", config.master_seed)
      .add("dpd_applicable", s.dpd_applicable)
      .add("dpd_clicks", s.dpd_clicks)
      .add("dpd_click_rate", fmt(s.dpd_click_rate))
      .add("exact_click_probability",
           fmt(analysis::dpd_click_probability(attack_spec.kind == attacks::AttackKind::Wojcik)))
      .add("photon_lost", s.counts.photon_lost);
  summary.emit(out, spec.out);
  return kExitOk;
}

void add_common(CLI::App* cmd, RunSpec& spec) {
  cmd->add_option("--attack", spec.attack, "none | opaque | translucent:D=<x> | wojcik | cai")->capture_default_str();
  cmd->add_option("--p0", spec.p0, "Probability Alice encodes bit 0")->capture_default_str();
  cmd->add_option("--d", spec.d, "Disturbance D for a bare 'translucent' attack")->capture_default_str();
  cmd->add_option("--control-prob", spec.control_prob, "Probability of a control round")->capture_default_str();
  cmd->add_option("--false-prob", spec.false_prob, "Probability of a decoy |+> photon")->capture_default_str();
  cmd->add_option("--rounds", spec.rounds, "Number of rounds")->capture_default_str();
  cmd->add_option("--seed", spec.seed, "Master seed")->capture_default_str();
  cmd->add_option("--out", spec.out, "Output file (summary or sweep CSV)");
  cmd->add_option("--transcript", spec.transcript, "Per-round transcript CSV");
  cmd->add_option("--sample-fraction", spec.sample_fraction, "Key share used for authentication")
      ->capture_default_str();
  cmd->add_option("--qber-convention", spec.qber_convention, "fidelity | bell-decode")->capture_default_str();
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("bad grid value '" + s + "' in '" + text + "'");
    return v;
  };
  std::vector<std::string> parts;
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    std::istringstream in(text);
    for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw std::invalid_argument("grid range must be lo:hi:n");
    const double lo = number(parts[0]), hi = number(parts[1]);
    const double n = number(parts[2]);
    if (n < 1 || n != static_cast<long>(n)) throw std::invalid_argument("grid point count must be a positive integer");
    const long count = static_cast<long>(n);
    for (long k = 0; k < count; ++k)
      grid.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
    return grid;
  }
  std::istringstream in(text);
  for (std::string part; std::getline(in, part, ',');) grid.push_back(number(part));
  if (grid.empty()) throw std::invalid_argument("empty grid");
  return grid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunSpec spec;
  CLI::App app{"Ping-Pong QKD simulation laboratory", "pingpong"};
  app.require_subcommand(1);
  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo session with an optional eavesdropper");
  auto* exact_cmd = app.add_subcommand("exact", "Closed-form and exact density-matrix analysis");
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid of (p0, D) translucent-attack analyses as CSV");
  auto* dpd_cmd = app.add_subcommand("dpd-demo", "Decoy-photon detection demo (Z^1 decoy rounds only)");
  for (auto* cmd : {simulate_cmd, exact_cmd, sweep_cmd, dpd_cmd}) add_common(cmd, spec);
  sweep_cmd->add_option("--p0-grid", spec.p0_grid, "p0 values: a,b,c or lo:hi:n (default 0:1:11)");
  sweep_cmd->add_option("--d-grid", spec.d_grid, "D values: a,b,c or lo:hi:n (default 0:1:11)");

  std::vector<const char*> argv{"pingpong"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate_cmd) return simulate(spec, out);
    if (*exact_cmd) {
      if (spec.attack == "none") spec.attack = "translucent";
      return exact(spec, out);
    }
    if (*sweep_cmd) return sweep(spec, out);
    return dpd_demo(spec, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace pingpong::cli
