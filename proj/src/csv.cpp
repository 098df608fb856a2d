#include "pingpong/csv.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pingpong::csv {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad number '" + text + "'");
  return value;
}

std::optional<int> parse_bit(const std::string& text, std::size_t line_no) {
  if (text.empty()) return std::nullopt;
  if (text == "0") return 0;
  if (text == "1") return 1;
  throw std::runtime_error("line " + std::to_string(line_no) + ": bad bit '" + text + "'");
}

std::string bit_field(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }
std::string flag_field(const std::optional<bool>& v) { return v ? (*v ? "1" : "0") : std::string(); }

std::string read_line(std::istream& in) {
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_sweep(std::ostream& out, std::span<const analysis::SweepRow> rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << format_number(r.p0) << ',' << format_number(r.d) << ',' << format_number(r.q_formula) << ','
        << format_number(r.q_exact) << ',' << format_number(r.i_ab) << ',' << format_number(r.i_ae) << ','
        << format_number(r.p_i) << ',' << format_number(r.p_z) << ',' << format_number(r.control_detection) << '\n';
  }
}

std::vector<analysis::SweepRow> parse_sweep(std::istream& in) {
  if (read_line(in) != kSweepHeader) throw std::runtime_error("sweep CSV: unexpected header");
  std::vector<analysis::SweepRow> rows;
  std::size_t line_no = 1;
  while (in.peek() != std::char_traits<char>::eof()) {
    ++line_no;
    const auto fields = split_fields(read_line(in));
    if (fields.size() != 9) throw std::runtime_error("sweep CSV line " + std::to_string(line_no) + ": expected 9 fields");
    double v[9];
    for (int i = 0; i < 9; ++i) v[i] = parse_double(fields[static_cast<std::size_t>(i)], line_no);
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
  }
  return rows;
}

void write_transcript(std::ostream& out, std::span<const protocol::RoundRecord> records) {
  out << kTranscriptHeader << '\n';
  for (const auto& r : records) {
    out << r.index << ',' << to_string(r.mode) << ',' << to_string(r.kind) << ',' << bit_field(r.alice_bit) << ','
        << bit_field(r.bob_bit) << ',' << flag_field(r.control_mismatch) << ',' << flag_field(r.dpd_click) << ','
        << (r.photon_lost ? 1 : 0) << ',' << (r.discarded ? 1 : 0) << '\n';
  }
}

std::vector<protocol::RoundRecord> parse_transcript(std::istream& in) {
  if (read_line(in) != kTranscriptHeader) throw std::runtime_error("transcript CSV: unexpected header");
  std::vector<protocol::RoundRecord> records;
  std::size_t line_no = 1;
  while (in.peek() != std::char_traits<char>::eof()) {
    ++line_no;
    const auto f = split_fields(read_line(in));
    if (f.size() != 9)
      throw std::runtime_error("transcript CSV line " + std::to_string(line_no) + ": expected 9 fields");
    protocol::RoundRecord r;
    r.index = static_cast<std::int64_t>(parse_double(f[0], line_no));
    if (f[1] == "control") {
      r.mode = protocol::RoundMode::Control;
    } else if (f[1] == "message") {
      r.mode = protocol::RoundMode::Message;
    } else {
      throw std::runtime_error("transcript CSV line " + std::to_string(line_no) + ": bad mode");
    }
    if (f[2] == "true") {
      r.kind = protocol::PhotonKind::True;
    } else if (f[2] == "false") {
      r.kind = protocol::PhotonKind::False;
    } else {
      throw std::runtime_error("transcript CSV line " + std::to_string(line_no) + ": bad kind");
    }
    r.alice_bit = parse_bit(f[3], line_no);
    r.bob_bit = parse_bit(f[4], line_no);
    if (auto m = parse_bit(f[5], line_no)) r.control_mismatch = *m == 1;
    if (auto c = parse_bit(f[6], line_no)) r.dpd_click = *c == 1;
    r.photon_lost = parse_bit(f[7], line_no).value_or(0) == 1;
    r.discarded = parse_bit(f[8], line_no).value_or(0) == 1;
    records.push_back(r);
  }
  return records;
}

}  // namespace pingpong::csv
