#pragma once

#include "pingpong/analysis.hpp"
#include "pingpong/protocol.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pingpong::csv {

inline constexpr std::string_view kSweepHeader = "p0,d,q_formula,q_exact,i_ab,i_ae,p_i,p_z,control_detection";
inline constexpr std::string_view kTranscriptHeader =
    "index,mode,kind,alice_bit,bob_bit,control_mismatch,dpd_click,photon_lost,discarded";

/// Decimal with 12 significant digits ("%.12g"); negative zero prints as 0.
std::string format_number(double x);

void write_sweep(std::ostream& out, std::span<const analysis::SweepRow> rows);
/// Throws std::runtime_error on a bad header or malformed row.
std::vector<analysis::SweepRow> parse_sweep(std::istream& in);

/// One row per round; absent optionals are empty fields, flags are 0/1.
void write_transcript(std::ostream& out, std::span<const protocol::RoundRecord> records);
/// Reads back the exported columns (unexported RoundRecord fields stay
/// default). Throws std::runtime_error on malformed input.
std::vector<protocol::RoundRecord> parse_transcript(std::istream& in);

}  // namespace pingpong::csv
