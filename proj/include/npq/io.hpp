#pragma once

// Serialization shared by the command-line tool: fixed 17-significant-digit
// CSV and key-ordered JSON records.

#include <json.hpp>
#include <string>

#include "npq/validation.hpp"

namespace npq {

inline constexpr const char* kVersion = "1.0.0";

using Json = nlohmann::ordered_json;

/// printf "%.17e"; non-finite values as inf, -inf, nan.
std::string format_double(double v);

/// -log10(f); +inf for f <= 0.
double neglog10(double f);

/// max{0, 1 + log10(f / f_max) / 20} applied cell by cell.
JointPmf logmap(const JointPmf& joint);

/// Finite doubles as numbers, everything else as null.
Json json_number(double v);

Json to_json(const MopReport& report);

/// Column names matching report_csv_row.
std::string report_csv_header();
std::string report_csv_row(const MopReport& report);

}  // namespace npq
