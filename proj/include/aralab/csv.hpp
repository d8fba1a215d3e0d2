#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aralab {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);
/// Fixed-precision form for result files meant for plotting.
std::string format_fixed(double v, int decimals);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(std::string_view line);
/// Strict double parse; throws ParseError naming `what` on failure.
double parse_double(std::string_view field, const std::string& what);

/// Writes text to path, creating parent directories. Throws Error on failure.
void write_text_file(const std::string& path, const std::string& text);

/// FNV-1a 64-bit digest as 16 hex digits (provenance, not security).
std::string fnv1a_hex(std::string_view data);

}  // namespace aralab
