#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace survscore {

/// Parsed CSV contents: a header row plus data rows of raw string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(const std::string& name) const;
};

/// Reads a comma-separated file with a mandatory header row. Leading lines
/// starting with '#' are skipped (our writers emit provenance comments there).
/// Fields may be double-quoted; "" inside quotes escapes a quote.
CsvTable read_csv(const std::string& path);

/// Shortest round-trip representation of a double (via std::to_chars).
std::string format_double(double x);

/// Quotes a field if it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

/// Parses a decimal number with '.' decimal point; rejects trailing junk.
std::optional<double> parse_double(const std::string& s);

/// 64-bit FNV-1a, used for data fingerprints and config hashes.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xCBF29CE484222325ULL);
std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xCBF29CE484222325ULL);
std::string hex64(std::uint64_t x);

} // namespace survscore
