#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace colluscan {

// Shortest-exact decimal for a double is not needed; %.17g round-trips and is
// stable per platform, which is what the determinism contract asks for.
std::string format_g17(double value);

// Fixed-decimal formatting for figure coordinates and human tables.
std::string format_fixed(double value, int decimals);

// Significant-digit formatting (%.Ng) for axis labels.
std::string format_sig(double value, int digits);

// Locale-independent strtod replacement ('.' decimal only, full-token match).
std::optional<double> parse_double(std::string_view token);

std::string read_file(const std::filesystem::path& path);

// Writes to <path>.tmp in the same directory, then renames over <path>.
void atomic_write(const std::filesystem::path& path, std::string_view content);

// FNV-1a 64, hex-encoded; used for scheme provenance hashes.
std::string fnv1a_hex(std::string_view data);

} // namespace colluscan
