#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vigil::text {

std::string_view trim(std::string_view s);

/// Splits on `sep`, trimming each piece. Empty pieces are kept.
std::vector<std::string> split(std::string_view s, char sep);

/// Splits on runs of whitespace.
std::vector<std::string> words(std::string_view s);

std::vector<std::string> lines(std::string_view s);

/// Decimal or 0x-prefixed hexadecimal, no sign.
std::optional<std::uint64_t> parse_uint(std::string_view s);

/// Decimal with optional leading '-'.
std::optional<std::int64_t> parse_int(std::string_view s);

bool is_identifier(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

std::string hex(std::uint64_t value, int digits);

}  // namespace vigil::text
