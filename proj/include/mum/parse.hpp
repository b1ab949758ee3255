#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "mum/error.hpp"
#include "mum/poly_field.hpp"

namespace mum {

/// Integer with an optional 0b or 0x prefix.
inline std::int64_t parse_integer(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B')) {
    base = 2;
    s.remove_prefix(2);
  } else if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    s.remove_prefix(2);
  }
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value, base);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError, "'" + std::string(text) + "' is not an integer");
  }
  return negative ? -value : value;
}

/// Comma-separated integers, e.g. "6,6,2".
inline std::vector<std::int64_t> parse_integer_list(std::string_view text) {
  std::vector<std::int64_t> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_integer(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// "p,n,bits" with I(x) given as a base-p integer, e.g. "2,3,0b1011".
inline FieldSpec parse_field(std::string_view text) {
  const auto parts = parse_integer_list(text);
  if (parts.size() != 3) {
    throw Error(ErrorCode::ParseError, "field must be p,n,bits (e.g. 2,3,0b1011), got '" + std::string(text) + "'");
  }
  if (parts[1] < 1 || parts[1] > 62) {
    throw Error(ErrorCode::FieldTooLarge, "degree " + std::to_string(parts[1]) + " out of range");
  }
  return make_field_from_bits(parts[0], static_cast<int>(parts[1]), parts[2]);
}

}  // namespace mum
