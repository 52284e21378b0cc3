#pragma once

// Small scanning helpers shared by the markup, path-data, transform and
// style parsers. Internal to the library.

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svgr::detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Cursor over SVG microsyntax (numbers separated by whitespace and/or a
// single comma).
class Scanner {
 public:
  explicit Scanner(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  std::size_t pos() const { return pos_; }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  void advance() { ++pos_; }

  void skip_space() {
    while (!done() && is_space(s_[pos_])) ++pos_;
  }

  void skip_comma_space() {
    skip_space();
    if (peek() == ',') {
      ++pos_;
      skip_space();
    }
  }

  // SVG number: [sign] digits [. digits] [e [sign] digits], or [sign] . digits.
  // Greedy but stops at a second '.', so "1.5.5" reads as 1.5 then .5.
  std::optional<double> number() {
    std::size_t start = pos_;
    std::size_t p = pos_;
    if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
    std::size_t int_digits = 0;
    while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
      ++p;
      ++int_digits;
    }
    std::size_t frac_digits = 0;
    if (p < s_.size() && s_[p] == '.') {
      std::size_t q = p + 1;
      while (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        ++q;
        ++frac_digits;
      }
      if (frac_digits > 0 || int_digits > 0) p = q;
    }
    if (int_digits == 0 && frac_digits == 0) return std::nullopt;
    if (p < s_.size() && (s_[p] == 'e' || s_[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      std::size_t exp_digits = 0;
      while (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        ++q;
        ++exp_digits;
      }
      if (exp_digits > 0) p = q;
    }
    std::string_view token = s_.substr(start, p - start);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
    pos_ = p;
    return value;
  }

  // Arc flags may be written without separators ("a1 1 0 00 1 1").
  std::optional<bool> flag() {
    if (peek() == '0' || peek() == '1') {
      bool v = peek() == '1';
      ++pos_;
      return v;
    }
    return std::nullopt;
  }

  std::string_view rest() const { return s_.substr(pos_); }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

// Parses a whitespace/comma separated list of numbers; nullopt on any junk.
inline std::optional<std::vector<double>> parse_number_list(std::string_view s) {
  std::vector<double> out;
  Scanner sc(s);
  sc.skip_space();
  while (!sc.done()) {
    auto v = sc.number();
    if (!v) return std::nullopt;
    out.push_back(*v);
    sc.skip_comma_space();
  }
  return out;
}

}  // namespace svgr::detail
