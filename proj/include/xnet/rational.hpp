#pragma once
//==============================================================================
// Exact rational arithmetic.
//
// Thin helpers around GMP's mpq_class: canonical "p/q" strings and tolerant
// parsing.  All polytope/flow computations in this project are exact; doubles
// appear only in channel coefficients and rate simulation.
//==============================================================================

#include <gmpxx.h>

#include <optional>
#include <string>

namespace xnet {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Canonical string: "3/2", "-1/3", "2", "0".
inline std::string to_string(const Rational& q) { return q.get_str(); }

inline double to_double(const Rational& q) { return q.get_d(); }

// Accepts "p", "p/q", optional sign, base 10.  Returns nullopt on anything
// else (including a zero denominator).
inline std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  // mpq_class accepts whitespace and some surprising forms; pre-filter.
  std::size_t slashes = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '/') {
      ++slashes;
      if (slashes > 1 || i == 0 || i + 1 == text.size()) return std::nullopt;
    } else if (c == '-' || c == '+') {
      if (i != 0) return std::nullopt;
    } else if (c < '0' || c > '9') {
      return std::nullopt;
    }
  }
  // GMP rejects an explicit '+', so strip it after validation.
  const std::string digits = text[0] == '+' ? text.substr(1) : text;
  if (digits.empty()) return std::nullopt;
  try {
    Rational q(digits, 10);
    if (q.get_den() == 0) return std::nullopt;
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

}  // namespace xnet
