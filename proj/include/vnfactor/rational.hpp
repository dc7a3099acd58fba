// vnfactor - factor decompositions of group von Neumann algebra pieces
//
// Exact rational numbers used for trace measures and thresholds.

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace vnfactor {

using BigInt   = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) {
    throw std::domain_error("rational with zero denominator");
  }
  return Rational(BigInt(num), BigInt(den));
}

inline BigInt numerator_of(Rational const& q) {
  return boost::multiprecision::numerator(q);
}

inline BigInt denominator_of(Rational const& q) {
  return boost::multiprecision::denominator(q);
}

// Narrowing used for JSON output; all measures in this library have small
// denominators (divisors of a group order), so overflow means a bug.
inline std::int64_t to_int64(BigInt const& z) {
  if (z > BigInt(std::numeric_limits<std::int64_t>::max())
      || z < BigInt(std::numeric_limits<std::int64_t>::min())) {
    throw std::overflow_error("integer does not fit in 64 bits");
  }
  return z.convert_to<std::int64_t>();
}

inline double to_double(Rational const& q) {
  return q.convert_to<double>();
}

inline std::string to_string(Rational const& q) {
  auto const num = numerator_of(q);
  auto const den = denominator_of(q);
  if (den == 1) {
    return num.str();
  }
  return num.str() + "/" + den.str();
}

// Accepts "a", "a/b", and finite decimals such as "0.05" (read exactly).
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("not a rational number: '" + std::string(text)
                                + "'");
  };
  if (text.empty()) {
    return fail();
  }
  auto parse_int = [&](std::string_view s) -> BigInt {
    std::size_t i = 0;
    bool        neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
      neg = s[0] == '-';
      i   = 1;
    }
    if (i == s.size()) {
      fail();
    }
    BigInt v = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') {
        fail();
      }
      v = v * 10 + (s[i] - '0');
    }
    return neg ? BigInt(-v) : v;
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt den = parse_int(text.substr(slash + 1));
    if (den == 0) {
      fail();
    }
    return Rational(parse_int(text.substr(0, slash)), den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac  = text.substr(dot + 1);
    bool             neg   = !whole.empty() && whole[0] == '-';
    BigInt           w     = (whole.empty() || whole == "-" || whole == "+")
                                 ? BigInt(0)
                                 : parse_int(whole);
    BigInt           scale = 1;
    BigInt           f     = 0;
    for (char c : frac) {
      if (c < '0' || c > '9') {
        fail();
      }
      f = f * 10 + (c - '0');
      scale *= 10;
    }
    if (frac.empty() && (whole.empty() || whole == "-" || whole == "+")) {
      fail();
    }
    Rational r = Rational(w) + Rational(neg ? BigInt(-f) : f, scale);
    return r;
  }
  return Rational(parse_int(text));
}

}  // namespace vnfactor
