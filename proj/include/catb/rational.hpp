#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>
#include <string>

namespace catb {

// et_off: plain value semantics, so std::min/max and mixed expressions work.
using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational, boost::multiprecision::et_off>;
using BigInt =
    boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;

// Serialized form is always "p/q", including integral values ("3/1").
inline std::string to_fraction(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational parse_fraction(const std::string& text) {
  const auto bad = [&]() {
    return std::invalid_argument("malformed rational '" + text + "' (expected p/q)");
  };
  const auto digits = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  std::string num = text.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!digits(num) || !digits(den)) throw bad();
  BigInt p(num), q(den);
  if (q == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  return Rational(p, q);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace catb
