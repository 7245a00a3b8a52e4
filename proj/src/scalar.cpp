#include "ssle/scalar.hpp"

#include <cctype>
#include <cstdio>

#include "ssle/errors.hpp"

namespace ssle {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  return true;
}

Rational parse_decimal(std::string_view text) {
  bool negative = false;
  std::size_t pos = 0;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false;
  for (; pos < text.size(); ++pos) {
    char ch = text[pos];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits.push_back(ch);
      if (seen_dot) ++frac_digits;
    } else if (ch == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (digits.empty()) throw UsageError("not a number: '" + std::string(text) + "'");
  long exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E')
      throw UsageError("not a number: '" + std::string(text) + "'");
    std::string_view rest = text.substr(pos + 1);
    bool eneg = false;
    if (!rest.empty() && (rest[0] == '+' || rest[0] == '-')) {
      eneg = rest[0] == '-';
      rest.remove_prefix(1);
    }
    if (!all_digits(rest)) throw UsageError("bad exponent in '" + std::string(text) + "'");
    exponent = std::stol(std::string(rest));
    if (eneg) exponent = -exponent;
  }
  mpz_class num(digits);
  mpz_class scale;
  long shift = exponent - frac_digits;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational q = shift < 0 ? Rational(num, scale) : Rational(num * scale);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw UsageError("empty rational");
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  Rational num = parse_decimal(text.substr(0, slash));
  Rational den = parse_decimal(text.substr(slash + 1));
  if (sgn(den) == 0) throw UsageError("zero denominator in '" + std::string(text) + "'");
  Rational q = num / den;
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Rational make_rational(long num, long den) {
  if (den == 0) throw UsageError("zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

ComplexRational& ComplexRational::operator/=(const ComplexRational& o) {
  Rational norm = o.re * o.re + o.im * o.im;
  if (sgn(norm) == 0) throw SingularInputError("division by zero complex rational");
  Rational r = (re * o.re + im * o.im) / norm;
  Rational i = (im * o.re - re * o.im) / norm;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace ssle
