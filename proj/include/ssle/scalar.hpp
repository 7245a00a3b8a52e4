#pragma once

// Scalar backends for the Grassmann algebra: exact rationals (GMP), exact
// rational-complex numbers, and double-complex numbers.

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

namespace ssle {

using Rational = mpq_class;
using Complex = std::complex<double>;

/// Parse "p/q", an integer, or a finite decimal ("0.25", "-1.5e-3") exactly.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
Rational make_rational(long num, long den = 1);

struct ComplexRational {
  Rational re;
  Rational im;

  ComplexRational() = default;
  ComplexRational(Rational r) : re(std::move(r)), im(0) {}  // NOLINT
  ComplexRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  ComplexRational(long r) : re(r), im(0) {}  // NOLINT

  ComplexRational& operator+=(const ComplexRational& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  ComplexRational& operator-=(const ComplexRational& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  ComplexRational& operator*=(const ComplexRational& o) {
    Rational r = re * o.re - im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  ComplexRational& operator/=(const ComplexRational& o);

  friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
  friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
  friend ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }
  friend ComplexRational operator/(ComplexRational a, const ComplexRational& b) { return a /= b; }
  friend ComplexRational operator-(const ComplexRational& a) { return {-a.re, -a.im}; }
  friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

/// Uniform access to the operations the algebra code needs from a scalar.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static Rational from_rational(const Rational& q) { return q; }
  static std::string re_string(const Rational& x) { return to_string(x); }
  static std::string im_string(const Rational&) { return "0"; }
  static Complex to_complex(const Rational& x) { return {x.get_d(), 0.0}; }
  static Rational from_parts(const Rational& re, const Rational& /*im*/) { return re; }
};

template <>
struct ScalarTraits<ComplexRational> {
  static constexpr bool exact = true;
  static ComplexRational zero() { return {}; }
  static ComplexRational one() { return ComplexRational(1); }
  static bool is_zero(const ComplexRational& x) { return sgn(x.re) == 0 && sgn(x.im) == 0; }
  static ComplexRational from_rational(const Rational& q) { return ComplexRational(q); }
  static std::string re_string(const ComplexRational& x) { return to_string(x.re); }
  static std::string im_string(const ComplexRational& x) { return to_string(x.im); }
  static Complex to_complex(const ComplexRational& x) { return {x.re.get_d(), x.im.get_d()}; }
  static ComplexRational from_parts(const Rational& re, const Rational& im) { return {re, im}; }
};

std::string format_double(double x);

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static Complex zero() { return {0.0, 0.0}; }
  static Complex one() { return {1.0, 0.0}; }
  static bool is_zero(const Complex& x) { return x.real() == 0.0 && x.imag() == 0.0; }
  static Complex from_rational(const Rational& q) { return {q.get_d(), 0.0}; }
  static std::string re_string(const Complex& x) { return format_double(x.real()); }
  static std::string im_string(const Complex& x) { return format_double(x.imag()); }
  static Complex to_complex(const Complex& x) { return x; }
  static Complex from_parts(const Rational& re, const Rational& im) { return {re.get_d(), im.get_d()}; }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static bool is_zero(double x) { return x == 0.0; }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static std::string re_string(double x) { return format_double(x); }
  static std::string im_string(double) { return "0"; }
  static Complex to_complex(double x) { return {x, 0.0}; }
  static double from_parts(const Rational& re, const Rational& /*im*/) { return re.get_d(); }
};

}  // namespace ssle
