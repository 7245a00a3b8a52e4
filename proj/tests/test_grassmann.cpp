#include <random>
#include <vector>

#include "doctest.h"
#include "ssle/grassmann.hpp"

using namespace ssle;
using G = Grassmann<Rational>;

namespace {

G random_element(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> coef(-3, 3);
  G g(n);
  for (Mask m = 0; m < (Mask{1} << n); ++m) g.add_term(m, Rational(coef(rng)));
  return g;
}

}  // namespace

TEST_CASE("generators anticommute and square to zero") {
  G z1 = G::generator(2, 1), z2 = G::generator(2, 2);
  CHECK(z2 * z1 == -(z1 * z2));
  CHECK((z1 * z1).is_zero());
  G one = G::one(2);
  G x = one + z1 * z2;
  CHECK(x * x == one + Rational(2) * (z1 * z2));
}

TEST_CASE("berezin integration sign convention") {
  G z1 = G::generator(2, 1), z2 = G::generator(2, 2);
  std::vector<int> d12{1, 2}, d21{2, 1};
  // Innermost measure factor acts first.
  CHECK(G(z2 * z1).berezin(d12) == G::one(2));
  CHECK(G(z1 * z2).berezin(d21) == G::one(2));
  CHECK(G(z1 * z2).berezin(d12) == -G::one(2));
  CHECK(z1.berezin(2).is_zero());
}

TEST_CASE("inverse of even element with nilpotent soul") {
  G z1 = G::generator(2, 1), z2 = G::generator(2, 2);
  G x = G::one(2) + z1 * z2;
  CHECK(x.inverse() == G::one(2) - z1 * z2);
  CHECK_THROWS_AS((z1 * z2).inverse(), SingularInputError);
}

TEST_CASE("superanalytic evaluation") {
  G z1 = G::generator(2, 1), z2 = G::generator(2, 2);
  G x = Rational(2) * G::one(2) + z1 * z2;
  // f(z) = z^2: derivatives at the body 2 are 4, 4, 2.
  std::vector<Rational> d{4, 4, 2};
  G r = eval_superanalytic<Rational>(d, x);
  CHECK(r == Rational(4) * G::one(2) + Rational(4) * (z1 * z2));
  std::vector<Rational> short_data{4};
  CHECK_THROWS_AS(eval_superanalytic<Rational>(short_data, x), UsageError);
  CHECK_THROWS_AS(eval_superanalytic<Rational>(d, z1), UsageError);
}

TEST_CASE("errors on malformed input") {
  CHECK_THROWS_AS(G::generator(2, 3), UsageError);
  CHECK_THROWS_AS(G::generator(65, 1), UsageError);
  CHECK_THROWS_AS(G::one(2) + G::one(3), UsageError);
}

TEST_CASE("property: associativity, distributivity, supercommutativity") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 6;
    G a = random_element(rng, n), b = random_element(rng, n), c = random_element(rng, n);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    G ae = a.even_part(), ao = a.odd_part(), be = b.even_part(), bo = b.odd_part();
    CHECK(ae * b == b * ae);
    CHECK(ao * bo == -(bo * ao));
    CHECK(ao.grade_involution() == -ao);
  }
}

TEST_CASE("property: nilpotent soul and Berezin Leibniz rule") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5;
    G a = random_element(rng, n);
    G s = a.soul();
    G p = G::one(n);
    for (int k = 0; k <= n; ++k) p = p * s;
    CHECK(p.is_zero());
    G b = random_element(rng, n);
    G ae = a.even_part(), ao = a.odd_part();
    for (int i = 1; i <= n; ++i) {
      CHECK((ae * b).berezin(i) == ae.berezin(i) * b + ae * b.berezin(i));
      CHECK((ao * b).berezin(i) == ao.berezin(i) * b - ao * b.berezin(i));
    }
    if (sgn(a.body()) != 0) {
      G e = a.even_part();
      CHECK(e * e.inverse() == G::one(n));
    }
  }
}

TEST_CASE("property: evaluation is a homomorphism") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4;
    G x = random_element(rng, n).even_part();
    // f = z^2, g = z^3 at body b; (fg) = z^5.
    Rational b = x.body();
    auto taylor = [&](int p) {
      std::vector<Rational> d;
      Rational coef = 1;
      for (int k = 0; k <= p; ++k) {
        Rational v = coef;
        for (int j = 0; j < p - k; ++j) v *= b;
        d.push_back(v);
        coef *= p - k;
      }
      return d;
    };
    G f = eval_superanalytic<Rational>(taylor(2), x);
    G g = eval_superanalytic<Rational>(taylor(3), x);
    G fg = eval_superanalytic<Rational>(taylor(5), x);
    CHECK(f * g == fg);
    CHECK(fg == x * x * x * x * x);
  }
}
