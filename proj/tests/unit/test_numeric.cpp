#include <doctest.h>

#include <random>

#include "ordpoly/errors.hpp"
#include "ordpoly/piecewise.hpp"
#include "ordpoly/polynomial.hpp"
#include "ordpoly/rational.hpp"

using namespace ordpoly;

namespace {

Rational q(const char* text) { return Rational::parse(text); }

Rational random_q(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-50, 50);
  std::uniform_int_distribution<long> den(1, 30);
  return Rational(num(rng)) / Rational(den(rng));
}

Polynomial random_poly(std::mt19937_64& rng) {
  std::vector<Rational> c(std::uniform_int_distribution<int>(0, 4)(rng));
  for (auto& x : c) x = random_q(rng);
  return Polynomial(c);
}

}  // namespace

TEST_SUITE("exact-num") {
  TEST_CASE("parsing keeps decimals exact") {
    CHECK(q("0.45") == Rational(9, 20));
    CHECK(q("0.69") == Rational(69, 100));
    CHECK(q("0.7") == Rational(7, 10));
    CHECK(q("3/6") == Rational(1, 2));
    CHECK(q("1") == Rational(1));
    CHECK(q("-2/4") == Rational(-1, 2));
    CHECK(q("010") == Rational(10));
    CHECK_THROWS_AS(q("1/0"), InputError);
    CHECK_THROWS_AS(q("abc"), InputError);
    CHECK_THROWS_AS(q(""), InputError);
  }

  TEST_CASE("rendering") {
    CHECK(Rational(3, 6).str() == "1/2");
    CHECK(Rational(4).str() == "4");
    CHECK(Rational(1, 3).to_decimal(12) == "0.333333333333");
    CHECK(Rational(2, 3).to_decimal(12) == "0.666666666667");
    CHECK(Rational(611, 4020).to_decimal(12) == "0.151990049751");
    CHECK(Rational(1, 2).to_decimal(12) == "0.5");
    CHECK(Rational(0).to_decimal(12) == "0");
  }

  TEST_CASE("rational field axioms on random values") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
      const Rational a = random_q(rng), b = random_q(rng), c = random_q(rng);
      CHECK((a + b) + c == a + (b + c));
      CHECK((a * b) * c == a * (b * c));
      CHECK(a * (b + c) == a * b + a * c);
      if (!b.is_zero()) CHECK((a / b) * b == a);
    }
    CHECK(factorial(5) == Rational(120));
    CHECK(binomial(6, 2) == Rational(15));
    CHECK(pow(Rational(1, 2), 3) == Rational(1, 8));
  }

  TEST_CASE("polynomial products") {
    const Polynomial one_plus_t{1, 1};
    const Polynomial one_minus_t{1, -1};
    CHECK(one_plus_t * one_minus_t == Polynomial{1, 0, -1});
    CHECK((one_plus_t * Polynomial()).is_zero());
    CHECK(Polynomial{0, 2} * Polynomial{0, 3} == Polynomial{0, 0, 6});
    CHECK(Polynomial{0, 0}.degree() == -1);
  }

  TEST_CASE("polynomial ring axioms on random values") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
      const Polynomial a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
      CHECK((a * b) * c == a * (b * c));
      CHECK(a * (b + c) == a * b + a * c);
      CHECK(a.antiderivative().derivative() == a);
      const Rational t = random_q(rng);
      CHECK((a * b)(t) == a(t) * b(t));
      const Rational s = random_q(rng), h = random_q(rng);
      CHECK(a.compose_affine(s, h)(t) == a(s * t + h));
    }
  }

  TEST_CASE("integration") {
    CHECK(Polynomial{0, 2}.integrate(0, 1) == Rational(1));
    CHECK(Polynomial{1}.integrate(0, 1) == Rational(1));
    CHECK(Polynomial{Rational(1, 2), -1}.integrate(0, Rational(1, 2)) == Rational(1, 8));
    CHECK_THROWS_AS(Polynomial{1}.integrate(1, 0), PreconditionError);

    // Riemann sum cross-check of the same integral
    double sum = 0;
    const int steps = 100000;
    for (int i = 0; i < steps; ++i) sum += (0.5 - (i + 0.5) * 0.5 / steps) * 0.5 / steps;
    CHECK(sum == doctest::Approx(0.125).epsilon(1e-9));
  }

  TEST_CASE("piecewise expectation") {
    CHECK(pw_expectation(PiecewisePolynomial::on_interval(Polynomial{0, 2}, 0, 1)) == Rational(2, 3));
    CHECK(pw_expectation(PiecewisePolynomial::constant(1)) == Rational(1, 2));
    CHECK(pw_expectation(PiecewisePolynomial::on_interval(Polynomial{2, -2}, 0, 1)) == Rational(1, 3));
    CHECK_THROWS_AS(pw_expectation(PiecewisePolynomial::constant(2)), PreconditionError);
  }

  TEST_CASE("piecewise arithmetic refines breakpoints") {
    const auto f = PiecewisePolynomial::on_interval(Polynomial{1}, 0, Rational(1, 2));
    const auto g = PiecewisePolynomial::on_interval(Polynomial{0, 1}, Rational(1, 4), 1);
    const auto sum = f + g;
    CHECK(sum(Rational(1, 8)) == Rational(1));
    CHECK(sum(Rational(3, 8)) == Rational(11, 8));
    CHECK(sum(Rational(3, 4)) == Rational(3, 4));
    CHECK((f * g).integral() == Polynomial{0, 1}.integrate(Rational(1, 4), Rational(1, 2)));
    CHECK(f.cumulative()(1) == Rational(1, 2));
    CHECK(g.reflected()(Rational(1, 4)) == Rational(3, 4));
    CHECK(f.truncated_above(Rational(1, 4)).integral() == Rational(1, 4));
    CHECK(g.truncated_below(Rational(1, 2)).integral() == Rational(3, 8));
  }

  TEST_CASE("canonical merges equal neighbours") {
    const PiecewisePolynomial split({0, Rational(1, 3), 1}, {Polynomial{0, 2}, Polynomial{0, 2}});
    const auto merged = split.canonical();
    CHECK(merged.size() == 1);
    CHECK(merged == PiecewisePolynomial::on_interval(Polynomial{0, 2}, 0, 1).canonical());
    CHECK(split.refined(std::vector<Rational>{Rational(1, 2)}).size() == 3);
  }
}
