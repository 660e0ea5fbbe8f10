#pragma once

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <vector>

#include "ordpoly/rational.hpp"

namespace ordpoly {

/// Dense univariate polynomial with exact rational coefficients, stored in
/// ascending degree. Trailing zero coefficients are never stored, so the zero
/// polynomial has no coefficients at all.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coefficients);
  Polynomial(std::initializer_list<Rational> coefficients);

  static Polynomial constant(const Rational& c);
  /// c * t^degree
  static Polynomial monomial(const Rational& c, std::size_t degree);
  /// a + b * t
  static Polynomial linear(const Rational& a, const Rational& b);

  bool is_zero() const noexcept { return coefficients_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }
  std::span<const Rational> coefficients() const noexcept { return coefficients_; }
  /// Coefficient of t^i (zero beyond the degree).
  Rational coefficient(std::size_t i) const;

  Rational operator()(const Rational& t) const;
  double evaluate(double t) const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Polynomial& rhs);
  Polynomial& operator*=(const Rational& scalar);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  Polynomial operator-() const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  /// Antiderivative with zero constant term.
  Polynomial antiderivative() const;
  Polynomial derivative() const;
  /// Exact definite integral over [a, b]; requires a <= b.
  Rational integrate(const Rational& a, const Rational& b) const;
  /// t -> p(scale * t + shift)
  Polynomial compose_affine(const Rational& scale, const Rational& shift) const;

  friend std::ostream& operator<<(std::ostream& os, const Polynomial& p);

 private:
  void trim();

  std::vector<Rational> coefficients_;
};

}  // namespace ordpoly
