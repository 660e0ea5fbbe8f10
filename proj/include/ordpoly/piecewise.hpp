#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "ordpoly/polynomial.hpp"
#include "ordpoly/rational.hpp"

namespace ordpoly {

/// Piecewise polynomial on [b_0, b_r] ⊆ [0, 1]. Piece i is valid on [b_i, b_{i+1}].
///
/// Binary operations refine both operands to the union of their breakpoints.
/// Equality is structural; compare `canonical()` forms to test functional equality.
class PiecewisePolynomial {
 public:
  /// The zero function on [0, 1].
  PiecewisePolynomial();
  PiecewisePolynomial(std::vector<Rational> breakpoints, std::vector<Polynomial> pieces);

  /// `p` on [lo, hi] and zero on the rest of [0, 1].
  static PiecewisePolynomial on_interval(const Polynomial& p, const Rational& lo, const Rational& hi);
  static PiecewisePolynomial constant(const Rational& c);

  std::span<const Rational> breakpoints() const noexcept { return breakpoints_; }
  std::span<const Polynomial> pieces() const noexcept { return pieces_; }
  std::size_t size() const noexcept { return pieces_.size(); }
  const Rational& lower() const { return breakpoints_.front(); }
  const Rational& upper() const { return breakpoints_.back(); }
  int max_degree() const;

  /// Value at t; at an interior breakpoint the piece to its right is used.
  Rational operator()(const Rational& t) const;
  double evaluate(double t) const;

  /// Same function with extra breakpoints inserted (points outside the domain are ignored).
  PiecewisePolynomial refined(std::span<const Rational> extra) const;
  /// Zero for t > m.
  PiecewisePolynomial truncated_above(const Rational& m) const;
  /// Zero for t < a.
  PiecewisePolynomial truncated_below(const Rational& a) const;
  /// F(t) = integral of f from the domain start to t.
  PiecewisePolynomial cumulative() const;
  /// t -> f(1 - t)
  PiecewisePolynomial reflected() const;
  /// Adjacent pieces with identical polynomials merged.
  PiecewisePolynomial canonical() const;

  /// Integral over the whole domain.
  Rational integral() const;
  /// Integral of t * f(t) over the whole domain.
  Rational first_moment() const;

  PiecewisePolynomial& operator*=(const Rational& scalar);
  PiecewisePolynomial& operator*=(const Polynomial& p);

  friend PiecewisePolynomial operator+(const PiecewisePolynomial& a, const PiecewisePolynomial& b);
  friend PiecewisePolynomial operator*(const PiecewisePolynomial& a, const PiecewisePolynomial& b);
  friend PiecewisePolynomial operator*(PiecewisePolynomial a, const Rational& s) { return a *= s; }
  friend PiecewisePolynomial operator*(PiecewisePolynomial a, const Polynomial& p) { return a *= p; }

  friend bool operator==(const PiecewisePolynomial&, const PiecewisePolynomial&) = default;
  friend std::ostream& operator<<(std::ostream& os, const PiecewisePolynomial& f);

 private:
  std::size_t piece_index(const Rational& t) const;

  std::vector<Rational> breakpoints_;
  std::vector<Polynomial> pieces_;
};

/// Exact mean of a pdf. Throws PreconditionError carrying the total mass when
/// `pdf` does not integrate to exactly 1.
Rational pw_expectation(const PiecewisePolynomial& pdf);

}  // namespace ordpoly
