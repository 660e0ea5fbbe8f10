#include "ordpoly/polynomial.hpp"

#include <stdexcept>

#include "ordpoly/errors.hpp"

namespace ordpoly {

namespace {

// Integer coefficients over a common denominator: p(t) = sum(num[i] t^i) / den.
struct ScaledIntegers {
  std::vector<mpz_class> num;
  mpz_class den = 1;
};

ScaledIntegers to_integers(std::span<const Rational> coeffs) {
  ScaledIntegers out;
  for (const auto& c : coeffs) {
    mpz_lcm(out.den.get_mpz_t(), out.den.get_mpz_t(), c.raw().get_den_mpz_t());
  }
  out.num.reserve(coeffs.size());
  for (const auto& c : coeffs) {
    mpz_class scaled = out.den / c.raw().get_den();
    scaled *= c.raw().get_num();
    out.num.push_back(std::move(scaled));
  }
  return out;
}

}  // namespace

Polynomial::Polynomial(std::vector<Rational> coefficients) : coefficients_(std::move(coefficients)) {
  trim();
}

Polynomial::Polynomial(std::initializer_list<Rational> coefficients) : coefficients_(coefficients) {
  trim();
}

Polynomial Polynomial::constant(const Rational& c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(const Rational& c, std::size_t degree) {
  std::vector<Rational> coeffs(degree + 1);
  coeffs[degree] = c;
  return Polynomial(std::move(coeffs));
}

Polynomial Polynomial::linear(const Rational& a, const Rational& b) { return Polynomial({a, b}); }

void Polynomial::trim() {
  while (!coefficients_.empty() && coefficients_.back().is_zero()) coefficients_.pop_back();
}

Rational Polynomial::coefficient(std::size_t i) const {
  return i < coefficients_.size() ? coefficients_[i] : Rational();
}

Rational Polynomial::operator()(const Rational& t) const {
  mpq_class acc;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
    acc *= t.raw();
    acc += it->raw();
  }
  return Rational(std::move(acc));
}

double Polynomial::evaluate(double t) const {
  double acc = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
    acc = acc * t + it->to_double();
  }
  return acc;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (rhs.coefficients_.size() > coefficients_.size()) coefficients_.resize(rhs.coefficients_.size());
  for (std::size_t i = 0; i < rhs.coefficients_.size(); ++i) coefficients_[i] += rhs.coefficients_[i];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (rhs.coefficients_.size() > coefficients_.size()) coefficients_.resize(rhs.coefficients_.size());
  for (std::size_t i = 0; i < rhs.coefficients_.size(); ++i) coefficients_[i] -= rhs.coefficients_[i];
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.coefficients_.size() == 1) return b * a.coefficients_[0];
  if (b.coefficients_.size() == 1) return a * b.coefficients_[0];

  const ScaledIntegers x = to_integers(a.coefficients_);
  const ScaledIntegers y = to_integers(b.coefficients_);
  std::vector<mpz_class> prod(x.num.size() + y.num.size() - 1);
  for (std::size_t i = 0; i < x.num.size(); ++i) {
    if (x.num[i] == 0) continue;
    for (std::size_t j = 0; j < y.num.size(); ++j) {
      mpz_addmul(prod[i + j].get_mpz_t(), x.num[i].get_mpz_t(), y.num[j].get_mpz_t());
    }
  }
  const mpz_class den = x.den * y.den;
  std::vector<Rational> coeffs;
  coeffs.reserve(prod.size());
  for (auto& c : prod) coeffs.emplace_back(c, den);
  return Polynomial(std::move(coeffs));
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
  *this = *this * rhs;
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& scalar) {
  if (scalar.is_zero()) {
    coefficients_.clear();
    return *this;
  }
  for (auto& c : coefficients_) c *= scalar;
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& c : out.coefficients_) c = -c;
  return out;
}

Polynomial Polynomial::antiderivative() const {
  if (is_zero()) return {};
  std::vector<Rational> coeffs(coefficients_.size() + 1);
  for (std::size_t i = 0; i < coefficients_.size(); ++i) {
    coeffs[i + 1] = coefficients_[i] / Rational(static_cast<long>(i + 1));
  }
  return Polynomial(std::move(coeffs));
}

Polynomial Polynomial::derivative() const {
  if (coefficients_.size() <= 1) return {};
  std::vector<Rational> coeffs(coefficients_.size() - 1);
  for (std::size_t i = 1; i < coefficients_.size(); ++i) {
    coeffs[i - 1] = coefficients_[i] * Rational(static_cast<long>(i));
  }
  return Polynomial(std::move(coeffs));
}

Rational Polynomial::integrate(const Rational& a, const Rational& b) const {
  if (a > b) throw PreconditionError("integration bounds out of order: " + a.str() + " > " + b.str());
  const Polynomial anti = antiderivative();
  return anti(b) - anti(a);
}

Polynomial Polynomial::compose_affine(const Rational& scale, const Rational& shift) const {
  // Horner in the polynomial ring: p(u) with u = scale * t + shift.
  const Polynomial u = linear(shift, scale);
  Polynomial out;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
    out = out * u + constant(*it);
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const Polynomial& p) {
  if (p.is_zero()) return os << "0";
  bool first = true;
  for (std::size_t i = 0; i < p.coefficients_.size(); ++i) {
    const auto& c = p.coefficients_[i];
    if (c.is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << c << ")";
    if (i >= 1) os << "*t";
    if (i >= 2) os << "^" << i;
  }
  return os;
}

}  // namespace ordpoly
