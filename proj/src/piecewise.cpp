#include "ordpoly/piecewise.hpp"

#include <algorithm>

#include "ordpoly/errors.hpp"

namespace ordpoly {

PiecewisePolynomial::PiecewisePolynomial() : breakpoints_{Rational(0), Rational(1)}, pieces_(1) {}

PiecewisePolynomial::PiecewisePolynomial(std::vector<Rational> breakpoints, std::vector<Polynomial> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  if (breakpoints_.size() != pieces_.size() + 1 || pieces_.empty()) {
    throw PreconditionError("piecewise polynomial needs one more breakpoint than pieces");
  }
  if (breakpoints_.front() < Rational(0) || breakpoints_.back() > Rational(1)) {
    throw PreconditionError("piecewise polynomial breakpoints must lie in [0, 1]");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i - 1] < breakpoints_[i])) {
      throw PreconditionError("piecewise polynomial breakpoints must be strictly increasing");
    }
  }
}

PiecewisePolynomial PiecewisePolynomial::on_interval(const Polynomial& p, const Rational& lo,
                                                     const Rational& hi) {
  if (!(lo < hi)) throw PreconditionError("empty interval [" + lo.str() + ", " + hi.str() + "]");
  std::vector<Rational> bps;
  std::vector<Polynomial> pieces;
  bps.emplace_back(0);
  if (lo > Rational(0)) {
    pieces.emplace_back();
    bps.push_back(lo);
  }
  pieces.push_back(p);
  bps.push_back(hi);
  if (hi < Rational(1)) {
    pieces.emplace_back();
    bps.emplace_back(1);
  }
  return {std::move(bps), std::move(pieces)};
}

PiecewisePolynomial PiecewisePolynomial::constant(const Rational& c) {
  return {{Rational(0), Rational(1)}, {Polynomial::constant(c)}};
}

int PiecewisePolynomial::max_degree() const {
  int d = -1;
  for (const auto& p : pieces_) d = std::max(d, p.degree());
  return d;
}

std::size_t PiecewisePolynomial::piece_index(const Rational& t) const {
  if (t < lower() || t > upper()) {
    throw PreconditionError("point " + t.str() + " outside the piecewise domain");
  }
  // First breakpoint strictly greater than t, minus one.
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const auto idx = static_cast<std::size_t>(it - breakpoints_.begin());
  return std::min(idx == 0 ? 0 : idx - 1, pieces_.size() - 1);
}

Rational PiecewisePolynomial::operator()(const Rational& t) const { return pieces_[piece_index(t)](t); }

double PiecewisePolynomial::evaluate(double t) const {
  std::size_t idx = 0;
  while (idx + 1 < pieces_.size() && breakpoints_[idx + 1].to_double() <= t) ++idx;
  return pieces_[idx].evaluate(t);
}

PiecewisePolynomial PiecewisePolynomial::refined(std::span<const Rational> extra) const {
  std::vector<Rational> points(breakpoints_.begin(), breakpoints_.end());
  for (const auto& e : extra) {
    if (e > lower() && e < upper()) points.push_back(e);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() == breakpoints_.size()) return *this;

  std::vector<Polynomial> pieces;
  pieces.reserve(points.size() - 1);
  std::size_t src = 0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    while (breakpoints_[src + 1] <= points[i]) ++src;
    pieces.push_back(pieces_[src]);
  }
  return {std::move(points), std::move(pieces)};
}

PiecewisePolynomial PiecewisePolynomial::truncated_above(const Rational& m) const {
  const Rational cut[] = {m};
  PiecewisePolynomial out = refined(cut);
  for (std::size_t i = 0; i < out.pieces_.size(); ++i) {
    if (out.breakpoints_[i] >= m) out.pieces_[i] = Polynomial();
  }
  return out;
}

PiecewisePolynomial PiecewisePolynomial::truncated_below(const Rational& a) const {
  const Rational cut[] = {a};
  PiecewisePolynomial out = refined(cut);
  for (std::size_t i = 0; i < out.pieces_.size(); ++i) {
    if (out.breakpoints_[i + 1] <= a) out.pieces_[i] = Polynomial();
  }
  return out;
}

PiecewisePolynomial PiecewisePolynomial::cumulative() const {
  std::vector<Polynomial> pieces;
  pieces.reserve(pieces_.size());
  Rational carried;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Polynomial anti = pieces_[i].antiderivative();
    const Rational start = anti(breakpoints_[i]);
    pieces.push_back(anti + Polynomial::constant(carried - start));
    carried += anti(breakpoints_[i + 1]) - start;
  }
  return {breakpoints_, std::move(pieces)};
}

PiecewisePolynomial PiecewisePolynomial::reflected() const {
  std::vector<Rational> bps;
  std::vector<Polynomial> pieces;
  bps.reserve(breakpoints_.size());
  pieces.reserve(pieces_.size());
  for (auto it = breakpoints_.rbegin(); it != breakpoints_.rend(); ++it) bps.push_back(Rational(1) - *it);
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    pieces.push_back(it->compose_affine(Rational(-1), Rational(1)));
  }
  return {std::move(bps), std::move(pieces)};
}

PiecewisePolynomial PiecewisePolynomial::canonical() const {
  std::vector<Rational> bps{breakpoints_.front()};
  std::vector<Polynomial> pieces{pieces_.front()};
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    if (pieces_[i] == pieces.back()) continue;
    bps.push_back(breakpoints_[i]);
    pieces.push_back(pieces_[i]);
  }
  bps.push_back(breakpoints_.back());
  return {std::move(bps), std::move(pieces)};
}

Rational PiecewisePolynomial::integral() const {
  Rational total;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    total += pieces_[i].integrate(breakpoints_[i], breakpoints_[i + 1]);
  }
  return total;
}

Rational PiecewisePolynomial::first_moment() const {
  const Polynomial t = Polynomial::monomial(Rational(1), 1);
  Rational total;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    total += (pieces_[i] * t).integrate(breakpoints_[i], breakpoints_[i + 1]);
  }
  return total;
}

PiecewisePolynomial& PiecewisePolynomial::operator*=(const Rational& scalar) {
  for (auto& p : pieces_) p *= scalar;
  return *this;
}

PiecewisePolynomial& PiecewisePolynomial::operator*=(const Polynomial& p) {
  for (auto& piece : pieces_) piece *= p;
  return *this;
}

namespace {

void require_same_domain(const PiecewisePolynomial& a, const PiecewisePolynomial& b) {
  if (a.lower() != b.lower() || a.upper() != b.upper()) {
    throw PreconditionError("piecewise operands have different domains");
  }
}

}  // namespace

PiecewisePolynomial operator+(const PiecewisePolynomial& a, const PiecewisePolynomial& b) {
  require_same_domain(a, b);
  PiecewisePolynomial x = a.refined(b.breakpoints_);
  const PiecewisePolynomial y = b.refined(x.breakpoints_);
  for (std::size_t i = 0; i < x.pieces_.size(); ++i) x.pieces_[i] += y.pieces_[i];
  return x;
}

PiecewisePolynomial operator*(const PiecewisePolynomial& a, const PiecewisePolynomial& b) {
  require_same_domain(a, b);
  PiecewisePolynomial x = a.refined(b.breakpoints_);
  const PiecewisePolynomial y = b.refined(x.breakpoints_);
  for (std::size_t i = 0; i < x.pieces_.size(); ++i) x.pieces_[i] *= y.pieces_[i];
  return x;
}

std::ostream& operator<<(std::ostream& os, const PiecewisePolynomial& f) {
  for (std::size_t i = 0; i < f.pieces_.size(); ++i) {
    os << "[" << f.breakpoints_[i] << ", " << f.breakpoints_[i + 1] << "]: " << f.pieces_[i] << "\n";
  }
  return os;
}

Rational pw_expectation(const PiecewisePolynomial& pdf) {
  const Rational mass = pdf.integral();
  if (mass != Rational(1)) {
    throw PreconditionError("density is not normalized: total mass " + mass.str());
  }
  return pdf.first_moment();
}

}  // namespace ordpoly
