#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace ordpoly::testing {

namespace {

// One run of unknowns between two consecutive exact values (or the bounds).
struct Run {
  Rational alpha;
  Rational beta;
  std::vector<VarId> members;  // ascending
};

// Splits `perm` into runs, or returns false when the permutation does not
// respect the order constraints or puts exact values out of order.
bool runs_of(const ConstraintSet& cs, const std::vector<VarId>& perm, std::vector<Run>& runs) {
  std::vector<std::size_t> pos(cs.size());
  for (std::size_t i = 0; i < perm.size(); ++i) pos[idx(perm[i])] = i;
  for (const OrderEdge& e : cs.order_edges()) {
    if (cs.is_exact(e.lo) && cs.is_exact(e.hi)) {
      if (*cs.exact(e.lo) > *cs.exact(e.hi)) return false;
    } else if (pos[idx(e.lo)] > pos[idx(e.hi)]) {
      return false;
    }
  }
  runs.assign(1, Run{Rational(0), Rational(0), {}});
  const VarId* last_exact = nullptr;
  for (const VarId& v : perm) {
    if (!cs.is_exact(v)) {
      runs.back().members.push_back(v);
      continue;
    }
    const Rational& value = *cs.exact(v);
    if (last_exact != nullptr) {
      const Rational& prev = *cs.exact(*last_exact);
      // equal values are taken in id order so each region is counted once
      if (value < prev || (value == prev && idx(v) < idx(*last_exact))) return false;
    }
    last_exact = &v;
    runs.back().beta = value;
    runs.push_back(Run{value, Rational(0), {}});
  }
  runs.back().beta = Rational(1);
  return true;
}

Rational run_volume(const Run& r) {
  return pow(r.beta - r.alpha, static_cast<unsigned>(r.members.size())) /
         factorial(static_cast<unsigned>(r.members.size()));
}

// (t - a)^k
Polynomial power_of_linear(const Rational& a, unsigned k) {
  Polynomial out = Polynomial::constant(1);
  for (unsigned i = 0; i < k; ++i) out *= Polynomial::linear(-a, 1);
  return out;
}

template <typename F>
void for_each_order(const ConstraintSet& cs, F&& f) {
  if (cs.size() > 10) throw std::invalid_argument("brute force limited to 10 variables");
  std::vector<VarId> perm;
  for (std::size_t i = 0; i < cs.size(); ++i) perm.push_back(var(i));
  std::vector<Run> runs;
  do {
    if (runs_of(cs, perm, runs)) f(perm, runs);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace

BruteForce brute_force(const ConstraintSet& cs) {
  BruteForce out;
  std::vector<Rational> weighted(cs.size());
  std::vector<Rational> rank_sum(cs.size());
  for_each_order(cs, [&](const std::vector<VarId>& perm, const std::vector<Run>& runs) {
    Rational vol(1);
    for (const Run& r : runs) vol *= run_volume(r);
    if (vol.is_zero()) return;
    ++out.orders;
    out.volume += vol;
    for (const Run& r : runs) {
      const Rational n(r.members.size());
      for (std::size_t k = 0; k < r.members.size(); ++k) {
        weighted[idx(r.members[k])] += vol * (r.alpha + (r.beta - r.alpha) * Rational(k + 1) / (n + 1));
      }
    }
    for (std::size_t i = 0; i < perm.size(); ++i) rank_sum[idx(perm[i])] += Rational(i + 1);
  });
  if (out.volume.is_zero()) throw std::invalid_argument("brute force: empty or degenerate polytope");
  for (std::size_t v = 0; v < cs.size(); ++v) {
    out.means.push_back(cs.is_exact(var(v)) ? *cs.exact(var(v)) : weighted[v] / out.volume);
    out.ranks.push_back(rank_sum[v] / Rational(out.orders));
  }
  return out;
}

PiecewisePolynomial brute_force_marginal(const ConstraintSet& cs, VarId x) {
  PiecewisePolynomial density;
  Rational total;
  for_each_order(cs, [&](const std::vector<VarId>&, const std::vector<Run>& runs) {
    Rational vol(1);
    for (const Run& r : runs) vol *= run_volume(r);
    if (vol.is_zero()) return;
    total += vol;
    for (const Run& r : runs) {
      const auto it = std::find(r.members.begin(), r.members.end(), x);
      if (it == r.members.end()) continue;
      const auto n = static_cast<unsigned>(r.members.size());
      const auto k = static_cast<unsigned>(it - r.members.begin()) + 1;
      Rational others = vol / run_volume(r);
      // the run's own volume with x pinned at t, split below and above
      Polynomial shape = power_of_linear(r.alpha, k - 1) * power_of_linear(r.beta, n - k);
      if ((n - k) % 2 == 1) shape *= Rational(-1);
      shape *= others / (factorial(k - 1) * factorial(n - k));
      density = density + PiecewisePolynomial::on_interval(shape, r.alpha, r.beta);
    }
  });
  return (density * (Rational(1) / total)).canonical();
}

Polynomial beta_density(unsigned i, unsigned n, const Rational& alpha, const Rational& beta) {
  // n! / ((i-1)! (n-i)!) * u^(i-1) * sum_j C(n-i, j) (-u)^j
  const Rational c = factorial(n) / (factorial(i - 1) * factorial(n - i));
  std::vector<Rational> coeffs(n, Rational(0));
  for (unsigned j = 0; j <= n - i; ++j) {
    coeffs[i - 1 + j] = c * binomial(n - i, j) * (j % 2 == 0 ? Rational(1) : Rational(-1));
  }
  const Rational width = beta - alpha;
  // u = (t - alpha) / width, and the density picks up 1 / width
  return Polynomial(coeffs).compose_affine(Rational(1) / width, -alpha / width) * (Rational(1) / width);
}

RejectionEstimate rejection_sample(const ConstraintSet& cs, std::uint64_t accepted, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = cs.size();
  std::vector<double> point(n);
  std::vector<double> sum(n, 0.0);
  std::vector<double> sum_sq(n, 0.0);
  RejectionEstimate out;
  while (out.accepted < accepted) {
    ++out.proposed;
    for (std::size_t v = 0; v < n; ++v) point[v] = cs.is_exact(var(v)) ? cs.exact(var(v))->to_double() : unit(rng);
    bool ok = true;
    for (const OrderEdge& e : cs.order_edges()) {
      if (point[idx(e.lo)] > point[idx(e.hi)]) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    ++out.accepted;
    for (std::size_t v = 0; v < n; ++v) {
      sum[v] += point[v];
      sum_sq[v] += point[v] * point[v];
    }
  }
  const auto count = static_cast<double>(out.accepted);
  for (std::size_t v = 0; v < n; ++v) {
    const double mean = sum[v] / count;
    const double variance = std::max(0.0, sum_sq[v] / count - mean * mean);
    out.mean.push_back(mean);
    out.standard_error.push_back(std::sqrt(variance / count));
  }
  return out;
}

}  // namespace ordpoly::testing
