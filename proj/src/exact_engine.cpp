#include "ordpoly/exact_engine.hpp"

#include <map>
#include <unordered_map>

#include "ordpoly/errors.hpp"
#include "ordpoly/model.hpp"

namespace ordpoly {

Rational volume_frag(std::size_t p, std::size_t q, const Rational& alpha, const Rational& beta) {
  if (!(p < q)) throw PreconditionError("fragment needs p < q");
  if (beta < alpha) throw PreconditionError("fragment needs alpha <= beta");
  const auto n = static_cast<unsigned>(q - p - 1);
  return pow(beta - alpha, n) / factorial(n);
}

Rational expected_val_frag(std::size_t p, std::size_t q, std::size_t k, const Rational& alpha, const Rational& beta) {
  if (!(p < k && k < q)) throw PreconditionError("fragment position needs p < k < q");
  if (beta < alpha) throw PreconditionError("fragment needs alpha <= beta");
  const auto n = static_cast<long long>(q - p - 1);
  return Rational(mpz_class(static_cast<long>(k - p)), mpz_class(static_cast<long>(n + 1))) * (beta - alpha) + alpha;
}

namespace {

struct SizesHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = v.size();
    for (std::uint32_t x : v) h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

std::uint64_t pack(std::uint32_t id, std::uint32_t fragment, std::uint32_t rank) {
  return (std::uint64_t{id} << 32) | (std::uint64_t{fragment} << 16) | rank;
}

// Extension counts grouped by fragment sizes, plus, for each tracked
// variable, counts grouped by (sizes, fragment, rank within the fragment).
// Everything exact is derived from these integers afterwards.
struct PositionTally {
  std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, SizesHash> ids;
  std::vector<std::vector<std::uint32_t>> keys;
  std::vector<std::uint64_t> counts;
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> per_var;

  std::uint32_t id_of(const std::vector<std::uint32_t>& sizes) {
    const auto [it, inserted] = ids.try_emplace(sizes, static_cast<std::uint32_t>(keys.size()));
    if (inserted) {
      keys.push_back(sizes);
      counts.push_back(0);
    }
    return it->second;
  }
};

PositionTally tally_positions(const ExtensionSpace& space, std::span<const VarId> tracked,
                              const EnumerationOptions& options) {
  if (space.fragment_count() >= (1U << 16) || space.size() >= (1U << 16)) {
    throw BudgetError("constraint set too large for the exact engine");
  }
  const std::size_t workers = std::max(1U, options.threads);
  std::vector<PositionTally> local(workers);
  for (auto& t : local) t.per_var.resize(tracked.size());

  space.enumerate(options, [&](std::size_t w) {
    return [&space, &tracked, &tally = local[w], sizes = std::vector<std::uint32_t>(),
            frag = std::vector<std::uint32_t>(space.size()),
            rank = std::vector<std::uint32_t>(space.size())](std::span<const std::uint32_t> order) mutable {
      sizes.assign(space.fragment_count(), 0);
      std::uint32_t f = 0;
      for (std::uint32_t e : order) {
        const std::int32_t r = space.exact_rank(e);
        if (r >= 0) {
          f = static_cast<std::uint32_t>(r) + 1;
        } else {
          frag[e] = f;
          rank[e] = ++sizes[f];
        }
      }
      const std::uint32_t id = tally.id_of(sizes);
      ++tally.counts[id];
      for (std::size_t t = 0; t < tracked.size(); ++t) {
        const std::size_t e = idx(tracked[t]);
        ++tally.per_var[t][pack(id, frag[e], rank[e])];
      }
    };
  });

  PositionTally merged = std::move(local.front());
  for (std::size_t w = 1; w < workers; ++w) {
    auto& part = local[w];
    std::vector<std::uint32_t> remap(part.keys.size());
    for (std::size_t i = 0; i < part.keys.size(); ++i) {
      remap[i] = merged.id_of(part.keys[i]);
      merged.counts[remap[i]] += part.counts[i];
    }
    for (std::size_t t = 0; t < tracked.size(); ++t) {
      for (const auto& [key, count] : part.per_var[t]) {
        const auto id = static_cast<std::uint32_t>(key >> 32);
        merged.per_var[t][(std::uint64_t{remap[id]} << 32) | (key & 0xffffffffULL)] += count;
      }
    }
  }
  return merged;
}

std::vector<Rational> key_weights(const ExtensionSpace& space, const PositionTally& tally) {
  std::vector<Rational> w;
  w.reserve(tally.keys.size());
  for (const auto& k : tally.keys) w.push_back(space.weight(k));
  return w;
}

Rational total_volume(const PositionTally& tally, const std::vector<Rational>& weights) {
  Rational v;
  for (std::size_t i = 0; i < weights.size(); ++i) v += weights[i] * Rational(tally.counts[i]);
  return v;
}

// Quotient data every public entry point starts from.
struct Prepared {
  TieQuotient ties;
  ExtensionSpace space;

  explicit Prepared(const ConstraintSet& cs) : ties(collapse_ties(cs)), space(ties.quotient) {}
};

// (t - a)^k
Polynomial shifted_power(const Rational& a, unsigned k) {
  Polynomial out = Polynomial::constant(Rational(1));
  const Polynomial base = Polynomial::linear(-a, Rational(1));
  for (unsigned i = 0; i < k; ++i) out *= base;
  return out;
}

}  // namespace

std::vector<Rational> space_expected_values(const ExtensionSpace& space, std::span<const VarId> tracked,
                                            const EnumerationOptions& options) {
  const ConstraintSet& cs = space.constraints();
  std::vector<VarId> unknown;
  for (VarId v : tracked) {
    if (!cs.is_exact(v)) unknown.push_back(v);
  }
  std::vector<Rational> out(tracked.size());
  for (std::size_t i = 0; i < tracked.size(); ++i) {
    if (cs.is_exact(tracked[i])) out[i] = *cs.exact(tracked[i]);
  }
  if (unknown.empty()) return out;

  const PositionTally tally = tally_positions(space, unknown, options);
  const auto weights = key_weights(space, tally);
  const Rational volume = total_volume(tally, weights);
  const auto bounds = space.bounds();
  std::size_t u = 0;
  for (std::size_t i = 0; i < tracked.size(); ++i) {
    if (cs.is_exact(tracked[i])) continue;
    Rational acc;
    for (const auto& [key, count] : tally.per_var[u]) {
      const auto id = static_cast<std::uint32_t>(key >> 32);
      const auto f = static_cast<std::uint32_t>((key >> 16) & 0xffffU);
      const auto r = static_cast<std::uint32_t>(key & 0xffffU);
      const std::uint32_t n = tally.keys[id][f];
      acc += weights[id] * Rational(count) * expected_val_frag(0, n + 1, r, bounds[f], bounds[f + 1]);
    }
    out[i] = acc / volume;
    ++u;
  }
  return out;
}

Rational space_volume(const ExtensionSpace& space, const EnumerationOptions& options) {
  const PositionTally tally = tally_positions(space, {}, options);
  return total_volume(tally, key_weights(space, tally));
}

PiecewisePolynomial space_marginal(const ExtensionSpace& space, VarId x, const EnumerationOptions& options) {
  if (space.constraints().is_exact(x)) {
    throw PreconditionError("'" + space.constraints().name(x) + "' has an exact value and no density");
  }
  const VarId tracked[] = {x};
  const PositionTally tally = tally_positions(space, tracked, options);
  const auto weights = key_weights(space, tally);
  const Rational volume = total_volume(tally, weights);
  const auto bounds = space.bounds();

  std::vector<Polynomial> per_fragment(space.fragment_count());
  std::map<std::pair<std::uint32_t, std::uint32_t>, Polynomial> shapes;  // (fragment, rank, n) -> density shape
  for (const auto& [key, count] : tally.per_var[0]) {
    const auto id = static_cast<std::uint32_t>(key >> 32);
    const auto f = static_cast<std::uint32_t>((key >> 16) & 0xffffU);
    const auto r = static_cast<std::uint32_t>(key & 0xffffU);
    const auto& sizes = tally.keys[id];
    const std::uint32_t n = sizes[f];
    // The fragment holding x contributes (t - alpha)^(r-1) (beta - t)^(n-r) / ((r-1)! (n-r)!)
    // instead of its volume; the other fragments contribute their volumes.
    Rational others(1);
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      if (g != f && sizes[g] != 0) others *= pow(bounds[g + 1] - bounds[g], sizes[g]) / factorial(sizes[g]);
    }
    auto [it, inserted] = shapes.try_emplace({f, (n << 16) | r});
    if (inserted) {
      Polynomial below = shifted_power(bounds[f], r - 1);
      Polynomial above = shifted_power(bounds[f + 1], n - r);
      if ((n - r) % 2 == 1) above = -above;  // (beta - t)^k = (-1)^k (t - beta)^k
      it->second = below * above * (Rational(1) / (factorial(r - 1) * factorial(n - r)));
    }
    per_fragment[f] += it->second * (others * Rational(count));
  }

  std::vector<Rational> bps{bounds[0]};
  std::vector<Polynomial> pieces;
  for (std::size_t f = 0; f < per_fragment.size(); ++f) {
    if (bounds[f + 1] == bounds[f]) continue;
    pieces.push_back(per_fragment[f] * (Rational(1) / volume));
    bps.push_back(bounds[f + 1]);
  }
  return PiecewisePolynomial(std::move(bps), std::move(pieces)).canonical();
}

Rational interpolate_exact(const ConstraintSet& cs, VarId x, const EnumerationOptions& options) {
  const Prepared prep(cs);
  const VarId cls = prep.ties.class_of.at(idx(x));
  if (prep.ties.quotient.is_exact(cls)) return *prep.ties.quotient.exact(cls);
  const VarId tracked[] = {cls};
  return space_expected_values(prep.space, tracked, options).front();
}

std::vector<Rational> interpolate_exact_all(const ConstraintSet& cs, const EnumerationOptions& options) {
  const Prepared prep(cs);
  std::vector<VarId> all;
  for (std::size_t i = 0; i < prep.ties.quotient.size(); ++i) all.push_back(var(i));
  const auto per_class = space_expected_values(prep.space, all, options);
  std::vector<Rational> out;
  out.reserve(cs.size());
  for (VarId c : prep.ties.class_of) out.push_back(per_class[idx(c)]);
  return out;
}

Rational volume_exact(const ConstraintSet& cs, const EnumerationOptions& options) {
  const Prepared prep(cs);
  return space_volume(prep.space, options);
}

PiecewisePolynomial marginal_exact(const ConstraintSet& cs, VarId x, const EnumerationOptions& options) {
  const Prepared prep(cs);
  const VarId cls = prep.ties.class_of.at(idx(x));
  if (prep.ties.quotient.is_exact(cls)) {
    throw PreconditionError("'" + cs.name(x) + "' has an exact value and no density");
  }
  return space_marginal(prep.space, cls, options);
}

Rational expected_rank(const ConstraintSet& cs, VarId x, const EnumerationOptions& options) {
  if (cs.exact_count() != 0) {
    throw PreconditionError("expected_rank needs a constraint set without exact values");
  }
  const ConstraintSet closed = closed_view(cs);
  if (has_persistent_ties(closed)) throw PreconditionError("expected_rank needs a tie-free constraint set");
  const ExtensionSpace space(closed);
  const VarId tracked[] = {x};
  const PositionTally tally = tally_positions(space, tracked, options);
  std::uint64_t extensions = 0;
  for (auto c : tally.counts) extensions += c;
  Rational sum;
  for (const auto& [key, count] : tally.per_var[0]) sum += Rational(key & 0xffffU) * Rational(count);
  return sum / Rational(extensions);
}

void for_each_extension_volume(const ConstraintSet& cs, const EnumerationOptions& options,
                               const std::function<void(std::span<const std::string* const>, const Rational&)>& f) {
  const Prepared prep(cs);
  EnumerationOptions sequential = options;
  sequential.threads = 1;
  std::unordered_map<std::vector<std::uint32_t>, Rational, SizesHash> cache;
  std::vector<std::uint32_t> sizes;
  std::vector<const std::string*> names;
  prep.space.enumerate(sequential, [&](std::size_t) {
    return [&](std::span<const std::uint32_t> order) {
      prep.space.fragment_sizes(order, sizes);
      auto it = cache.find(sizes);
      if (it == cache.end()) it = cache.emplace(sizes, prep.space.weight(sizes)).first;
      names.clear();
      for (std::uint32_t e : order) names.push_back(&prep.ties.quotient.name(var(e)));
      f(names, it->second);
    };
  });
}

}  // namespace ordpoly
