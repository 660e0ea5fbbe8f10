#include "ordpoly/topk.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "ordpoly/errors.hpp"
#include "ordpoly/extensions.hpp"

namespace ordpoly {

std::string_view to_string(Semantics s) {
  switch (s) {
    case Semantics::local: return "local";
    case Semantics::u: return "u";
    case Semantics::global: return "global";
  }
  return "local";
}

std::optional<Semantics> parse_semantics(std::string_view text) {
  if (text == "local") return Semantics::local;
  if (text == "u") return Semantics::u;
  if (text == "global") return Semantics::global;
  return std::nullopt;
}

std::vector<VarId> TopKResult::variables() const {
  std::vector<VarId> out;
  for (const auto& e : entries) out.push_back(e.variable);
  return out;
}

namespace {

struct VecHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = v.size();
    for (std::uint32_t x : v) h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

void validate(const Analysis& analysis, std::span<const VarId> selection, std::size_t k) {
  if (k < 1) throw InputError("k must be at least 1");
  if (selection.empty()) throw InputError("the selection is empty");
  std::unordered_set<std::size_t> seen;
  for (VarId v : selection) {
    if (idx(v) >= analysis.original().size()) throw InputError("selected variable id out of range");
    if (!seen.insert(idx(v)).second) throw InputError("'" + analysis.original().name(v) + "' is selected twice");
  }
}

bool name_less(const ConstraintSet& cs, VarId a, VarId b) { return cs.name(a) < cs.name(b); }

// The selected variables as items of an extension space over the parts that
// hold them (plus every exact value); by independence of the parts, extensions
// of this smaller set carry the same joint distribution of the selected values.
struct RankingSpace {
  ExtensionSpace space;
  /// For each element of the space, the selected items it stands for, in name order.
  std::vector<std::vector<std::uint32_t>> items;

  static RankingSpace build(const Analysis& analysis, std::span<const VarId> selection) {
    const auto& d = analysis.decomposition();
    const ConstraintSet& q = analysis.quotient();
    std::vector<char> wanted(d.parts.size(), 0);
    for (VarId v : selection) {
      if (auto p = analysis.part_of(v)) wanted[*p] = 1;
    }
    std::vector<VarId> keep;
    for (std::size_t p = 0; p < d.parts.size(); ++p) {
      if (wanted[p] != 0) keep.insert(keep.end(), d.classes[p].begin(), d.classes[p].end());
    }
    const auto exacts = q.exacts();
    keep.insert(keep.end(), exacts.begin(), exacts.end());
    std::sort(keep.begin(), keep.end());

    std::vector<std::optional<std::uint32_t>> local(q.size());
    for (std::size_t i = 0; i < keep.size(); ++i) local[idx(keep[i])] = static_cast<std::uint32_t>(i);
    std::vector<std::vector<std::uint32_t>> items(keep.size());
    std::vector<std::uint32_t> order(selection.size());
    for (std::uint32_t s = 0; s < selection.size(); ++s) order[s] = s;
    const ConstraintSet& cs = analysis.original();
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return name_less(cs, selection[a], selection[b]); });
    for (std::uint32_t s : order) items[*local[idx(analysis.class_of(selection[s]))]].push_back(s);
    return {ExtensionSpace(restrict_to(q, keep)), std::move(items)};
  }

  // The first k selected items from the top of an extension.
  void top(std::span<const std::uint32_t> order, std::size_t k, std::vector<std::uint32_t>& out) const {
    out.clear();
    for (auto it = order.rbegin(); it != order.rend() && out.size() < k; ++it) {
      for (std::uint32_t s : items[*it]) {
        if (out.size() == k) break;
        out.push_back(s);
      }
    }
  }
};

// Fragment-size classes of extensions, with per-class weights computed once.
struct SizeIds {
  std::unordered_map<std::vector<std::uint32_t>, std::uint32_t, VecHash> ids;
  std::vector<std::vector<std::uint32_t>> keys;

  std::uint32_t id_of(const std::vector<std::uint32_t>& sizes) {
    const auto [it, inserted] = ids.try_emplace(sizes, static_cast<std::uint32_t>(keys.size()));
    if (inserted) keys.push_back(sizes);
    return it->second;
  }
};

struct UTally {
  SizeIds sizes;
  std::unordered_map<std::vector<std::uint32_t>, std::unordered_map<std::uint32_t, std::uint64_t>, VecHash> by_sequence;
};

struct GlobalTally {
  SizeIds sizes;
  std::vector<std::uint64_t> totals;
  std::vector<std::vector<std::uint64_t>> hits;  // [size id][selected item]
};

unsigned worker_count(const QueryOptions& options) { return std::max(1U, options.enumeration.threads); }

struct StatsScope {
  EngineStats stats;
  EnumerationOptions options;
  TopKResult& result;

  StatsScope(const QueryOptions& q, TopKResult& r) : options(q.enumeration), result(r) {
    options.stats = &stats;
    result.diagnostics.used("exact");
  }
  ~StatsScope() { result.diagnostics.extensions += stats.extensions; }
  StatsScope(const StatsScope&) = delete;
  StatsScope& operator=(const StatsScope&) = delete;
};

void require_enumeration(const QueryOptions& options, Semantics s) {
  if (options.engine == Engine::sample || options.engine == Engine::tree) {
    throw InputError(std::string(to_string(s)) + "-top-k needs --engine auto or exact; only local-top-k can be " +
                     "evaluated with the " + std::string(to_string(options.engine)) + " engine");
  }
}

}  // namespace

TopKResult local_topk(const Analysis& analysis, std::span<const VarId> selection, std::size_t k,
                      const QueryOptions& options) {
  validate(analysis, selection, k);
  const ConstraintSet& cs = analysis.original();
  TopKResult result;
  result.semantics = Semantics::local;
  result.k = k;
  if (options.engine == Engine::sample) {
    std::size_t used = 0;
    for (const auto& e : estimate_topk(cs, selection, k, options.sampler, &used)) {
      result.entries.push_back(
          {e.variable, e.exact ? analysis.interpolate(e.variable, options) : Value::estimate(e.value)});
    }
    if (used > 0) {
      result.diagnostics.used("sample");
      result.diagnostics.samples = used;
    }
    return result;
  }
  for (VarId v : selection) result.entries.push_back({v, analysis.interpolate(v, options, &result.diagnostics)});
  std::sort(result.entries.begin(), result.entries.end(), [&](const TopKEntry& a, const TopKEntry& b) {
    const int c = cmp(a.annotation.exact->raw(), b.annotation.exact->raw());
    if (c != 0) return c > 0;
    return name_less(cs, a.variable, b.variable);
  });
  if (result.entries.size() > k) result.entries.resize(k);
  return result;
}

TopKResult u_topk(const Analysis& analysis, std::span<const VarId> selection, std::size_t k,
                  const QueryOptions& options) {
  validate(analysis, selection, k);
  require_enumeration(options, Semantics::u);
  const ConstraintSet& cs = analysis.original();
  TopKResult result;
  result.semantics = Semantics::u;
  result.k = k;
  const RankingSpace rs = RankingSpace::build(analysis, selection);

  std::vector<UTally> local(worker_count(options));
  {
    const StatsScope scope(options, result);
    rs.space.enumerate(scope.options, [&](std::size_t w) {
      return [&rs, &tally = local[w], k, sizes = std::vector<std::uint32_t>(),
              seq = std::vector<std::uint32_t>()](std::span<const std::uint32_t> order) mutable {
        rs.top(order, k, seq);
        rs.space.fragment_sizes(order, sizes);
        const std::uint32_t id = tally.sizes.id_of(sizes);
        auto [it, inserted] = tally.by_sequence.try_emplace(seq);
        if (inserted && tally.by_sequence.size() > kMaxSequences) {
          throw BudgetError("more than " + std::to_string(kMaxSequences) + " distinct top-k sequences");
        }
        ++it->second[id];
      };
    });
  }

  // Merge workers and turn counts into exact probabilities.
  std::map<std::vector<std::uint32_t>, Rational> mass;
  Rational total;
  for (auto& tally : local) {
    std::vector<Rational> weights;
    for (const auto& key : tally.sizes.keys) weights.push_back(rs.space.weight(key));
    for (const auto& [seq, counts] : tally.by_sequence) {
      Rational m;
      for (const auto& [id, count] : counts) m += weights[id] * Rational(count);
      mass[seq] += m;
      total += m;
    }
  }
  if (mass.size() > kMaxSequences) {
    throw BudgetError("more than " + std::to_string(kMaxSequences) + " distinct top-k sequences");
  }
  for (auto& [seq, m] : mass) {
    SequenceProbability sp;
    for (std::uint32_t s : seq) sp.sequence.push_back(selection[s]);
    sp.probability = m / total;
    result.sequences.push_back(std::move(sp));
  }
  auto names = [&](const std::vector<VarId>& seq) {
    std::vector<std::string> out;
    for (VarId v : seq) out.push_back(cs.name(v));
    return out;
  };
  std::sort(result.sequences.begin(), result.sequences.end(), [&](const auto& a, const auto& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return names(a.sequence) < names(b.sequence);
  });
  const auto& best = result.sequences.front();
  result.probability = best.probability;
  for (VarId v : best.sequence) result.entries.push_back({v, Value::of(best.probability)});
  return result;
}

TopKResult global_topk(const Analysis& analysis, std::span<const VarId> selection, std::size_t k,
                       const QueryOptions& options) {
  validate(analysis, selection, k);
  require_enumeration(options, Semantics::global);
  const ConstraintSet& cs = analysis.original();
  TopKResult result;
  result.semantics = Semantics::global;
  result.k = k;
  const RankingSpace rs = RankingSpace::build(analysis, selection);
  const std::size_t items = selection.size();

  std::vector<GlobalTally> local(worker_count(options));
  {
    const StatsScope scope(options, result);
    rs.space.enumerate(scope.options, [&](std::size_t w) {
      return [&rs, &tally = local[w], k, items, sizes = std::vector<std::uint32_t>(),
              seq = std::vector<std::uint32_t>()](std::span<const std::uint32_t> order) mutable {
        rs.top(order, k, seq);
        rs.space.fragment_sizes(order, sizes);
        const std::uint32_t id = tally.sizes.id_of(sizes);
        if (id == tally.totals.size()) {
          tally.totals.push_back(0);
          tally.hits.emplace_back(items, 0);
        }
        ++tally.totals[id];
        for (std::uint32_t s : seq) ++tally.hits[id][s];
      };
    });
  }

  std::vector<Rational> mass(items);
  Rational total;
  for (auto& tally : local) {
    for (std::size_t id = 0; id < tally.sizes.keys.size(); ++id) {
      const Rational w = rs.space.weight(tally.sizes.keys[id]);
      total += w * Rational(tally.totals[id]);
      for (std::size_t s = 0; s < items; ++s) {
        if (tally.hits[id][s] != 0) mass[s] += w * Rational(tally.hits[id][s]);
      }
    }
  }
  for (std::size_t s = 0; s < items; ++s) result.inclusion.push_back({selection[s], Value::of(mass[s] / total)});
  result.entries = result.inclusion;
  std::sort(result.entries.begin(), result.entries.end(), [&](const TopKEntry& a, const TopKEntry& b) {
    if (*a.annotation.exact != *b.annotation.exact) return *a.annotation.exact > *b.annotation.exact;
    return name_less(cs, a.variable, b.variable);
  });
  if (result.entries.size() > k) result.entries.resize(k);
  return result;
}

TopKResult topk(const Analysis& analysis, Semantics semantics, std::span<const VarId> selection, std::size_t k,
                const QueryOptions& options) {
  switch (semantics) {
    case Semantics::local: return local_topk(analysis, selection, k, options);
    case Semantics::u: return u_topk(analysis, selection, k, options);
    case Semantics::global: return global_topk(analysis, selection, k, options);
  }
  throw InputError("unknown semantics");
}

ContainmentReport check_containment(const Analysis& analysis, Semantics semantics, std::span<const VarId> selection,
                                    const QueryOptions& options) {
  ContainmentReport report;
  if (selection.size() < 2) return report;
  std::vector<VarId> previous = topk(analysis, semantics, selection, 1, options).variables();
  for (std::size_t k = 1; k < selection.size(); ++k) {
    std::vector<VarId> next = topk(analysis, semantics, selection, k + 1, options).variables();
    const bool strict_prefix =
        next.size() > previous.size() && std::equal(previous.begin(), previous.end(), next.begin());
    if (!strict_prefix) {
      report.holds = false;
      report.violation_k = k;
      report.smaller = std::move(previous);
      report.larger = std::move(next);
      return report;
    }
    previous = std::move(next);
  }
  return report;
}

}  // namespace ordpoly
