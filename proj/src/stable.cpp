#include "ordpoly/stable.hpp"

#include <optional>
#include <utility>

#include "ordpoly/errors.hpp"
#include "ordpoly/model.hpp"

namespace ordpoly {

std::vector<Rational> stable_interpolate(const ConstraintTree& t) {
  std::vector<Rational> value(t.size());
  std::vector<std::pair<std::size_t, std::size_t>> stack;  // node, edges from x
  // Nodes are stored parents first.
  for (std::size_t x = 0; x < t.size(); ++x) {
    const Rational& from = t.parent[x] < 0 ? t.root_value : value[static_cast<std::size_t>(t.parent[x])];
    std::optional<Rational> best;
    stack.assign(1, {x, 0});
    while (!stack.empty()) {
      const auto [n, depth] = stack.back();
      stack.pop_back();
      for (const auto& leaf : t.leaf_values[n]) {
        Rational candidate = from + (leaf - from) / Rational(static_cast<unsigned long>(depth + 2));
        if (!best || candidate < *best) best = std::move(candidate);
      }
      for (std::size_t c : t.children[n]) stack.emplace_back(c, depth + 1);
    }
    value[x] = *best;
  }
  if (t.reversed) {
    for (auto& v : value) v = Rational(1) - v;
  }
  return value;
}

std::vector<Rational> interpolate_forest(const ConstraintSet& cs, Scheme scheme) {
  const TieQuotient q = collapse_ties(cs);
  const UninfluenceDecomposition d = decompose(q.quotient);
  std::vector<Rational> per_class(q.quotient.size());
  for (VarId v : q.quotient.exacts()) per_class[idx(v)] = *q.quotient.exact(v);
  for (std::size_t p = 0; p < d.parts.size(); ++p) {
    if (d.shapes[p] == Shape::general) {
      throw UnsupportedShapeError("the part holding '" + q.quotient.name(d.classes[p].front()) +
                                  "' is neither a tree nor a reverse tree");
    }
    const ConstraintTree t = ConstraintTree::from_part(
        d.parts[p], d.shapes[p] == Shape::reverse_tree ? Shape::reverse_tree : Shape::tree);
    if (scheme == Scheme::stable) {
      const auto values = stable_interpolate(t);
      for (std::size_t n = 0; n < t.size(); ++n) per_class[idx(d.part_to_parent[p][idx(t.nodes[n])])] = values[n];
    } else {
      for (std::size_t n = 0; n < t.size(); ++n) {
        per_class[idx(d.part_to_parent[p][idx(t.nodes[n])])] = interpolate_tree(t, n);
      }
    }
  }
  std::vector<Rational> out;
  out.reserve(cs.size());
  for (VarId c : q.class_of) out.push_back(per_class[idx(c)]);
  return out;
}

StabilityReport check_stability(const ConstraintSet& cs, VarId x, Scheme scheme) {
  if (cs.is_exact(x)) throw PreconditionError("'" + cs.name(x) + "' already has an exact value");
  const auto before = interpolate_forest(cs, scheme);
  ConstraintSet pinned = cs;
  pinned.set_exact(x, before[idx(x)]);
  const auto after = interpolate_forest(pinned, scheme);

  StabilityReport report;
  report.pinned_value = before[idx(x)];
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (before[i] != after[i]) {
      report.stable = false;
      report.changes.push_back({var(i), before[i], after[i]});
    }
  }
  return report;
}

}  // namespace ordpoly
