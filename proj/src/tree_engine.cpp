#include "ordpoly/tree_engine.hpp"

#include <algorithm>
#include <deque>

#include "ordpoly/errors.hpp"

namespace ordpoly {

std::size_t ConstraintTree::node_of(VarId v) const {
  const auto it = std::find(nodes.begin(), nodes.end(), v);
  if (it == nodes.end()) throw PreconditionError("variable is not an unknown node of this tree");
  return static_cast<std::size_t>(it - nodes.begin());
}

ConstraintTree ConstraintTree::from_part(const ConstraintSet& part) {
  const HasseDiagram h = hasse(part);
  for (VarId u : part.unknowns()) {
    if (h.down[idx(u)].size() > 1) return from_part(part, Shape::reverse_tree);
  }
  return from_part(part, Shape::tree);
}

ConstraintTree ConstraintTree::from_part(const ConstraintSet& part, Shape orientation) {
  if (orientation != Shape::tree && orientation != Shape::reverse_tree) {
    throw PreconditionError("a constraint tree is oriented as a tree or a reverse tree");
  }
  const bool rev = orientation == Shape::reverse_tree;
  const HasseDiagram h = hasse(part);
  const auto& below = rev ? h.up : h.down;
  const auto& above = rev ? h.down : h.up;
  auto value = [&](VarId v) { return rev ? Rational(1) - *part.exact(v) : *part.exact(v); };

  ConstraintTree t;
  t.reversed = rev;
  const std::vector<VarId> unknowns = part.unknowns();
  if (unknowns.empty()) throw UnsupportedShapeError("a constraint tree needs at least one unknown");

  std::optional<VarId> first;
  for (VarId u : unknowns) {
    const auto& lower = below[idx(u)];
    if (lower.size() > 1) {
      throw UnsupportedShapeError("'" + part.name(u) + "' has several covers on the root side; not a " +
                                  std::string(to_string(orientation)));
    }
    if (lower.empty() || part.is_exact(lower.front())) {
      if (first) throw UnsupportedShapeError("the root has several children; decompose the constraint set first");
      first = u;
      t.root_value = lower.empty() ? Rational(0) : value(lower.front());
    }
  }
  if (!first) throw UnsupportedShapeError("no unknown sits directly above an exact root");

  // Breadth-first from the root child, so parents precede children.
  std::vector<std::int64_t> node_index(part.size(), -1);
  std::deque<VarId> queue{*first};
  node_index[idx(*first)] = 0;
  t.nodes.push_back(*first);
  t.parent.push_back(-1);
  while (!queue.empty()) {
    const VarId u = queue.front();
    queue.pop_front();
    const auto self = static_cast<std::size_t>(node_index[idx(u)]);
    t.children.emplace_back();
    t.leaf_values.emplace_back();
    for (VarId w : above[idx(u)]) {
      if (part.is_exact(w)) {
        t.leaf_values[self].push_back(value(w));
        continue;
      }
      if (node_index[idx(w)] >= 0) throw UnsupportedShapeError("the Hasse diagram is not a tree");
      node_index[idx(w)] = static_cast<std::int64_t>(t.nodes.size());
      t.children[self].push_back(t.nodes.size());
      t.nodes.push_back(w);
      t.parent.push_back(static_cast<std::int64_t>(self));
      queue.push_back(w);
    }
    if (above[idx(u)].empty()) t.leaf_values[self].emplace_back(1);
  }
  if (t.nodes.size() != unknowns.size()) {
    throw UnsupportedShapeError("the unknowns do not form a single uninfluence class");
  }

  t.min_leaf_below.resize(t.size());
  for (std::size_t i = t.size(); i-- > 0;) {
    Rational m = t.leaf_values[i].empty() ? Rational(1) : *std::min_element(t.leaf_values[i].begin(), t.leaf_values[i].end());
    for (std::size_t c : t.children[i]) m = std::min(m, t.min_leaf_below[c]);
    if (!(t.root_value < m)) throw PreconditionError("tree node is tied to the root; collapse ties first");
    t.min_leaf_below[i] = m;
  }
  return t;
}

std::vector<Polynomial> subtree_volumes(const ConstraintTree& t) {
  std::vector<Polynomial> v(t.size());
  for (std::size_t i = t.size(); i-- > 0;) {
    Polynomial product = Polynomial::constant(Rational(1));
    for (std::size_t c : t.children[i]) product *= v[c];
    const Polynomial anti = product.antiderivative();
    // V_x(v) = A(m_x) - A(v)
    v[i] = Polynomial::constant(anti(t.min_leaf_below[i])) - anti;
  }
  return v;
}

Rational volume_tree(const ConstraintTree& t) { return subtree_volumes(t)[t.root_child](t.root_value); }

namespace {

// Product of V_c over children of `node`, skipping `skip`.
Polynomial children_product(const ConstraintTree& t, const std::vector<Polynomial>& v, std::size_t node,
                            std::optional<std::size_t> skip) {
  Polynomial product = Polynomial::constant(Rational(1));
  for (std::size_t c : t.children[node]) {
    if (c != skip) product *= v[c];
  }
  return product;
}

// Upper limit for a node's own value from its leaves and the given children.
Rational own_limit(const ConstraintTree& t, std::size_t node, std::optional<std::size_t> skip) {
  Rational m(1);
  for (const auto& leaf : t.leaf_values[node]) m = std::min(m, leaf);
  for (std::size_t c : t.children[node]) {
    if (c != skip) m = std::min(m, t.min_leaf_below[c]);
  }
  return m;
}

}  // namespace

PiecewisePolynomial marginal_tree(const ConstraintTree& t, std::size_t node) {
  if (node >= t.size()) throw PreconditionError("node index out of range");
  const std::vector<Polynomial> v = subtree_volumes(t);
  const Rational volume = v[t.root_child](t.root_value);

  std::vector<std::size_t> path;
  for (auto n = static_cast<std::int64_t>(node); n >= 0; n = t.parent[static_cast<std::size_t>(n)]) {
    path.push_back(static_cast<std::size_t>(n));
  }
  std::reverse(path.begin(), path.end());

  // W(s): volume of the ancestors of `node` and their other subtrees, given
  // that the next node on the path takes the value s. Each ancestor u ranges
  // over [root, min(s, own limit)] and weighs in with its off-path subtrees.
  PiecewisePolynomial w = PiecewisePolynomial::on_interval(Polynomial::constant(Rational(1)), t.root_value, Rational(1));
  if (t.root_value == Rational(1)) throw PreconditionError("degenerate tree at the upper bound");
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const std::size_t u = path[i];
    const std::size_t next = path[i + 1];
    const auto g = PiecewisePolynomial::on_interval(children_product(t, v, u, next), t.root_value, own_limit(t, u, next));
    w = (g * w).cumulative();
  }

  const auto own = PiecewisePolynomial::on_interval(children_product(t, v, node, std::nullopt), t.root_value,
                                                    t.min_leaf_below[node]);
  PiecewisePolynomial density = own * w;
  density *= Rational(1) / volume;
  if (t.reversed) density = density.reflected();
  return density.canonical();
}

Rational interpolate_tree(const ConstraintTree& t, std::size_t node) { return pw_expectation(marginal_tree(t, node)); }

Rational interpolate_decomposed(const ConstraintSet& cs, VarId x) {
  const TieQuotient q = collapse_ties(cs);
  const VarId cls = q.class_of.at(idx(x));
  if (q.quotient.is_exact(cls)) return *q.quotient.exact(cls);
  const UninfluenceDecomposition d = decompose(q.quotient);
  const std::size_t part = *d.class_index[idx(cls)];
  const Shape shape = d.shapes[part];
  if (shape == Shape::general) {
    throw UnsupportedShapeError("the part holding '" + cs.name(x) +
                                "' is neither a tree nor a reverse tree; use the exact engine or the sampler");
  }
  const ConstraintTree t =
      ConstraintTree::from_part(d.parts[part], shape == Shape::reverse_tree ? Shape::reverse_tree : Shape::tree);
  return interpolate_tree(t, t.node_of(d.local_id(part, cls)));
}

}  // namespace ordpoly
