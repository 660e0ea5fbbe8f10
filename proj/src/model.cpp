#include "ordpoly/model.hpp"

#include <algorithm>
#include <numeric>

#include "ordpoly/errors.hpp"

namespace ordpoly {

bool has_persistent_ties(const ConstraintSet& closed) {
  const BitMatrix& reach = closed.reach();
  for (std::size_t i = 0; i < closed.size(); ++i) {
    bool tied = false;
    reach.for_each_in_row(i, [&](std::size_t j) { tied = tied || (j != i && reach.test(j, i)); });
    if (tied) return true;
  }
  return false;
}

TieQuotient collapse_ties(const ConstraintSet& cs) {
  const ConstraintSet closed = closed_view(cs);
  require_consistent(closed);
  const BitMatrix& reach = closed.reach();
  const std::size_t n = closed.size();

  TieQuotient out;
  out.class_of.assign(n, var(0));
  std::vector<char> assigned(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (assigned[i] != 0) continue;
    const VarId cls = var(out.representatives.size());
    auto& members = out.representatives.emplace_back();
    reach.for_each_in_row(i, [&](std::size_t j) {
      if (reach.test(j, i)) {
        members.push_back(var(j));
        assigned[j] = 1;
        out.class_of[j] = cls;
      }
    });
  }

  const std::size_t m = out.representatives.size();
  std::vector<std::string> names;
  std::vector<std::optional<Rational>> exact(m);
  BitMatrix qreach(m);
  for (std::size_t c = 0; c < m; ++c) {
    const auto& members = out.representatives[c];
    const auto smallest = std::min_element(members.begin(), members.end(), [&](VarId a, VarId b) {
      return closed.name(a) < closed.name(b);
    });
    names.push_back(closed.name(*smallest));
    for (VarId v : members) {
      if (closed.is_exact(v)) exact[c] = closed.exact(v);
    }
    reach.for_each_in_row(idx(members.front()), [&](std::size_t j) { qreach.set(c, idx(out.class_of[j])); });
  }
  out.quotient = ConstraintSet::from_closure(std::move(names), std::move(exact), std::move(qreach));
  return out;
}

std::vector<OrderEdge> HasseDiagram::cover_edges() const {
  std::vector<OrderEdge> edges;
  for (std::size_t i = 0; i < up.size(); ++i) {
    for (VarId j : up[i]) edges.push_back({var(i), j});
  }
  return edges;
}

HasseDiagram hasse(const ConstraintSet& cs) {
  const ConstraintSet closed = closed_view(cs);
  if (has_persistent_ties(closed)) {
    throw PreconditionError("the Hasse diagram needs a tie-free constraint set; collapse ties first");
  }
  const BitMatrix& reach = closed.reach();
  const std::size_t n = closed.size();
  const std::size_t words = reach.words_per_row();
  HasseDiagram h;
  h.up.resize(n);
  h.down.resize(n);

  // j covers i iff j is a strict successor of i that no other strict successor reaches.
  std::vector<std::uint64_t> covered(words);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(covered.begin(), covered.end(), 0);
    reach.for_each_in_row(i, [&](std::size_t k) {
      if (k == i) return;
      const auto row = reach.row_words(k);
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t bits = row[w];
        if (w == k / 64) bits &= ~(std::uint64_t{1} << (k % 64));
        covered[w] |= bits;
      }
    });
    reach.for_each_in_row(i, [&](std::size_t j) {
      if (j == i || ((covered[j / 64] >> (j % 64)) & 1U) != 0) return;
      h.up[i].push_back(var(j));
      h.down[j].push_back(var(i));
    });
  }
  return h;
}

ConstraintSet restrict_to(const ConstraintSet& closed, std::span<const VarId> keep) {
  const BitMatrix& reach = closed.reach();
  std::vector<std::string> names;
  std::vector<std::optional<Rational>> exact;
  BitMatrix sub(keep.size());
  for (std::size_t a = 0; a < keep.size(); ++a) {
    names.push_back(closed.name(keep[a]));
    exact.push_back(closed.exact(keep[a]));
    for (std::size_t b = 0; b < keep.size(); ++b) {
      if (reach.test(idx(keep[a]), idx(keep[b]))) sub.set(a, b);
    }
  }
  return ConstraintSet::from_closure(std::move(names), std::move(exact), std::move(sub));
}

std::string_view to_string(Shape shape) {
  switch (shape) {
    case Shape::total_order: return "total-order";
    case Shape::tree: return "tree";
    case Shape::reverse_tree: return "reverse-tree";
    case Shape::general: return "general";
  }
  return "general";
}

namespace {

Shape shape_of(const ConstraintSet& part, const HasseDiagram& h) {
  // Each unknown has at most one exact cover on either side, since distinct
  // exact values are totally ordered; a missing cover is the bound 0 or 1.
  bool tree = true;
  bool reverse = true;
  for (VarId u : part.unknowns()) {
    tree = tree && h.down[idx(u)].size() <= 1;
    reverse = reverse && h.up[idx(u)].size() <= 1;
  }
  if (tree && reverse) return Shape::total_order;
  if (tree) return Shape::tree;
  if (reverse) return Shape::reverse_tree;
  return Shape::general;
}

}  // namespace

Shape classify_shape(const ConstraintSet& part) { return shape_of(part, hasse(part)); }

VarId UninfluenceDecomposition::local_id(std::size_t part, VarId parent) const {
  const auto& map = part_to_parent.at(part);
  const auto it = std::find(map.begin(), map.end(), parent);
  if (it == map.end()) throw PreconditionError("variable does not belong to this part");
  return var(static_cast<std::size_t>(it - map.begin()));
}

UninfluenceDecomposition decompose(const ConstraintSet& cs) {
  const ConstraintSet closed = closed_view(cs);
  require_consistent(closed);
  const HasseDiagram h = hasse(closed);
  const std::size_t n = closed.size();

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (closed.is_exact(var(i))) continue;
    for (VarId j : h.up[i]) {
      if (!closed.is_exact(j)) parent[find(i)] = find(idx(j));
    }
  }

  UninfluenceDecomposition out;
  out.class_index.assign(n, std::nullopt);
  std::vector<std::optional<std::size_t>> class_of_root(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (closed.is_exact(var(i))) continue;
    auto& slot = class_of_root[find(i)];
    if (!slot) {
      slot = out.classes.size();
      out.classes.emplace_back();
    }
    out.classes[*slot].push_back(var(i));
    out.class_index[i] = *slot;
  }

  const std::vector<VarId> exacts = closed.exacts();
  for (const auto& cls : out.classes) {
    std::vector<VarId> keep = cls;
    keep.insert(keep.end(), exacts.begin(), exacts.end());
    ConstraintSet part = restrict_to(closed, keep);
    // Covers inside a part are the parent's covers restricted to it.
    HasseDiagram ph;
    ph.up.resize(keep.size());
    ph.down.resize(keep.size());
    std::vector<std::optional<std::size_t>> local(n);
    for (std::size_t a = 0; a < keep.size(); ++a) local[idx(keep[a])] = a;
    for (std::size_t a = 0; a < keep.size(); ++a) {
      for (VarId j : h.up[idx(keep[a])]) {
        if (!local[idx(j)]) continue;
        ph.up[a].push_back(var(*local[idx(j)]));
        ph.down[*local[idx(j)]].push_back(var(a));
      }
    }
    out.shapes.push_back(shape_of(part, ph));
    out.parts.push_back(std::move(part));
    out.part_to_parent.push_back(std::move(keep));
  }
  return out;
}

std::size_t polytope_dimension(const ConstraintSet& cs) {
  const TieQuotient q = collapse_ties(cs);
  return q.quotient.size() - q.quotient.exact_count();
}

}  // namespace ordpoly
