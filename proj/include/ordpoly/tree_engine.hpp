#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ordpoly/constraint_set.hpp"
#include "ordpoly/model.hpp"
#include "ordpoly/piecewise.hpp"
#include "ordpoly/polynomial.hpp"
#include "ordpoly/rational.hpp"

namespace ordpoly {

/// Hasse tree of one tree-shaped (or reverse-tree-shaped) uninfluence part.
///
/// Nodes are the unknowns of the part. The root is an exact value below the
/// single root child; leaves are exact values above nodes, and a node with no
/// cover above it gets the bound 1 as a leaf. A reverse tree is stored in
/// flipped coordinates (v -> 1 - v, order reversed), so every computation on a
/// ConstraintTree is a computation on a tree; results are flipped back by the
/// callers that need values of the original variables.
struct ConstraintTree {
  bool reversed = false;
  Rational root_value;
  std::size_t root_child = 0;
  /// Part variable of each node.
  std::vector<VarId> nodes;
  /// -1 for the root child.
  std::vector<std::int64_t> parent;
  std::vector<std::vector<std::size_t>> children;
  /// Exact leaves directly above each node (flipped when reversed).
  std::vector<std::vector<Rational>> leaf_values;
  /// m_x: smallest leaf value in the subtree of each node.
  std::vector<Rational> min_leaf_below;

  std::size_t size() const noexcept { return nodes.size(); }
  /// Node of a part variable; throws PreconditionError for exact variables.
  std::size_t node_of(VarId v) const;

  /// Builds the tree of a closed, tie-free part whose unknowns form one
  /// uninfluence class. `orientation` must be Shape::tree or Shape::reverse_tree;
  /// throws UnsupportedShapeError when the part does not have that shape.
  static ConstraintTree from_part(const ConstraintSet& part, Shape orientation);
  /// Uses the tree orientation when possible, the reverse one otherwise.
  static ConstraintTree from_part(const ConstraintSet& part);
};

/// V_x for every node: the volume of the subtree of x as a function of the
/// value v of x's parent, a polynomial valid on [0, m_x] (zero beyond).
std::vector<Polynomial> subtree_volumes(const ConstraintTree& t);

Rational volume_tree(const ConstraintTree& t);

/// Density of a node on [0, 1] in canonical form, in original coordinates
/// (reflected back for reverse trees).
PiecewisePolynomial marginal_tree(const ConstraintTree& t, std::size_t node);

/// Expected value of a node in original coordinates.
Rational interpolate_tree(const ConstraintTree& t, std::size_t node);

/// Expected value of x through the uninfluence decomposition: only the part
/// holding x is evaluated. Throws UnsupportedShapeError when that part is
/// neither a tree nor a reverse tree.
Rational interpolate_decomposed(const ConstraintSet& cs, VarId x);

}  // namespace ordpoly
