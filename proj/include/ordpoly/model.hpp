#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ordpoly/constraint_set.hpp"

namespace ordpoly {

/// Result of merging every class of variables forced equal (x <= y and y <= x).
struct TieQuotient {
  /// Closed and tie-free. A class is named after its lexicographically
  /// smallest member and carries the exact value of any exact member.
  ConstraintSet quotient;
  /// Original variable -> quotient variable.
  std::vector<VarId> class_of;
  /// Quotient variable -> original members, in id order.
  std::vector<std::vector<VarId>> representatives;
};

/// Requires a consistent set (closed or not); throws InconsistentError otherwise.
TieQuotient collapse_ties(const ConstraintSet& cs);

/// True when two distinct variables are forced equal. Requires a closed set.
bool has_persistent_ties(const ConstraintSet& closed);

/// Covering relation of a closed, tie-free order.
struct HasseDiagram {
  /// up[i]: variables covering i; down[i]: variables covered by i. Both sorted.
  std::vector<std::vector<VarId>> up;
  std::vector<std::vector<VarId>> down;

  std::size_t size() const noexcept { return up.size(); }
  std::vector<OrderEdge> cover_edges() const;
};

/// Throws PreconditionError on persistent ties.
HasseDiagram hasse(const ConstraintSet& cs);

/// The closed set induced on `keep` (in the given order). Requires a closed set.
ConstraintSet restrict_to(const ConstraintSet& closed, std::span<const VarId> keep);

enum class Shape { total_order, tree, reverse_tree, general };

std::string_view to_string(Shape shape);

struct UninfluenceDecomposition {
  /// Unknown variables of the parent, one list per class, each sorted by id.
  std::vector<std::vector<VarId>> classes;
  /// parts[i] is the closed set over classes[i] followed by every exact variable.
  std::vector<ConstraintSet> parts;
  /// part_to_parent[i][j]: parent id of variable j of parts[i].
  std::vector<std::vector<VarId>> part_to_parent;
  /// Parent variable -> index of its class, or nullopt for exact variables.
  std::vector<std::optional<std::size_t>> class_index;
  std::vector<Shape> shapes;

  /// Index in parts[part] of a parent variable.
  VarId local_id(std::size_t part, VarId parent) const;
};

/// Requires a consistent, tie-free set (closed or not).
UninfluenceDecomposition decompose(const ConstraintSet& cs);

/// Number of free coordinates of the admissible polytope. Requires consistency.
std::size_t polytope_dimension(const ConstraintSet& cs);

/// Shape of a closed, tie-free set whose unknowns form a single uninfluence
/// class. Exact values act as the root and the leaves; the bounds 0 and 1 stand
/// in for a missing root or missing leaves. An exact variable that bounds
/// several unknowns counts as a separate leaf for each.
Shape classify_shape(const ConstraintSet& part);

}  // namespace ordpoly
