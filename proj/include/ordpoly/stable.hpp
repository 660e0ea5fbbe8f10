#pragma once

#include <cstddef>
#include <vector>

#include "ordpoly/constraint_set.hpp"
#include "ordpoly/rational.hpp"
#include "ordpoly/tree_engine.hpp"

namespace ordpoly {

enum class Scheme { uniform, stable };

/// Stable and balanced values of the nodes of `t`, in original coordinates.
/// Top-down: a node x whose parent has value v_y gets
///   min over leaves z below x of  v_y + (v_z - v_y) / (d + 1),
/// d being the number of edges from x to z, so a leaf directly above x
/// yields the midpoint (v_y + v_z) / 2.
std::vector<Rational> stable_interpolate(const ConstraintTree& t);

/// Values of every variable of `cs` (indexed by id) under `scheme`, part by
/// part. Every part must be a tree or a reverse tree.
std::vector<Rational> interpolate_forest(const ConstraintSet& cs, Scheme scheme);

struct StabilityChange {
  VarId variable;
  Rational before;
  Rational after;
};

struct StabilityReport {
  bool stable = true;
  Rational pinned_value;
  std::vector<StabilityChange> changes;
};

/// Pins x to its value under `scheme`, recomputes every variable with the
/// same scheme and compares exactly.
StabilityReport check_stability(const ConstraintSet& cs, VarId x, Scheme scheme = Scheme::stable);

}  // namespace ordpoly
