#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "ordpoly/constraint_set.hpp"

namespace ordpoly::testing {

using Rng = std::mt19937_64;

// A rational strictly between lo and hi with a small denominator.
Rational random_rational(Rng& rng, const Rational& lo, const Rational& hi);

// Tree-shaped set: an optional exact root with one unknown child, up to
// max_unknowns unknowns hanging off it, and random exact leaves above the
// root value. With allow_reverse, half of the sets come out flipped.
ConstraintSet random_tree_set(Rng& rng, std::size_t max_unknowns, bool allow_reverse = true);

// Every order reversed and every exact value v replaced by 1 - v.
ConstraintSet flipped(const ConstraintSet& cs);

// n unknowns, no exact values, each pair ordered with the given probability
// along a hidden random permutation.
ConstraintSet random_order_set(Rng& rng, std::size_t n, double edge_probability);

// Groups of unknowns stacked between increasing exact separators, with a
// random order inside each group. At most max_unknowns unknowns in total.
ConstraintSet random_separated_set(Rng& rng, std::size_t max_unknowns);

// Unknowns and exact variables ordered consistently with a hidden random
// world: a pair whose world values are increasing is constrained with the
// given probability. Always consistent.
ConstraintSet random_world_set(Rng& rng, std::size_t unknowns, std::size_t exacts, double edge_probability);

// `base` with extra variables forced equal to base variables through cycles
// of order constraints; some base constraints are rerouted through the copies.
struct TiedSet {
  ConstraintSet tied;
  // tied variable -> the base variable it must equal
  std::vector<VarId> base_of;
};
TiedSet inject_ties(Rng& rng, const ConstraintSet& base, std::size_t copies);

}  // namespace ordpoly::testing
