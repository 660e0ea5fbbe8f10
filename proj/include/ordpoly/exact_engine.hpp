#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ordpoly/constraint_set.hpp"
#include "ordpoly/extensions.hpp"
#include "ordpoly/piecewise.hpp"
#include "ordpoly/rational.hpp"

namespace ordpoly {

/// Volume of the ordered simplex {alpha <= t_1 <= ... <= t_n <= beta} with n = q - p - 1.
Rational volume_frag(std::size_t p, std::size_t q, const Rational& alpha, const Rational& beta);

/// Mean of the unknown at position k in that simplex: ((k - p) / (n + 1)) (beta - alpha) + alpha.
Rational expected_val_frag(std::size_t p, std::size_t q, std::size_t k, const Rational& alpha, const Rational& beta);

/// The functions below accept any consistent set; they close it and collapse
/// ties first, and `x` refers to a variable of `cs` itself. They throw
/// InconsistentError on contradictions and BudgetError past the extension budget.

/// Expected value of x under the uniform density on the admissible polytope.
Rational interpolate_exact(const ConstraintSet& cs, VarId x, const EnumerationOptions& options = {});

/// d-volume of the admissible polytope, d being its dimension.
Rational volume_exact(const ConstraintSet& cs, const EnumerationOptions& options = {});

/// Density of x on [0, 1], in canonical form. Throws PreconditionError when x is exact.
PiecewisePolynomial marginal_exact(const ConstraintSet& cs, VarId x, const EnumerationOptions& options = {});

/// Mean rank (1-based, over extensions taken uniformly) of x among the
/// unknowns. Requires a set without exact values and without ties.
Rational expected_rank(const ConstraintSet& cs, VarId x, const EnumerationOptions& options = {});

/// Expected values of every variable of `cs`, indexed by id, from one enumeration.
std::vector<Rational> interpolate_exact_all(const ConstraintSet& cs, const EnumerationOptions& options = {});

/// Variants on an already closed, tie-free set wrapped in an ExtensionSpace;
/// variables are elements of the space.
std::vector<Rational> space_expected_values(const ExtensionSpace& space, std::span<const VarId> tracked,
                                            const EnumerationOptions& options);
Rational space_volume(const ExtensionSpace& space, const EnumerationOptions& options);
PiecewisePolynomial space_marginal(const ExtensionSpace& space, VarId x, const EnumerationOptions& options);

/// Calls f(order, volume) for every extension of the tie-collapsed set, with
/// the order given as names of quotient variables.
void for_each_extension_volume(const ConstraintSet& cs, const EnumerationOptions& options,
                               const std::function<void(std::span<const std::string* const>, const Rational&)>& f);

}  // namespace ordpoly
