#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ordpoly/constraint_set.hpp"
#include "ordpoly/piecewise.hpp"
#include "ordpoly/polynomial.hpp"
#include "ordpoly/rational.hpp"

namespace ordpoly {

/// Constraint file layout:
///
///   {"variables": ["x", "y", "z"],
///    "order": [["x", "y"], ["y", "z"]],
///    "exact": {"x": "3/10", "z": "0.7"}}
///
/// Order pairs read "first <= second". Exact values are "p/q" strings, decimal
/// strings (parsed exactly) or the integers 0 and 1; JSON floats are refused
/// because they would already have lost precision. Names used in "order" or
/// "exact" must be declared in "variables". Throws InputError.
ConstraintSet constraints_from_json(const nlohmann::json& doc);
ConstraintSet parse_constraints(std::string_view text);
ConstraintSet load_constraints(const std::filesystem::path& path);

/// Inverse of constraints_from_json; a closed set lists its whole implied order.
nlohmann::json constraints_to_json(const ConstraintSet& cs);

/// {"exact": "p/q", "approx": 12 significant digits}
nlohmann::json value_json(const Rational& value);
/// {"approx": ...} for estimates.
nlohmann::json value_json(double estimate);

/// Ascending coefficient strings.
nlohmann::json polynomial_json(const Polynomial& p);
/// {"breakpoints": [...], "pieces": [[...], ...]}
nlohmann::json piecewise_json(const PiecewisePolynomial& f);

/// Decimal text of a double with 12 significant digits.
std::string format_double(double value);

}  // namespace ordpoly
