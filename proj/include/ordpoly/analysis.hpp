#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ordpoly/constraint_set.hpp"
#include "ordpoly/extensions.hpp"
#include "ordpoly/model.hpp"
#include "ordpoly/piecewise.hpp"
#include "ordpoly/rational.hpp"
#include "ordpoly/sampler.hpp"
#include "ordpoly/stable.hpp"

namespace ordpoly {

/// automatic: the tree engine on tree-shaped parts, enumeration on the others.
/// exact: enumeration over the whole tie-collapsed set.
/// tree: the tree engine only; other shapes are refused.
/// sample: hit-and-run estimates.
enum class Engine { automatic, exact, tree, sample };

std::string_view to_string(Engine engine);
/// Accepts "auto", "exact", "tree" and "sample".
std::optional<Engine> parse_engine(std::string_view text);

struct QueryOptions {
  Engine engine = Engine::automatic;
  EnumerationOptions enumeration;
  SamplerConfig sampler;
};

/// An exact value, or an estimate when only the sampler ran.
struct Value {
  std::optional<Rational> exact;
  double approx = 0;

  static Value of(const Rational& r) { return {r, r.to_double()}; }
  static Value estimate(double v) { return {std::nullopt, v}; }
};

struct Diagnostics {
  /// Engines that ran, e.g. "tree", "exact", "tree+exact", "sample", or "none".
  std::string engine = "none";
  std::uint64_t extensions = 0;
  std::size_t samples = 0;

  void used(std::string_view name);
};

/// Everything derived from a constraint set before any query: its closure,
/// the tie-collapsed quotient and the uninfluence decomposition of that
/// quotient. Construction throws InconsistentError on contradictions.
class Analysis {
 public:
  explicit Analysis(const ConstraintSet& cs);

  const ConstraintSet& original() const noexcept { return original_; }
  const ConstraintSet& closed() const noexcept { return closed_; }
  const TieQuotient& ties() const noexcept { return ties_; }
  const ConstraintSet& quotient() const noexcept { return ties_.quotient; }
  const UninfluenceDecomposition& decomposition() const noexcept { return parts_; }
  std::size_t dimension() const noexcept { return quotient().size() - quotient().exact_count(); }

  /// Quotient class of an original variable.
  VarId class_of(VarId x) const { return ties_.class_of.at(idx(x)); }
  /// Part index holding an original variable, nullopt for exact ones.
  std::optional<std::size_t> part_of(VarId x) const { return parts_.class_index.at(idx(class_of(x))); }

  Value interpolate(VarId x, const QueryOptions& options, Diagnostics* diag = nullptr) const;
  /// Values of all original variables, indexed by id.
  std::vector<Value> interpolate_all(const QueryOptions& options, Diagnostics* diag = nullptr) const;
  /// Values under the stable scheme; every part must be a tree or reverse tree.
  std::vector<Rational> interpolate_stable() const;

  Rational volume(const QueryOptions& options, Diagnostics* diag = nullptr) const;
  PiecewisePolynomial marginal(VarId x, const QueryOptions& options, Diagnostics* diag = nullptr) const;

 private:
  void require_tree_engine(std::size_t part) const;

  ConstraintSet original_;
  ConstraintSet closed_;
  TieQuotient ties_;
  UninfluenceDecomposition parts_;
};

}  // namespace ordpoly
