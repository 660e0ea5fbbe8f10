#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ordpoly/constraint_set.hpp"
#include "ordpoly/model.hpp"
#include "ordpoly/rational.hpp"

namespace ordpoly {

inline constexpr std::uint64_t kDefaultMaxExtensions = 10'000'000;

struct EngineStats {
  std::uint64_t extensions = 0;
};

struct EnumerationOptions {
  std::uint64_t max_extensions = kDefaultMaxExtensions;
  /// Worker threads; 0 and 1 both mean sequential.
  unsigned threads = 1;
  /// Filled in by the engines when non-null.
  EngineStats* stats = nullptr;
};

/// A linear extension of a tie-free set. Positions count the lower bound 0 as
/// position 0, so the variable order[i] sits at position i + 1 and the upper
/// bound 1 at position order.size() + 1.
struct LinearExtension {
  std::vector<VarId> order;
  /// Positions (in the convention above) of the exact variables, ascending.
  std::vector<std::size_t> exact_positions;
};

/// A maximal run of unknowns between two consecutive exact values.
struct FragmentView {
  std::size_t p = 0;
  std::size_t q = 0;
  Rational alpha;
  Rational beta;
  /// Positions of the unknowns in the run (p < position < q).
  std::vector<std::size_t> member_ranks;
};

/// Called once per extension with the element order.
using ExtensionVisitor = std::function<void(std::span<const std::uint32_t>)>;

/// Linear extensions of a closed, tie-free constraint set. Exact variables are
/// elements like any other; since the closure orders them by value, every
/// extension places them in value order and the fragment boundaries are the
/// same for all extensions.
class ExtensionSpace {
 public:
  explicit ExtensionSpace(const ConstraintSet& cs);

  const ConstraintSet& constraints() const noexcept { return cs_; }
  std::size_t size() const noexcept { return cs_.size(); }
  const HasseDiagram& covers() const noexcept { return hasse_; }

  /// Fragment f spans [bounds()[f], bounds()[f + 1]]; there are exact_count() + 1 fragments.
  std::span<const Rational> bounds() const noexcept { return bounds_; }
  std::size_t fragment_count() const noexcept { return bounds_.size() - 1; }
  /// Exact elements get the index of the fragment they close, unknowns -1.
  std::int32_t exact_rank(std::uint32_t element) const { return exact_rank_[element]; }

  /// Number of extensions, saturating at options.max_extensions + 1. Uses a
  /// memoised count over down-sets when the set is small enough; otherwise the
  /// budget is enforced during enumeration instead.
  std::uint64_t count(const EnumerationOptions& options) const;

  /// Visits every extension. `make_visitor(w)` is called once per worker and
  /// each worker sees a disjoint share of the extensions. Throws BudgetError
  /// (before visiting anything, when the count is known) past the budget.
  void enumerate(const EnumerationOptions& options,
                 const std::function<ExtensionVisitor(std::size_t worker)>& make_visitor) const;

  /// Product over fragments of (beta - alpha)^n / n!.
  Rational weight(std::span<const std::uint32_t> fragment_sizes) const;

  /// Fragment sizes of one extension.
  void fragment_sizes(std::span<const std::uint32_t> order, std::vector<std::uint32_t>& sizes) const;

 private:
  ConstraintSet cs_;
  HasseDiagram hasse_;
  std::vector<Rational> bounds_;
  std::vector<std::int32_t> exact_rank_;
};

std::uint64_t count_extensions(const ConstraintSet& cs, const EnumerationOptions& options = {});

/// All extensions of a closed, tie-free set; intended for small sets.
std::vector<LinearExtension> enumerate_extensions(const ConstraintSet& cs, const EnumerationOptions& options = {});

/// Fragments of one extension of `cs`.
std::vector<FragmentView> fragments(const ConstraintSet& cs, const LinearExtension& ext);

}  // namespace ordpoly
