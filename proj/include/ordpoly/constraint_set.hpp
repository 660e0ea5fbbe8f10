#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ordpoly/bit_matrix.hpp"
#include "ordpoly/rational.hpp"

namespace ordpoly {

/// Dense variable index within one ConstraintSet (ids are 0..n-1).
enum class VarId : std::uint32_t {};

constexpr std::size_t idx(VarId v) noexcept { return static_cast<std::size_t>(v); }
constexpr VarId var(std::size_t i) noexcept { return static_cast<VarId>(i); }

/// lo <= hi
struct OrderEdge {
  VarId lo;
  VarId hi;
  friend auto operator<=>(const OrderEdge&, const OrderEdge&) = default;
};

/// Unknown values in [0, 1] under order constraints (x <= y) and exact-value
/// constraints (x = v).
///
/// A set built through the mutators is "open". `close_under_implication`
/// returns a closed copy whose order edges are the full implied order, backed
/// by a reachability matrix; mutating a closed set reopens it.
class ConstraintSet {
 public:
  ConstraintSet() = default;

  /// Adds a variable; names must be unique and non-empty.
  VarId add_variable(std::string name);
  /// Returns the variable with this name, adding it when absent.
  VarId ensure_variable(std::string_view name);
  void add_order(VarId lo, VarId hi);
  /// Pins `v` to `value` in [0, 1]. Re-pinning to a different value is an input error.
  void set_exact(VarId v, const Rational& value);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(VarId v) const { return names_.at(idx(v)); }
  std::optional<VarId> find(std::string_view name) const;
  /// Like find, but throws InputError for unknown names.
  VarId variable(std::string_view name) const;

  const std::optional<Rational>& exact(VarId v) const { return exact_.at(idx(v)); }
  bool is_exact(VarId v) const { return exact_.at(idx(v)).has_value(); }
  std::size_t exact_count() const;
  std::vector<VarId> unknowns() const;
  std::vector<VarId> exacts() const;

  const std::vector<OrderEdge>& order_edges() const noexcept { return edges_; }

  bool closed() const noexcept { return reach_ != nullptr; }
  /// a <= b in the closed order (reflexive). Requires a closed set.
  bool leq(VarId a, VarId b) const;
  const BitMatrix& reach() const;

  /// Closed set over the given variables with a precomputed reflexive-transitive order.
  static ConstraintSet from_closure(std::vector<std::string> names, std::vector<std::optional<Rational>> exact,
                                    BitMatrix reach);

 private:
  void reopen();

  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> by_name_;
  std::vector<std::optional<Rational>> exact_;
  std::vector<OrderEdge> edges_;
  std::shared_ptr<const BitMatrix> reach_;
};

/// Transitive closure including the implications of exact values: exact
/// variables are ordered by value, a variable pinned to 0 lies below every
/// variable and one pinned to 1 above every variable. Idempotent; allowed on
/// inconsistent input.
ConstraintSet close_under_implication(const ConstraintSet& cs);

/// Returns `cs` itself when already closed, its closure otherwise.
ConstraintSet closed_view(const ConstraintSet& cs);

struct ConsistencyReport {
  bool ok = true;
  /// Chain of order constraints from a larger exact value down to a smaller one.
  std::vector<VarId> witness;
  std::string message;
};

/// Consistent iff the admissible polytope is non-empty.
ConsistencyReport check_consistency(const ConstraintSet& cs);

/// Throws InconsistentError when check_consistency fails.
void require_consistent(const ConstraintSet& cs);

}  // namespace ordpoly
