#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ordpoly/analysis.hpp"
#include "ordpoly/constraint_set.hpp"
#include "ordpoly/rational.hpp"

namespace ordpoly {

/// local: the k largest expected values.
/// u: the most probable sequence of the k largest values.
/// global: the k variables most likely to be among the k largest values.
enum class Semantics { local, u, global };

std::string_view to_string(Semantics s);
std::optional<Semantics> parse_semantics(std::string_view text);

/// Largest number of distinct top-k sequences tracked by the u semantics.
inline constexpr std::size_t kMaxSequences = 1'000'000;

struct TopKEntry {
  VarId variable;
  /// Expected value (local), probability of the answer sequence (u) or
  /// probability of being among the k largest (global).
  Value annotation;
};

struct SequenceProbability {
  std::vector<VarId> sequence;
  Rational probability;
};

struct TopKResult {
  Semantics semantics = Semantics::local;
  std::size_t k = 0;
  std::vector<TopKEntry> entries;
  /// u only: probability of the answer sequence, and every sequence that
  /// occurs with positive probability, most probable first.
  std::optional<Rational> probability;
  std::vector<SequenceProbability> sequences;
  /// global only: the probability of every selected variable, in selection order.
  std::vector<TopKEntry> inclusion;
  Diagnostics diagnostics;

  std::vector<VarId> variables() const;
};

/// Ties between selected variables are broken by name everywhere. Variables
/// tied by the constraints count as distinct items placed in name order.
/// Requires k >= 1 and a non-empty selection of variables of `analysis`.
TopKResult local_topk(const Analysis& analysis, std::span<const VarId> selection, std::size_t k,
                      const QueryOptions& options = {});
TopKResult u_topk(const Analysis& analysis, std::span<const VarId> selection, std::size_t k,
                  const QueryOptions& options = {});
TopKResult global_topk(const Analysis& analysis, std::span<const VarId> selection, std::size_t k,
                       const QueryOptions& options = {});
TopKResult topk(const Analysis& analysis, Semantics semantics, std::span<const VarId> selection, std::size_t k,
                const QueryOptions& options = {});

struct ContainmentReport {
  bool holds = true;
  /// First k whose answer is not a strict prefix of the answer for k + 1.
  std::optional<std::size_t> violation_k;
  std::vector<VarId> smaller;
  std::vector<VarId> larger;
};

/// Checks k = 1 .. |selection| - 1.
ContainmentReport check_containment(const Analysis& analysis, Semantics semantics, std::span<const VarId> selection,
                                    const QueryOptions& options = {});

}  // namespace ordpoly
