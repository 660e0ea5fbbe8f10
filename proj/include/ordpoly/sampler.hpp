#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "ordpoly/constraint_set.hpp"
#include "ordpoly/model.hpp"

namespace ordpoly {

struct SamplerConfig {
  double epsilon = 0.05;
  double delta = 0.05;
  /// Steps discarded before the first kept sample; nullopt means 1000 * dimension.
  std::optional<std::size_t> burn_in;
  /// Steps between kept samples; nullopt means the dimension.
  std::optional<std::size_t> thinning;
  std::uint64_t seed = 0;
  /// Independent chains, seeded seed + chain index.
  std::size_t chains = 1;
  unsigned threads = 1;

  /// Throws InputError when a field is out of range.
  void validate() const;
};

/// ceil(2 ln(2 / delta) / epsilon^2): Hoeffding's bound for values in [0, 1].
std::size_t hoeffding_sample_size(double epsilon, double delta);

/// Values for every variable of the sampled set, indexed by id.
using SamplePoint = std::vector<double>;

/// Hit-and-run over the admissible polytope of a closed, tie-free set. Only
/// the unknowns move; each one is boxed by its tightest exact bounds and the
/// remaining constraints are the covers between unknowns.
class HitAndRun {
 public:
  HitAndRun(const ConstraintSet& cs, std::uint64_t seed);

  std::size_t dimension() const noexcept { return unknowns_.size(); }
  const SamplePoint& current() const noexcept { return point_; }

  /// One step: a uniform direction in the unknown coordinates, then a uniform
  /// point on the feasible chord. Retries up to 100 directions when the chord
  /// is numerically empty; keeps the current point if all of them are.
  void step();
  /// Runs `burn_in` steps, then returns `count` points `thinning` steps apart.
  std::vector<SamplePoint> sample(std::size_t count, std::size_t burn_in, std::size_t thinning);

 private:
  std::vector<std::size_t> unknowns_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<std::pair<std::size_t, std::size_t>> covers_;  // coordinate pairs a <= b
  SamplePoint point_;
  std::vector<double> coord_;
  std::vector<double> dir_;
  std::mt19937_64 rng_;
};

/// A point strictly inside every inequality that is not forced tight. An
/// unknown u gets lo + (hi - lo) / (h + 1), where lo is the largest exact
/// bound or already placed value below it, hi its smallest exact bound above,
/// and h the length of the longest chain of unknowns starting at u.
SamplePoint interior_point(const ConstraintSet& cs);

/// Samples of a consistent set (ties are collapsed; tied variables share a value).
std::vector<SamplePoint> hit_and_run_sample(const ConstraintSet& cs, const SamplerConfig& cfg, std::size_t count);

struct Estimate {
  double value = 0;
  std::size_t samples = 0;
};

/// Mean of x over hoeffding_sample_size(epsilon, delta) samples of the part
/// holding x. Exact variables return their value without sampling.
Estimate estimate_expected_value(const ConstraintSet& cs, VarId x, const SamplerConfig& cfg);

struct EstimatedEntry {
  VarId variable;
  double value = 0;
  bool exact = false;
};

/// Estimated local top-k from one shared sample stream; exact variables enter
/// with their values. Sorted by value descending, ties by name.
std::vector<EstimatedEntry> estimate_topk(const ConstraintSet& cs, std::span<const VarId> selection, std::size_t k,
                                          const SamplerConfig& cfg, std::size_t* samples_used = nullptr);

}  // namespace ordpoly
