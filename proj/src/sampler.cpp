#include "ordpoly/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "ordpoly/errors.hpp"

namespace ordpoly {

namespace {

constexpr double kMinChord = 1e-14;
constexpr int kDirectionRetries = 100;

struct Bounds {
  std::vector<double> lo;
  std::vector<double> hi;
};

// Tightest exact bounds of every variable of a closed set.
Bounds exact_bounds(const ConstraintSet& cs) {
  Bounds b{std::vector<double>(cs.size(), 0.0), std::vector<double>(cs.size(), 1.0)};
  std::vector<Rational> lo(cs.size(), Rational(0));
  std::vector<Rational> hi(cs.size(), Rational(1));
  for (VarId e : cs.exacts()) {
    const Rational& value = *cs.exact(e);
    for (std::size_t v = 0; v < cs.size(); ++v) {
      if (cs.leq(e, var(v)) && lo[v] < value) lo[v] = value;
      if (cs.leq(var(v), e) && value < hi[v]) hi[v] = value;
    }
  }
  for (std::size_t v = 0; v < cs.size(); ++v) {
    b.lo[v] = lo[v].to_double();
    b.hi[v] = hi[v].to_double();
  }
  return b;
}

std::vector<std::size_t> topological_order(const HasseDiagram& h) {
  std::vector<std::size_t> indeg(h.size());
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < h.size(); ++i) {
    indeg[i] = h.down[i].size();
    if (indeg[i] == 0) order.push_back(i);
  }
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (VarId w : h.up[order[k]]) {
      if (--indeg[idx(w)] == 0) order.push_back(idx(w));
    }
  }
  return order;
}

SamplePoint interior_point_closed(const ConstraintSet& cs) {
  const HasseDiagram h = hasse(cs);
  const Bounds b = exact_bounds(cs);
  const auto order = topological_order(h);
  std::vector<std::size_t> chain(cs.size(), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (cs.is_exact(var(*it))) continue;
    std::size_t longest = 0;
    for (VarId w : h.up[*it]) {
      if (!cs.is_exact(w)) longest = std::max(longest, chain[idx(w)]);
    }
    chain[*it] = longest + 1;
  }
  SamplePoint point(cs.size(), 0.0);
  for (std::size_t v : order) {
    if (cs.is_exact(var(v))) {
      point[v] = cs.exact(var(v))->to_double();
      continue;
    }
    double lo = b.lo[v];
    for (VarId d : h.down[v]) {
      if (!cs.is_exact(d)) lo = std::max(lo, point[idx(d)]);
    }
    point[v] = lo + (b.hi[v] - lo) / static_cast<double>(chain[v] + 1);
  }
  return point;
}

template <class Fn>
void run_parallel(std::size_t jobs, unsigned threads, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, jobs));
  if (workers == 1) {
    for (std::size_t j = 0; j < jobs; ++j) fn(j);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t j = w; j < jobs; j += workers) fn(j);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Samples of a closed, tie-free set, spread over the configured chains.
std::vector<SamplePoint> sample_closed(const ConstraintSet& cs, const SamplerConfig& cfg, std::size_t count) {
  cfg.validate();
  const std::size_t chains = std::max<std::size_t>(1, std::min(cfg.chains, std::max<std::size_t>(count, 1)));
  std::vector<std::vector<SamplePoint>> per_chain(chains);
  run_parallel(chains, cfg.threads, [&](std::size_t c) {
    HitAndRun walk(cs, cfg.seed + c);
    const std::size_t d = std::max<std::size_t>(1, walk.dimension());
    const std::size_t share = count / chains + (c < count % chains ? 1 : 0);
    per_chain[c] = walk.sample(share, cfg.burn_in.value_or(1000 * d), cfg.thinning.value_or(d));
  });
  std::vector<SamplePoint> out;
  out.reserve(count);
  for (auto& chunk : per_chain) {
    for (auto& p : chunk) out.push_back(std::move(p));
  }
  return out;
}

// The smallest closed set holding the given quotient unknowns' parts and every exact value.
struct Restricted {
  ConstraintSet cs;
  std::vector<VarId> to_quotient;
};

Restricted restrict_to_parts(const TieQuotient& q, std::span<const VarId> classes) {
  const UninfluenceDecomposition d = decompose(q.quotient);
  std::vector<char> wanted(d.classes.size(), 0);
  for (VarId c : classes) {
    if (auto p = d.class_index[idx(c)]) wanted[*p] = 1;
  }
  std::vector<VarId> keep;
  for (std::size_t p = 0; p < d.classes.size(); ++p) {
    if (wanted[p] != 0) keep.insert(keep.end(), d.classes[p].begin(), d.classes[p].end());
  }
  const auto exacts = q.quotient.exacts();
  keep.insert(keep.end(), exacts.begin(), exacts.end());
  std::sort(keep.begin(), keep.end());
  return {restrict_to(q.quotient, keep), keep};
}

}  // namespace

void SamplerConfig::validate() const {
  if (!(epsilon > 0 && epsilon < 1)) throw InputError("epsilon must lie in (0, 1)");
  if (!(delta > 0 && delta < 1)) throw InputError("delta must lie in (0, 1)");
  if (thinning && *thinning < 1) throw InputError("thinning must be at least 1");
  if (chains < 1) throw InputError("at least one chain is needed");
}

std::size_t hoeffding_sample_size(double epsilon, double delta) {
  if (!(epsilon > 0 && epsilon < 1) || !(delta > 0 && delta < 1)) {
    throw InputError("epsilon and delta must lie in (0, 1)");
  }
  return static_cast<std::size_t>(std::ceil(2.0 * std::log(2.0 / delta) / (epsilon * epsilon)));
}

HitAndRun::HitAndRun(const ConstraintSet& cs, std::uint64_t seed) : rng_(seed) {
  const ConstraintSet closed = closed_view(cs);
  const HasseDiagram h = hasse(closed);
  const Bounds b = exact_bounds(closed);
  std::vector<std::size_t> coordinate(closed.size(), 0);
  for (VarId u : closed.unknowns()) {
    coordinate[idx(u)] = unknowns_.size();
    unknowns_.push_back(idx(u));
    lo_.push_back(b.lo[idx(u)]);
    hi_.push_back(b.hi[idx(u)]);
  }
  for (std::size_t u : unknowns_) {
    for (VarId w : h.up[u]) {
      if (!closed.is_exact(w)) covers_.emplace_back(coordinate[u], coordinate[idx(w)]);
    }
  }
  point_ = interior_point_closed(closed);
  coord_.resize(unknowns_.size());
  for (std::size_t i = 0; i < unknowns_.size(); ++i) coord_[i] = point_[unknowns_[i]];
  dir_.resize(unknowns_.size());
}

void HitAndRun::step() {
  const std::size_t d = unknowns_.size();
  if (d == 0) return;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < kDirectionRetries; ++attempt) {
    double norm = 0;
    for (auto& x : dir_) {
      x = normal(rng_);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0) continue;
    for (auto& x : dir_) x /= norm;

    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) {
      if (dir_[i] > 0) {
        tmax = std::min(tmax, (hi_[i] - coord_[i]) / dir_[i]);
        tmin = std::max(tmin, (lo_[i] - coord_[i]) / dir_[i]);
      } else if (dir_[i] < 0) {
        tmax = std::min(tmax, (lo_[i] - coord_[i]) / dir_[i]);
        tmin = std::max(tmin, (hi_[i] - coord_[i]) / dir_[i]);
      }
    }
    for (const auto& [a, b] : covers_) {
      // coord_a + t dir_a <= coord_b + t dir_b
      const double slope = dir_[a] - dir_[b];
      const double slack = coord_[b] - coord_[a];
      if (slope > 0) {
        tmax = std::min(tmax, slack / slope);
      } else if (slope < 0) {
        tmin = std::max(tmin, slack / slope);
      }
    }
    if (!(tmax - tmin >= kMinChord)) continue;
    const double t = std::uniform_real_distribution<double>(tmin, tmax)(rng_);
    for (std::size_t i = 0; i < d; ++i) {
      coord_[i] = std::clamp(coord_[i] + t * dir_[i], lo_[i], hi_[i]);
      point_[unknowns_[i]] = coord_[i];
    }
    return;
  }
}

std::vector<SamplePoint> HitAndRun::sample(std::size_t count, std::size_t burn_in, std::size_t thinning) {
  if (thinning < 1) throw InputError("thinning must be at least 1");
  for (std::size_t i = 0; i < burn_in; ++i) step();
  std::vector<SamplePoint> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    for (std::size_t i = 0; i < thinning; ++i) step();
    out.push_back(point_);
  }
  return out;
}

SamplePoint interior_point(const ConstraintSet& cs) {
  const TieQuotient q = collapse_ties(cs);
  const SamplePoint inner = interior_point_closed(q.quotient);
  SamplePoint out(cs.size());
  for (std::size_t v = 0; v < cs.size(); ++v) out[v] = inner[idx(q.class_of[v])];
  return out;
}

std::vector<SamplePoint> hit_and_run_sample(const ConstraintSet& cs, const SamplerConfig& cfg, std::size_t count) {
  const TieQuotient q = collapse_ties(cs);
  auto inner = sample_closed(q.quotient, cfg, count);
  std::vector<SamplePoint> out;
  out.reserve(inner.size());
  for (const auto& p : inner) {
    SamplePoint full(cs.size());
    for (std::size_t v = 0; v < cs.size(); ++v) full[v] = p[idx(q.class_of[v])];
    out.push_back(std::move(full));
  }
  return out;
}

Estimate estimate_expected_value(const ConstraintSet& cs, VarId x, const SamplerConfig& cfg) {
  cfg.validate();
  const TieQuotient q = collapse_ties(cs);
  const VarId cls = q.class_of.at(idx(x));
  if (q.quotient.is_exact(cls)) return {q.quotient.exact(cls)->to_double(), 0};
  const VarId wanted[] = {cls};
  const Restricted r = restrict_to_parts(q, wanted);
  const auto local = static_cast<std::size_t>(std::find(r.to_quotient.begin(), r.to_quotient.end(), cls) -
                                              r.to_quotient.begin());
  const std::size_t n = hoeffding_sample_size(cfg.epsilon, cfg.delta);
  const auto samples = sample_closed(r.cs, cfg, n);
  double sum = 0;
  for (const auto& p : samples) sum += p[local];
  return {sum / static_cast<double>(samples.size()), samples.size()};
}

std::vector<EstimatedEntry> estimate_topk(const ConstraintSet& cs, std::span<const VarId> selection, std::size_t k,
                                          const SamplerConfig& cfg, std::size_t* samples_used) {
  if (k < 1) throw InputError("k must be at least 1");
  cfg.validate();
  if (samples_used != nullptr) *samples_used = 0;
  if (selection.empty()) return {};
  const TieQuotient q = collapse_ties(cs);

  std::vector<EstimatedEntry> entries;
  std::vector<VarId> unknown_classes;
  for (VarId v : selection) {
    const VarId cls = q.class_of.at(idx(v));
    if (q.quotient.is_exact(cls)) {
      entries.push_back({v, q.quotient.exact(cls)->to_double(), true});
    } else {
      unknown_classes.push_back(cls);
    }
  }
  if (!unknown_classes.empty()) {
    const Restricted r = restrict_to_parts(q, unknown_classes);
    const std::size_t n = hoeffding_sample_size(cfg.epsilon, cfg.delta);
    const auto samples = sample_closed(r.cs, cfg, n);
    if (samples_used != nullptr) *samples_used = samples.size();
    for (VarId v : selection) {
      const VarId cls = q.class_of[idx(v)];
      if (q.quotient.is_exact(cls)) continue;
      const auto local = static_cast<std::size_t>(std::find(r.to_quotient.begin(), r.to_quotient.end(), cls) -
                                                  r.to_quotient.begin());
      double sum = 0;
      for (const auto& p : samples) sum += p[local];
      entries.push_back({v, sum / static_cast<double>(samples.size()), false});
    }
  }
  std::sort(entries.begin(), entries.end(), [&](const EstimatedEntry& a, const EstimatedEntry& b) {
    if (a.value != b.value) return a.value > b.value;
    return cs.name(a.variable) < cs.name(b.variable);
  });
  if (entries.size() > k) entries.resize(k);
  return entries;
}

}  // namespace ordpoly
