#include "ordpoly/extensions.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_map>

#include "ordpoly/errors.hpp"

namespace ordpoly {

namespace {

constexpr std::size_t kMaxCountStates = std::size_t{1} << 21;

std::string budget_message(std::uint64_t budget) {
  return "more than " + std::to_string(budget) +
         " linear extensions; use the tree engine on tree-shaped input, the sampler, or raise --max-extensions";
}

class DownsetCounter {
 public:
  DownsetCounter(const HasseDiagram& h, std::uint64_t cap) : cap_(cap) {
    const std::size_t n = h.size();
    full_ = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    preds_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (VarId d : h.down[i]) preds_[i] |= std::uint64_t{1} << idx(d);
    }
  }

  std::optional<std::uint64_t> run() {
    try {
      return count(0);
    } catch (const TooManyStates&) {
      return std::nullopt;
    }
  }

 private:
  struct TooManyStates {};

  std::uint64_t count(std::uint64_t placed) {
    if (placed == full_) return 1;
    if (auto it = memo_.find(placed); it != memo_.end()) return it->second;
    if (memo_.size() >= kMaxCountStates) throw TooManyStates{};
    std::uint64_t total = 0;
    for (std::size_t e = 0; e < preds_.size(); ++e) {
      const std::uint64_t bit = std::uint64_t{1} << e;
      if ((placed & bit) != 0 || (preds_[e] & ~placed) != 0) continue;
      total = std::min(cap_, total + count(placed | bit));
      if (total == cap_) break;
    }
    memo_.emplace(placed, total);
    return total;
  }

  std::uint64_t cap_;
  std::uint64_t full_ = 0;
  std::vector<std::uint64_t> preds_;
  std::unordered_map<std::uint64_t, std::uint64_t> memo_;
};

// Backtracking over the currently minimal elements with in-degree counters.
class Walker {
 public:
  Walker(const HasseDiagram& h, std::atomic<std::uint64_t>& visited, std::uint64_t budget)
      : h_(h), visited_(visited), budget_(budget), order_(h.size()), indeg_(h.size()) {
    for (std::size_t i = 0; i < h.size(); ++i) {
      indeg_[i] = static_cast<std::uint32_t>(h.down[i].size());
      if (indeg_[i] == 0) avail_.push_back(static_cast<std::uint32_t>(i));
    }
  }

  std::size_t first_choices() const { return avail_.size(); }

  void run(const ExtensionVisitor& visit, std::size_t worker, std::size_t workers) {
    visit_ = &visit;
    if (h_.size() == 0) {
      count_one();
      visit(order_);
      return;
    }
    step(0, worker, workers);
  }

 private:
  void count_one() {
    if (visited_.fetch_add(1, std::memory_order_relaxed) + 1 > budget_) throw BudgetError(budget_message(budget_));
  }

  void step(std::size_t depth, std::size_t worker, std::size_t workers) {
    if (depth == order_.size()) {
      count_one();
      (*visit_)(order_);
      return;
    }
    const std::size_t choices = avail_.size();
    for (std::size_t i = 0; i < choices; ++i) {
      if (depth == 0 && i % workers != worker) continue;
      const std::uint32_t e = avail_[i];
      avail_[i] = avail_.back();
      avail_.pop_back();
      std::size_t added = 0;
      for (VarId s : h_.up[e]) {
        if (--indeg_[idx(s)] == 0) {
          avail_.push_back(static_cast<std::uint32_t>(idx(s)));
          ++added;
        }
      }
      order_[depth] = e;
      step(depth + 1, worker, workers);
      for (VarId s : h_.up[e]) ++indeg_[idx(s)];
      avail_.resize(avail_.size() - added);
      if (i == avail_.size()) {
        avail_.push_back(e);
      } else {
        avail_.push_back(avail_[i]);
        avail_[i] = e;
      }
    }
  }

  const HasseDiagram& h_;
  std::atomic<std::uint64_t>& visited_;
  std::uint64_t budget_;
  const ExtensionVisitor* visit_ = nullptr;
  std::vector<std::uint32_t> order_;
  std::vector<std::uint32_t> indeg_;
  std::vector<std::uint32_t> avail_;
};

}  // namespace

ExtensionSpace::ExtensionSpace(const ConstraintSet& cs) : cs_(closed_view(cs)) {
  hasse_ = hasse(cs_);
  std::vector<VarId> exacts = cs_.exacts();
  std::sort(exacts.begin(), exacts.end(), [&](VarId a, VarId b) { return *cs_.exact(a) < *cs_.exact(b); });
  exact_rank_.assign(cs_.size(), -1);
  bounds_.emplace_back(0);
  for (std::size_t k = 0; k < exacts.size(); ++k) {
    exact_rank_[idx(exacts[k])] = static_cast<std::int32_t>(k);
    bounds_.push_back(*cs_.exact(exacts[k]));
  }
  bounds_.emplace_back(1);
}

std::uint64_t ExtensionSpace::count(const EnumerationOptions& options) const {
  const std::uint64_t cap = options.max_extensions + 1;
  if (size() <= 64) {
    if (auto counted = DownsetCounter(hasse_, cap).run()) return *counted;
  }
  std::atomic<std::uint64_t> visited{0};
  Walker walker(hasse_, visited, options.max_extensions);
  const ExtensionVisitor noop = [](std::span<const std::uint32_t>) {};
  try {
    walker.run(noop, 0, 1);
  } catch (const BudgetError&) {
    return cap;
  }
  return visited.load();
}

void ExtensionSpace::enumerate(const EnumerationOptions& options,
                               const std::function<ExtensionVisitor(std::size_t)>& make_visitor) const {
  if (size() <= 64) {
    if (auto counted = DownsetCounter(hasse_, options.max_extensions + 1).run();
        counted && *counted > options.max_extensions) {
      throw BudgetError(budget_message(options.max_extensions));
    }
  }
  std::atomic<std::uint64_t> visited{0};
  const std::size_t first = Walker(hasse_, visited, options.max_extensions).first_choices();
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(options.threads, first));

  if (workers == 1) {
    Walker walker(hasse_, visited, options.max_extensions);
    walker.run(make_visitor(0), 0, 1);
  } else {
    std::vector<ExtensionVisitor> visitors;
    for (std::size_t w = 0; w < workers; ++w) visitors.push_back(make_visitor(w));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          Walker walker(hasse_, visited, options.max_extensions);
          walker.run(visitors[w], w, workers);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
  }
  if (options.stats != nullptr) options.stats->extensions = visited.load();
}

Rational ExtensionSpace::weight(std::span<const std::uint32_t> fragment_sizes) const {
  Rational w(1);
  for (std::size_t f = 0; f < fragment_sizes.size(); ++f) {
    const std::uint32_t n = fragment_sizes[f];
    if (n == 0) continue;
    w *= pow(bounds_[f + 1] - bounds_[f], n) / factorial(n);
  }
  return w;
}

void ExtensionSpace::fragment_sizes(std::span<const std::uint32_t> order, std::vector<std::uint32_t>& sizes) const {
  sizes.assign(fragment_count(), 0);
  std::size_t f = 0;
  for (std::uint32_t e : order) {
    if (exact_rank_[e] >= 0) {
      f = static_cast<std::size_t>(exact_rank_[e]) + 1;
    } else {
      ++sizes[f];
    }
  }
}

std::uint64_t count_extensions(const ConstraintSet& cs, const EnumerationOptions& options) {
  return ExtensionSpace(cs).count(options);
}

std::vector<LinearExtension> enumerate_extensions(const ConstraintSet& cs, const EnumerationOptions& options) {
  const ExtensionSpace space(cs);
  std::vector<LinearExtension> out;
  std::mutex out_mutex;
  space.enumerate(options, [&](std::size_t) {
    return [&](std::span<const std::uint32_t> order) {
      LinearExtension ext;
      for (std::size_t i = 0; i < order.size(); ++i) {
        ext.order.push_back(var(order[i]));
        if (space.exact_rank(order[i]) >= 0) ext.exact_positions.push_back(i + 1);
      }
      const std::lock_guard lock(out_mutex);
      out.push_back(std::move(ext));
    };
  });
  return out;
}

std::vector<FragmentView> fragments(const ConstraintSet& cs, const LinearExtension& ext) {
  std::vector<FragmentView> out;
  std::size_t p = 0;
  Rational alpha(0);
  std::vector<std::size_t> members;
  auto close_run = [&](std::size_t q, const Rational& beta) {
    out.push_back({p, q, alpha, beta, members});
    members.clear();
    p = q;
    alpha = beta;
  };
  for (std::size_t i = 0; i < ext.order.size(); ++i) {
    const VarId v = ext.order[i];
    if (cs.is_exact(v)) {
      close_run(i + 1, *cs.exact(v));
    } else {
      members.push_back(i + 1);
    }
  }
  close_run(ext.order.size() + 1, Rational(1));
  return out;
}

}  // namespace ordpoly
