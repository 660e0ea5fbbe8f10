#include "ordpoly/constraint_set.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "ordpoly/errors.hpp"

namespace ordpoly {

VarId ConstraintSet::add_variable(std::string name) {
  if (name.empty()) throw InputError("variable names must be non-empty");
  if (by_name_.contains(name)) throw InputError("duplicate variable '" + name + "'");
  const VarId id = var(names_.size());
  by_name_.emplace(name, id);
  names_.push_back(std::move(name));
  exact_.emplace_back();
  reopen();
  return id;
}

VarId ConstraintSet::ensure_variable(std::string_view name) {
  if (auto found = find(name)) return *found;
  return add_variable(std::string(name));
}

void ConstraintSet::add_order(VarId lo, VarId hi) {
  if (idx(lo) >= size() || idx(hi) >= size()) throw InputError("order constraint on unknown variable id");
  reopen();
  edges_.push_back({lo, hi});
}

void ConstraintSet::set_exact(VarId v, const Rational& value) {
  if (idx(v) >= size()) throw InputError("exact value on unknown variable id");
  if (value < Rational(0) || value > Rational(1)) {
    throw InputError("exact value " + value.str() + " of '" + name(v) + "' outside [0, 1]");
  }
  auto& slot = exact_[idx(v)];
  if (slot && *slot != value) {
    throw InputError("conflicting exact values for '" + name(v) + "': " + slot->str() + " and " + value.str());
  }
  reopen();
  slot = value;
}

std::optional<VarId> ConstraintSet::find(std::string_view name) const {
  const auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

VarId ConstraintSet::variable(std::string_view name) const {
  if (auto found = find(name)) return *found;
  throw InputError("unknown variable '" + std::string(name) + "'");
}

std::size_t ConstraintSet::exact_count() const {
  return static_cast<std::size_t>(std::count_if(exact_.begin(), exact_.end(), [](const auto& e) { return e.has_value(); }));
}

std::vector<VarId> ConstraintSet::unknowns() const {
  std::vector<VarId> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!exact_[i]) out.push_back(var(i));
  }
  return out;
}

std::vector<VarId> ConstraintSet::exacts() const {
  std::vector<VarId> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (exact_[i]) out.push_back(var(i));
  }
  return out;
}

bool ConstraintSet::leq(VarId a, VarId b) const { return reach().test(idx(a), idx(b)); }

const BitMatrix& ConstraintSet::reach() const {
  if (!reach_) throw PreconditionError("constraint set is not closed under implication");
  return *reach_;
}

void ConstraintSet::reopen() { reach_.reset(); }

ConstraintSet ConstraintSet::from_closure(std::vector<std::string> names,
                                          std::vector<std::optional<Rational>> exact, BitMatrix reach) {
  ConstraintSet out;
  for (auto& n : names) out.add_variable(std::move(n));
  out.exact_ = std::move(exact);
  for (std::size_t i = 0; i < reach.size(); ++i) {
    reach.for_each_in_row(i, [&](std::size_t j) {
      if (j != i) out.edges_.push_back({var(i), var(j)});
    });
  }
  out.reach_ = std::make_shared<const BitMatrix>(std::move(reach));
  return out;
}

namespace {

using Adjacency = std::vector<std::vector<std::uint32_t>>;

// Order edges plus the edges implied by exact values.
Adjacency implication_graph(const ConstraintSet& cs) {
  const std::size_t n = cs.size();
  Adjacency adj(n);
  for (const auto& e : cs.order_edges()) adj[idx(e.lo)].push_back(static_cast<std::uint32_t>(idx(e.hi)));

  std::vector<VarId> exacts = cs.exacts();
  std::stable_sort(exacts.begin(), exacts.end(), [&](VarId a, VarId b) { return *cs.exact(a) < *cs.exact(b); });
  for (std::size_t k = 1; k < exacts.size(); ++k) {
    const auto a = static_cast<std::uint32_t>(idx(exacts[k - 1]));
    const auto b = static_cast<std::uint32_t>(idx(exacts[k]));
    adj[a].push_back(b);
    if (*cs.exact(exacts[k - 1]) == *cs.exact(exacts[k])) adj[b].push_back(a);
  }
  if (!exacts.empty() && cs.exact(exacts.front())->is_zero()) {
    const auto z = static_cast<std::uint32_t>(idx(exacts.front()));
    for (std::uint32_t v = 0; v < n; ++v) adj[z].push_back(v);
  }
  if (!exacts.empty() && *cs.exact(exacts.back()) == Rational(1)) {
    const auto o = static_cast<std::uint32_t>(idx(exacts.back()));
    for (std::uint32_t v = 0; v < n; ++v) adj[v].push_back(o);
  }
  return adj;
}

// Iterative Tarjan; components come out in reverse topological order.
std::vector<std::vector<std::uint32_t>> strongly_connected_components(const Adjacency& adj) {
  const std::size_t n = adj.size();
  constexpr std::uint32_t kUnvisited = ~std::uint32_t{0};
  std::vector<std::uint32_t> index(n, kUnvisited);
  std::vector<std::uint32_t> low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::size_t>> call;  // node, next edge
  std::vector<std::vector<std::uint32_t>> components;
  std::uint32_t counter = 0;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next < adj[v].size()) {
        const std::uint32_t w = adj[v][next++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w] != 0) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::uint32_t done = v;
      call.pop_back();
      if (!call.empty()) {
        const std::uint32_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        std::vector<std::uint32_t> comp;
        std::uint32_t w = 0;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != done);
        components.push_back(std::move(comp));
      }
    }
  }
  return components;
}

BitMatrix transitive_closure(const Adjacency& adj) {
  const std::size_t n = adj.size();
  BitMatrix reach(n);
  const auto components = strongly_connected_components(adj);
  std::vector<std::uint32_t> comp_of(n);
  for (std::uint32_t c = 0; c < components.size(); ++c) {
    for (auto v : components[c]) comp_of[v] = c;
  }
  for (std::uint32_t c = 0; c < components.size(); ++c) {
    const auto& members = components[c];
    const std::uint32_t head = members.front();
    for (auto v : members) reach.set(head, v);
    for (auto v : members) {
      for (auto w : adj[v]) {
        if (comp_of[w] != c) reach.merge_row(head, components[comp_of[w]].front());
      }
    }
    for (auto v : members) {
      if (v != head) reach.merge_row(v, head);
    }
  }
  return reach;
}

std::vector<VarId> order_path(const ConstraintSet& cs, VarId from, VarId to) {
  const std::size_t n = cs.size();
  std::vector<std::vector<VarId>> adj(n);
  for (const auto& e : cs.order_edges()) adj[idx(e.lo)].push_back(e.hi);
  std::vector<std::int64_t> prev(n, -1);
  std::vector<char> seen(n, 0);
  std::deque<VarId> queue{from};
  seen[idx(from)] = 1;
  while (!queue.empty()) {
    const VarId v = queue.front();
    queue.pop_front();
    if (v == to) break;
    for (VarId w : adj[idx(v)]) {
      if (seen[idx(w)] != 0) continue;
      seen[idx(w)] = 1;
      prev[idx(w)] = static_cast<std::int64_t>(idx(v));
      queue.push_back(w);
    }
  }
  std::vector<VarId> path;
  if (seen[idx(to)] == 0) return path;
  for (std::int64_t v = static_cast<std::int64_t>(idx(to)); v != -1; v = prev[static_cast<std::size_t>(v)]) {
    path.push_back(var(static_cast<std::size_t>(v)));
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

ConstraintSet close_under_implication(const ConstraintSet& cs) {
  if (cs.closed()) return cs;
  std::vector<std::string> names;
  std::vector<std::optional<Rational>> exact;
  names.reserve(cs.size());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    names.push_back(cs.name(var(i)));
    exact.push_back(cs.exact(var(i)));
  }
  return ConstraintSet::from_closure(std::move(names), std::move(exact), transitive_closure(implication_graph(cs)));
}

ConstraintSet closed_view(const ConstraintSet& cs) { return cs.closed() ? cs : close_under_implication(cs); }

ConsistencyReport check_consistency(const ConstraintSet& cs) {
  const ConstraintSet closed = closed_view(cs);
  const auto exacts = closed.exacts();
  // With exact values ordered by the closure, a contradiction is exactly an
  // exact variable that reaches another one carrying a smaller value.
  for (VarId a : exacts) {
    for (VarId b : exacts) {
      if (*cs.exact(b) < *cs.exact(a) && closed.leq(a, b)) {
        ConsistencyReport report;
        report.ok = false;
        // Some pair along the implied chain is linked by order constraints alone.
        for (VarId hi : exacts) {
          for (VarId lo : exacts) {
            if (!(*cs.exact(lo) < *cs.exact(hi))) continue;
            auto path = order_path(cs, hi, lo);
            if (!path.empty()) {
              report.witness = std::move(path);
              break;
            }
          }
          if (!report.witness.empty()) break;
        }
        report.message = "'" + cs.name(a) + "' = " + cs.exact(a)->str() + " is forced below '" + cs.name(b) +
                         "' = " + cs.exact(b)->str();
        return report;
      }
    }
  }
  return {};
}

void require_consistent(const ConstraintSet& cs) {
  const auto report = check_consistency(cs);
  if (report.ok) return;
  std::vector<std::string> names;
  for (VarId v : report.witness) names.push_back(cs.name(v));
  throw InconsistentError("contradictory constraints: " + report.message, std::move(names));
}

}  // namespace ordpoly
