#include "ordpoly/analysis.hpp"

#include "ordpoly/errors.hpp"
#include "ordpoly/exact_engine.hpp"
#include "ordpoly/tree_engine.hpp"

namespace ordpoly {

std::string_view to_string(Engine engine) {
  switch (engine) {
    case Engine::automatic: return "auto";
    case Engine::exact: return "exact";
    case Engine::tree: return "tree";
    case Engine::sample: return "sample";
  }
  return "auto";
}

std::optional<Engine> parse_engine(std::string_view text) {
  if (text == "auto") return Engine::automatic;
  if (text == "exact") return Engine::exact;
  if (text == "tree") return Engine::tree;
  if (text == "sample") return Engine::sample;
  return std::nullopt;
}

void Diagnostics::used(std::string_view name) {
  if (engine == "none") {
    engine = name;
  } else if (engine.find(name) == std::string::npos) {
    engine += "+";
    engine += name;
  }
}

namespace {

Shape orientation(Shape s) { return s == Shape::reverse_tree ? Shape::reverse_tree : Shape::tree; }

// Enumeration options whose extension count lands in `diag`.
struct Counted {
  EngineStats stats;
  EnumerationOptions options;
  Diagnostics* diag;

  Counted(const EnumerationOptions& base, Diagnostics* d) : options(base), diag(d) { options.stats = &stats; }
  ~Counted() {
    if (diag != nullptr) diag->extensions += stats.extensions;
  }
  Counted(const Counted&) = delete;
  Counted& operator=(const Counted&) = delete;
};

}  // namespace

Analysis::Analysis(const ConstraintSet& cs)
    : original_(cs), closed_(closed_view(cs)), ties_(collapse_ties(closed_)), parts_(decompose(ties_.quotient)) {}

void Analysis::require_tree_engine(std::size_t part) const {
  if (parts_.shapes[part] == Shape::general) {
    throw UnsupportedShapeError("the part holding '" + quotient().name(parts_.classes[part].front()) +
                                "' is neither a tree nor a reverse tree; use --engine exact or --engine sample");
  }
}

Value Analysis::interpolate(VarId x, const QueryOptions& options, Diagnostics* diag) const {
  const VarId cls = class_of(x);
  if (quotient().is_exact(cls)) return Value::of(*quotient().exact(cls));
  const std::size_t part = *parts_.class_index[idx(cls)];
  const VarId local = parts_.local_id(part, cls);

  switch (options.engine) {
    case Engine::sample: {
      const Estimate e = estimate_expected_value(original_, x, options.sampler);
      if (diag != nullptr) {
        diag->used("sample");
        diag->samples += e.samples;
      }
      return Value::estimate(e.value);
    }
    case Engine::exact: {
      const Counted counted(options.enumeration, diag);
      if (diag != nullptr) diag->used("exact");
      const ExtensionSpace space(quotient());
      const VarId tracked[] = {cls};
      return Value::of(space_expected_values(space, tracked, counted.options).front());
    }
    case Engine::tree: require_tree_engine(part); break;
    case Engine::automatic: break;
  }
  if (parts_.shapes[part] != Shape::general) {
    if (diag != nullptr) diag->used("tree");
    const ConstraintTree t = ConstraintTree::from_part(parts_.parts[part], orientation(parts_.shapes[part]));
    return Value::of(interpolate_tree(t, t.node_of(local)));
  }
  const Counted counted(options.enumeration, diag);
  if (diag != nullptr) diag->used("exact");
  const ExtensionSpace space(parts_.parts[part]);
  const VarId tracked[] = {local};
  return Value::of(space_expected_values(space, tracked, counted.options).front());
}

std::vector<Value> Analysis::interpolate_all(const QueryOptions& options, Diagnostics* diag) const {
  const ConstraintSet& q = quotient();
  std::vector<Value> per_class(q.size());
  for (VarId e : q.exacts()) per_class[idx(e)] = Value::of(*q.exact(e));

  if (options.engine == Engine::sample) {
    std::vector<VarId> everything;
    for (std::size_t i = 0; i < original_.size(); ++i) everything.push_back(var(i));
    std::size_t used = 0;
    const auto entries = estimate_topk(original_, everything, everything.size(), options.sampler, &used);
    std::vector<Value> out(original_.size());
    for (const auto& e : entries) out[idx(e.variable)] = e.exact ? per_class[idx(class_of(e.variable))] : Value::estimate(e.value);
    if (diag != nullptr && used > 0) {
      diag->used("sample");
      diag->samples += used;
    }
    return out;
  }

  if (options.engine == Engine::exact) {
    if (q.unknowns().size() > 0) {
      const Counted counted(options.enumeration, diag);
      if (diag != nullptr) diag->used("exact");
      std::vector<VarId> all;
      for (std::size_t i = 0; i < q.size(); ++i) all.push_back(var(i));
      const auto values = space_expected_values(ExtensionSpace(q), all, counted.options);
      for (std::size_t i = 0; i < q.size(); ++i) per_class[i] = Value::of(values[i]);
    }
  } else {
    for (std::size_t p = 0; p < parts_.parts.size(); ++p) {
      if (options.engine == Engine::tree) require_tree_engine(p);
      const auto& map = parts_.part_to_parent[p];
      if (parts_.shapes[p] != Shape::general) {
        if (diag != nullptr) diag->used("tree");
        const ConstraintTree t = ConstraintTree::from_part(parts_.parts[p], orientation(parts_.shapes[p]));
        for (std::size_t n = 0; n < t.size(); ++n) per_class[idx(map[idx(t.nodes[n])])] = Value::of(interpolate_tree(t, n));
      } else {
        const Counted counted(options.enumeration, diag);
        if (diag != nullptr) diag->used("exact");
        const std::vector<VarId> unknowns = parts_.parts[p].unknowns();
        const auto values = space_expected_values(ExtensionSpace(parts_.parts[p]), unknowns, counted.options);
        for (std::size_t i = 0; i < unknowns.size(); ++i) per_class[idx(map[idx(unknowns[i])])] = Value::of(values[i]);
      }
    }
  }
  std::vector<Value> out;
  out.reserve(original_.size());
  for (VarId c : ties_.class_of) out.push_back(per_class[idx(c)]);
  return out;
}

std::vector<Rational> Analysis::interpolate_stable() const { return interpolate_forest(original_, Scheme::stable); }

Rational Analysis::volume(const QueryOptions& options, Diagnostics* diag) const {
  switch (options.engine) {
    case Engine::sample: throw InputError("volumes need an exact engine (auto, exact or tree)");
    case Engine::exact: {
      const Counted counted(options.enumeration, diag);
      if (diag != nullptr) diag->used("exact");
      return space_volume(ExtensionSpace(quotient()), counted.options);
    }
    case Engine::tree:
    case Engine::automatic: break;
  }
  Rational product(1);
  for (std::size_t p = 0; p < parts_.parts.size(); ++p) {
    if (options.engine == Engine::tree) require_tree_engine(p);
    if (parts_.shapes[p] != Shape::general) {
      if (diag != nullptr) diag->used("tree");
      product *= volume_tree(ConstraintTree::from_part(parts_.parts[p], orientation(parts_.shapes[p])));
    } else {
      const Counted counted(options.enumeration, diag);
      if (diag != nullptr) diag->used("exact");
      product *= space_volume(ExtensionSpace(parts_.parts[p]), counted.options);
    }
  }
  return product;
}

PiecewisePolynomial Analysis::marginal(VarId x, const QueryOptions& options, Diagnostics* diag) const {
  const VarId cls = class_of(x);
  if (quotient().is_exact(cls)) throw PreconditionError("'" + original_.name(x) + "' has an exact value and no density");
  const std::size_t part = *parts_.class_index[idx(cls)];
  switch (options.engine) {
    case Engine::sample: throw InputError("marginals need an exact engine (auto, exact or tree)");
    case Engine::exact: {
      const Counted counted(options.enumeration, diag);
      if (diag != nullptr) diag->used("exact");
      return space_marginal(ExtensionSpace(quotient()), cls, counted.options);
    }
    case Engine::tree: require_tree_engine(part); break;
    case Engine::automatic: break;
  }
  const VarId local = parts_.local_id(part, cls);
  if (parts_.shapes[part] != Shape::general) {
    if (diag != nullptr) diag->used("tree");
    const ConstraintTree t = ConstraintTree::from_part(parts_.parts[part], orientation(parts_.shapes[part]));
    return marginal_tree(t, t.node_of(local));
  }
  const Counted counted(options.enumeration, diag);
  if (diag != nullptr) diag->used("exact");
  return space_marginal(ExtensionSpace(parts_.parts[part]), local, counted.options);
}

}  // namespace ordpoly
