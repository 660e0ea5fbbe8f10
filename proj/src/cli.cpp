#include "ordpoly/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "ordpoly/analysis.hpp"
#include "ordpoly/errors.hpp"
#include "ordpoly/exact_engine.hpp"
#include "ordpoly/io.hpp"
#include "ordpoly/stable.hpp"
#include "ordpoly/topk.hpp"

namespace ordpoly::cli {

namespace {

using nlohmann::json;

json value_of(const Value& v) { return v.exact ? value_json(*v.exact) : value_json(v.approx); }

ConstraintSet read_input(const std::string& path) {
  if (path == "-") {
    const std::string text{std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
    return parse_constraints(text);
  }
  return load_constraints(path);
}

std::vector<VarId> resolve(const ConstraintSet& cs, const std::vector<std::string>& names) {
  std::vector<VarId> out;
  for (const auto& n : names) out.push_back(cs.variable(n));
  return out;
}

// Every variable, ordered by name.
std::vector<VarId> by_name(const ConstraintSet& cs) {
  std::vector<VarId> all;
  for (std::size_t i = 0; i < cs.size(); ++i) all.push_back(var(i));
  std::sort(all.begin(), all.end(), [&](VarId a, VarId b) { return cs.name(a) < cs.name(b); });
  return all;
}

json names_of(const ConstraintSet& cs, const std::vector<VarId>& vars) {
  json out = json::array();
  for (VarId v : vars) out.push_back(cs.name(v));
  return out;
}

QueryOptions query_options(const QueryRequest& r) {
  QueryOptions o;
  const auto engine = parse_engine(r.engine);
  if (!engine) throw InputError("unknown engine '" + r.engine + "' (expected auto, exact, tree or sample)");
  o.engine = *engine;
  o.enumeration.max_extensions = r.max_extensions;
  o.enumeration.threads = r.threads;
  o.sampler = r.sampler;
  o.sampler.threads = r.threads;
  if (o.engine == Engine::sample) o.sampler.validate();
  return o;
}

void dump_extension_table(const ConstraintSet& cs, const QueryOptions& options, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  for_each_extension_volume(cs, options.enumeration, [&](std::span<const std::string* const> order, const Rational& v) {
    json line;
    line["order"] = json::array();
    for (const auto* name : order) line["order"].push_back(*name);
    line["volume"] = v.str();
    out << line.dump() << '\n';
  });
}

json check_result(const ConstraintSet& cs, QueryResponse& response) {
  const ConsistencyReport report = check_consistency(cs);
  json result{{"consistent", report.ok}};
  if (!report.ok) {
    json witness = json::array();
    for (VarId v : report.witness) witness.push_back(cs.name(v));
    result["witness"] = witness;
    result["message"] = report.message;
    response.exit_code = kExitContradiction;
    response.error = {{"error", "contradiction"}, {"message", report.message}, {"witness", witness}};
  }
  return result;
}

json decompose_result(const Analysis& a) {
  const ConstraintSet& cs = a.original();
  const auto& d = a.decomposition();
  json ties = json::array();
  for (const auto& members : a.ties().representatives) {
    if (members.size() < 2) continue;
    std::vector<VarId> sorted = members;
    std::sort(sorted.begin(), sorted.end(), [&](VarId x, VarId y) { return cs.name(x) < cs.name(y); });
    ties.push_back(names_of(cs, sorted));
  }
  std::sort(ties.begin(), ties.end());
  json parts = json::array();
  for (std::size_t p = 0; p < d.parts.size(); ++p) {
    std::vector<VarId> members;
    for (std::size_t v = 0; v < cs.size(); ++v) {
      if (a.part_of(var(v)) == p) members.push_back(var(v));
    }
    std::sort(members.begin(), members.end(), [&](VarId x, VarId y) { return cs.name(x) < cs.name(y); });
    parts.push_back({{"variables", names_of(cs, members)}, {"shape", std::string(to_string(d.shapes[p]))}});
  }
  std::sort(parts.begin(), parts.end(), [](const json& x, const json& y) { return x["variables"] < y["variables"]; });
  return {{"dimension", a.dimension()}, {"ties", ties}, {"parts", parts}};
}

json interpolate_result(const Analysis& a, const QueryRequest& r, const QueryOptions& o, Diagnostics& diag) {
  const ConstraintSet& cs = a.original();
  const std::vector<VarId> wanted = r.variables.empty() ? by_name(cs) : resolve(cs, r.variables);
  json values = json::object();
  if (r.scheme == "stable") {
    const auto stable = a.interpolate_stable();
    diag.used("stable");
    for (VarId v : wanted) values[cs.name(v)] = value_json(stable[idx(v)]);
  } else if (r.scheme == "uniform") {
    if (wanted.size() == 1) {
      values[cs.name(wanted.front())] = value_of(a.interpolate(wanted.front(), o, &diag));
    } else {
      const auto all = a.interpolate_all(o, &diag);
      for (VarId v : wanted) values[cs.name(v)] = value_of(all[idx(v)]);
    }
  } else {
    throw InputError("unknown scheme '" + r.scheme + "' (expected uniform or stable)");
  }
  return {{"scheme", r.scheme}, {"values", values}};
}

json entry_json(const ConstraintSet& cs, const TopKEntry& e, const char* label) {
  return {{"variable", cs.name(e.variable)}, {label, value_of(e.annotation)}};
}

json topk_result(const Analysis& a, const QueryRequest& r, const QueryOptions& o, Diagnostics& diag) {
  const ConstraintSet& cs = a.original();
  const auto semantics = parse_semantics(r.semantics);
  if (!semantics) throw InputError("unknown semantics '" + r.semantics + "' (expected local, u or global)");
  const std::vector<VarId> selection = r.selection.empty() ? by_name(cs) : resolve(cs, r.selection);
  const TopKResult res = topk(a, *semantics, selection, r.k, o);
  diag = res.diagnostics;

  const char* label = *semantics == Semantics::local ? "expected_value" : "probability";
  json entries = json::array();
  for (const auto& e : res.entries) entries.push_back(entry_json(cs, e, label));
  json out{{"semantics", r.semantics}, {"k", r.k}, {"selection", names_of(cs, selection)}, {"entries", entries}};
  if (*semantics == Semantics::u) {
    out["probability"] = value_json(*res.probability);
    json seqs = json::array();
    for (const auto& s : res.sequences) {
      seqs.push_back({{"sequence", names_of(cs, s.sequence)}, {"probability", value_json(s.probability)}});
    }
    out["sequences"] = seqs;
  }
  if (*semantics == Semantics::global) {
    json inclusion = json::object();
    for (const auto& e : res.inclusion) inclusion[cs.name(e.variable)] = value_of(e.annotation);
    out["inclusion"] = inclusion;
  }
  if (r.containment) {
    const ContainmentReport c = check_containment(a, *semantics, selection, o);
    json report{{"holds", c.holds}};
    if (!c.holds) {
      report["violation_k"] = *c.violation_k;
      report["smaller"] = names_of(cs, c.smaller);
      report["larger"] = names_of(cs, c.larger);
    }
    out["containment"] = report;
  }
  return out;
}

json sample_result(const ConstraintSet& cs, const QueryRequest& r, Diagnostics& diag) {
  r.sampler.validate();
  SamplerConfig cfg = r.sampler;
  cfg.threads = r.threads;
  const auto points = hit_and_run_sample(cs, cfg, r.count);
  diag.used("sample");
  diag.samples = points.size();
  const auto order = by_name(cs);
  json rows = json::array();
  for (const auto& p : points) {
    json row = json::array();
    for (VarId v : order) row.push_back(p[idx(v)]);
    rows.push_back(row);
  }
  return {{"variables", names_of(cs, order)}, {"samples", rows}};
}

json dispatch(const QueryRequest& r, QueryResponse& response, Diagnostics& diag) {
  const ConstraintSet cs = read_input(r.input_path);
  if (r.command == "check") return check_result(cs, response);
  if (r.command == "close") return {{"constraints", constraints_to_json(close_under_implication(cs))}};

  const QueryOptions options = query_options(r);
  if (r.command == "sample") {
    require_consistent(cs);
    return sample_result(cs, r, diag);
  }
  const Analysis analysis(cs);
  if (r.dump_extensions) dump_extension_table(cs, options, *r.dump_extensions);
  if (r.command == "decompose") return decompose_result(analysis);
  if (r.command == "dim") return {{"dimension", analysis.dimension()}};
  if (r.command == "volume") {
    return {{"dimension", analysis.dimension()}, {"volume", value_json(analysis.volume(options, &diag))}};
  }
  if (r.command == "interpolate") return interpolate_result(analysis, r, options, diag);
  if (r.command == "marginal") {
    if (r.variables.size() != 1) throw InputError("marginal needs exactly one --var");
    const VarId x = cs.variable(r.variables.front());
    const PiecewisePolynomial density = analysis.marginal(x, options, &diag);
    return {{"variable", r.variables.front()}, {"density", piecewise_json(density)},
            {"mean", value_json(pw_expectation(density))}};
  }
  if (r.command == "topk") return topk_result(analysis, r, options, diag);
  throw InputError("unknown command '" + r.command + "'");
}

json error_json(const char* kind, const std::exception& e) { return {{"error", kind}, {"message", e.what()}}; }

}  // namespace

QueryResponse run(const QueryRequest& request) {
  QueryResponse response;
  Diagnostics diag;
  const auto start = std::chrono::steady_clock::now();
  try {
    json result = dispatch(request, response, diag);
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    response.result = {{"command", request.command},
                       {"result", std::move(result)},
                       {"diagnostics",
                        {{"engine", diag.engine},
                         {"extensions", diag.extensions},
                         {"samples", diag.samples},
                         {"elapsed_ms", std::round(elapsed * 1000) / 1000}}}};
  } catch (const InconsistentError& e) {
    response.exit_code = kExitContradiction;
    response.error = error_json("contradiction", e);
    response.error["witness"] = e.witness();
  } catch (const BudgetError& e) {
    response.exit_code = kExitBudget;
    response.error = error_json("budget", e);
  } catch (const UnsupportedShapeError& e) {
    response.exit_code = kExitBudget;
    response.error = error_json("unsupported-shape", e);
  } catch (const InputError& e) {
    response.exit_code = kExitInput;
    response.error = error_json("input", e);
  } catch (const PreconditionError& e) {
    response.exit_code = kExitInput;
    response.error = error_json("precondition", e);
  } catch (const std::bad_alloc& e) {
    response.exit_code = kExitBudget;
    response.error = error_json("memory", e);
  } catch (const std::exception& e) {
    response.exit_code = kExitInput;
    response.error = error_json("internal", e);
  }
  return response;
}

namespace {

unsigned default_threads() {
  if (const char* env = std::getenv("ORDPOLY_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
      // fall through to the default
    }
  }
  return 1;
}

// Splits "a,b" arguments and flattens repeated flags.
std::vector<std::string> split_names(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"Interpolation of unknown values under order and exact-value constraints", "ordpoly"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ordpoly 0.1.0");

  QueryRequest request;
  request.threads = default_threads();
  std::vector<std::string> vars;
  std::vector<std::string> select;
  std::string output;
  std::optional<std::size_t> burn_in;
  std::optional<std::size_t> thinning;
  std::string dump;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"check", "Check that the constraints admit a possible world"},
      {"close", "Print the closure under implication"},
      {"decompose", "Print persistent ties and the uninfluence decomposition"},
      {"dim", "Print the dimension of the admissible polytope"},
      {"volume", "Exact volume of the admissible polytope"},
      {"interpolate", "Expected values under the uniform distribution (or the stable scheme)"},
      {"marginal", "Density of one variable as a piecewise polynomial"},
      {"topk", "Top-k answers under local, u or global semantics"},
      {"sample", "Draw points from the admissible polytope with hit-and-run"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("input", request.input_path, "Constraint file (JSON), or - for standard input")->required();
    sub->add_option("-o,--output", output, "Write the result here instead of standard output");
    sub->add_option("--engine", request.engine, "auto, exact, tree or sample")
        ->check(CLI::IsMember({"auto", "exact", "tree", "sample"}));
    sub->add_option("--max-extensions", request.max_extensions, "Linear extension budget");
    sub->add_option("--threads", request.threads, "Worker threads (default: ORDPOLY_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--epsilon", request.sampler.epsilon, "Sampler accuracy");
    sub->add_option("--delta", request.sampler.delta, "Sampler failure probability");
    sub->add_option("--seed", request.sampler.seed, "Sampler seed");
    sub->add_option("--burn-in", burn_in, "Steps before the first sample (default 1000 x dimension)");
    sub->add_option("--thinning", thinning, "Steps between samples (default: the dimension)");
    sub->add_option("--chains", request.sampler.chains, "Independent chains")->check(CLI::PositiveNumber);
    sub->add_option("--dump-extensions", dump, "Write the per-extension volume table as JSON lines");
    const std::string name = c.name;
    if (name == "interpolate" || name == "marginal") {
      sub->add_option("--var", vars, "Variable(s) to report")->delimiter(',');
    }
    if (name == "interpolate") {
      sub->add_option("--scheme", request.scheme, "uniform or stable")->check(CLI::IsMember({"uniform", "stable"}));
    }
    if (name == "topk") {
      sub->add_option("--k", request.k, "Answer size")->check(CLI::PositiveNumber);
      sub->add_option("--semantics", request.semantics, "local, u or global")
          ->check(CLI::IsMember({"local", "u", "global"}));
      sub->add_option("--select", select, "Selected variables (default: all)")->delimiter(',');
      sub->add_flag("--containment", request.containment, "Also test the containment property");
    }
    if (name == "sample") sub->add_option("--count", request.count, "Number of points");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return kExitInput;
  }

  request.command = app.get_subcommands().front()->get_name();
  request.variables = split_names(vars);
  request.selection = split_names(select);
  request.sampler.burn_in = burn_in;
  request.sampler.thinning = thinning;
  if (!dump.empty()) request.dump_extensions = dump;

  const QueryResponse response = run(request);
  if (!response.result.is_null()) {
    const std::string text = response.result.dump(2);
    if (output.empty()) {
      std::cout << text << '\n';
    } else {
      std::ofstream out(output);
      if (!out) {
        std::cerr << json{{"error", "input"}, {"message", "cannot write '" + output + "'"}}.dump() << '\n';
        return kExitInput;
      }
      out << text << '\n';
    }
  }
  if (!response.error.is_null()) std::cerr << response.error.dump() << '\n';
  return response.exit_code;
}

}  // namespace ordpoly::cli
