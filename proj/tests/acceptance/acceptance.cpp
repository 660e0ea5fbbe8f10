// Acceptance run: one line per criterion, exit status 1 when any fails.
// Usage: ordpoly_acceptance <path to the ordpoly tool> <test data directory>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <map>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsl.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "ordpoly/analysis.hpp"
#include "ordpoly/errors.hpp"
#include "ordpoly/exact_engine.hpp"
#include "ordpoly/io.hpp"
#include "ordpoly/model.hpp"
#include "ordpoly/sampler.hpp"
#include "ordpoly/stable.hpp"
#include "ordpoly/topk.hpp"
#include "ordpoly/tree_engine.hpp"

using namespace ordpoly;
using ordpoly::testing::parse_dsl;
using ordpoly::testing::Rng;
using nlohmann::json;

namespace {

std::string g_tool;
std::string g_data;

// Collects failed checks of one criterion.
struct Checker {
  std::vector<std::string> failures;
  std::ostringstream note;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
  template <typename A, typename B>
  void equal(const A& got, const B& want, const std::string& what) {
    if (got == want) return;
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want;
    expect(false, os.str());
  }
};

struct ToolRun {
  int code = -1;
  json out;
};

ToolRun run_tool(const std::string& args) {
  ToolRun r;
  const std::string cmd = "'" + g_tool + "' " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::string text;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe) != nullptr) text += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (!text.empty()) r.out = json::parse(text, nullptr, false);
  return r;
}

std::string file(const char* name) { return "'" + g_data + "/" + name + "'"; }

using Names = std::vector<std::string>;

Names names_of(const ConstraintSet& cs, const std::vector<VarId>& vars) {
  Names out;
  for (VarId v : vars) out.push_back(cs.name(v));
  return out;
}

std::ostream& operator<<(std::ostream& os, const Names& n) {
  os << "(";
  for (std::size_t i = 0; i < n.size(); ++i) os << (i ? ", " : "") << n[i];
  return os << ")";
}

std::vector<VarId> pick(const ConstraintSet& cs, std::initializer_list<const char*> list) {
  std::vector<VarId> out;
  for (const char* n : list) out.push_back(cs.variable(n));
  return out;
}

const char* kUnstable = "x_r = 0; x_c = 0.5; x_e = 1; x_r <= x_a; x_a <= x_b <= x_c; x_a <= x_d <= x_e";

ConstraintSet diamond(const Rational& gamma) {
  auto cs = parse_dsl("x <= y <= z; x <= yp <= z; x <= z");
  cs.set_exact(cs.variable("yp"), gamma);
  return cs;
}

void worked_example(Checker& c) {
  for (const Rational gamma : {Rational(1, 2), Rational(1, 4)}) {
    const auto cs = diamond(gamma);
    const Rational a1 = gamma * gamma * (1 - gamma) / 2;
    const Rational a2 = gamma * (1 - gamma) * (1 - gamma) / 2;
    const Rational want = gamma == Rational(1, 2) ? Rational(1, 2) : Rational(5, 12);
    c.equal(interpolate_exact(cs, cs.variable("y")), want, "E[y] at " + gamma.str());
    c.equal(volume_exact(cs), a1 + a2, "volume at " + gamma.str());
    std::vector<Rational> vols;
    for_each_extension_volume(cs, {}, [&](std::span<const std::string* const>, const Rational& v) { vols.push_back(v); });
    std::sort(vols.begin(), vols.end());
    std::vector<Rational> expected{a1, a2};
    std::sort(expected.begin(), expected.end());
    c.expect(vols == expected, "extension volumes at " + gamma.str());
  }
  for (const auto& [name, want] : {std::pair{"worked_example_half.json", "1/2"}, {"worked_example_quarter.json", "5/12"}}) {
    const auto r = run_tool("interpolate " + file(name) + " --var y");
    c.equal(r.code, 0, std::string("cli exit on ") + name);
    c.expect(r.out.is_object() && r.out["result"]["values"]["y"]["exact"] == want, std::string("cli E[y] on ") + name);
  }
  c.note << "E[y] = 1/2 and 5/12, volumes 1/8 and 3/32";
}

void instability(Checker& c) {
  QueryOptions tree;
  tree.engine = Engine::tree;
  Diagnostics diag;
  const Analysis a(parse_dsl(kUnstable));
  c.equal(*a.interpolate(a.original().variable("x_a"), tree, &diag).exact, Rational(3, 20), "x_a");
  c.equal(*a.interpolate(a.original().variable("x_b"), tree, &diag).exact, Rational(13, 40), "x_b");
  auto pinned = parse_dsl(kUnstable);
  pinned.set_exact(pinned.variable("x_b"), Rational(13, 40));
  const Analysis b(pinned);
  c.equal(*b.interpolate(b.original().variable("x_a"), tree, &diag).exact, Rational(611, 4020), "pinned x_a");
  c.equal(diag.engine, std::string("tree"), "engine");
  c.note << "3/20, 13/40, then 611/4020";
}

void u_counterexample(Checker& c) {
  const Analysis a(parse_dsl("x_l <= x_h; x_fp = 0.7; x_fm = 0.69"));
  const auto& cs = a.original();
  const auto sel = pick(cs, {"x_l", "x_h", "x_fp", "x_fm"});
  const auto one = u_topk(a, sel, 1);
  c.equal(names_of(cs, one.variables()), Names{"x_h"}, "u-top-1");
  std::map<Names, Rational> p1, p2;
  for (const auto& s : one.sequences) p1[names_of(cs, s.sequence)] = s.probability;
  c.equal(p1[Names{"x_h"}], Rational(51, 100), "P(x_h)");
  c.equal(p1[Names{"x_fp"}], Rational(49, 100), "P(x_fp)");
  const auto two = u_topk(a, sel, 2);
  c.equal(names_of(cs, two.variables()), (Names{"x_fp", "x_fm"}), "u-top-2");
  for (const auto& s : two.sequences) p2[names_of(cs, s.sequence)] = s.probability;
  c.equal(two.sequences.size(), std::size_t{4}, "number of k=2 sequences");
  c.equal(p2[(Names{"x_fp", "x_fm"})], Rational(4761, 10000), "P(x_fp, x_fm)");
  c.equal(p2[(Names{"x_h", "x_fp"})], Rational(42, 100), "P(x_h, x_fp)");
  c.equal(p2[(Names{"x_h", "x_l"})], Rational(9, 100), "P(x_h, x_l)");
  c.equal(p2[(Names{"x_fp", "x_h"})], Rational(139, 10000), "P(x_fp, x_h)");
  const auto report = check_containment(a, Semantics::u, sel);
  c.expect(!report.holds && report.violation_k == 1u, "containment violation at k=1");
  const auto r = run_tool("topk " + file("u_topk.json") + " --semantics u --k 2");
  c.expect(r.code == 0 && r.out["result"]["probability"]["exact"] == "4761/10000", "cli u-top-2");
  c.note << "(x_h) 51/100 vs (x_fp) 49/100; k=2 sequences 4761/10000, 42/100, 9/100, 139/10000";
}

void global_counterexample(Checker& c) {
  const Analysis a(parse_dsl("x_l <= x_h; x_l = 0.45; x_f = 0.73; x_s"));
  const auto& cs = a.original();
  const auto sel = pick(cs, {"x_h", "x_f", "x_s"});
  const auto one = global_topk(a, sel, 1);
  const auto two = global_topk(a, sel, 2);
  c.equal(names_of(cs, one.variables()), Names{"x_h"}, "global-top-1");
  c.expect(!two.entries.empty() && cs.name(two.entries[0].variable) == "x_f", "first of global-top-2");
  const auto prob = [&](const TopKResult& r, const char* name) {
    for (const auto& e : r.inclusion) {
      if (cs.name(e.variable) == name) return *e.annotation.exact;
    }
    return Rational(-1);
  };
  c.expect(prob(one, "x_h") > prob(one, "x_f"), "P1(x_h) > P1(x_f)");
  c.expect(prob(two, "x_f") > prob(two, "x_h"), "P2(x_f) > P2(x_h)");
  c.expect(!check_containment(a, Semantics::global, sel).holds, "containment violated");
  c.note << "k=1: x_h " << prob(one, "x_h") << " > x_f " << prob(one, "x_f") << "; k=2: x_f " << prob(two, "x_f")
         << " > x_h " << prob(two, "x_h");
}

void local_vs_u(Checker& c) {
  const Analysis a(parse_dsl("xp <= x; y = 7/10"));
  const auto& cs = a.original();
  const auto sel = pick(cs, {"x", "y"});
  c.equal(names_of(cs, local_topk(a, sel, 1).variables()), Names{"y"}, "local-top-1");
  c.equal(names_of(cs, u_topk(a, sel, 1).variables()), Names{"x"}, "u-top-1");
  const auto m = marginal_exact(cs, cs.variable("x"));
  c.expect(m == PiecewisePolynomial::on_interval(Polynomial{0, 2}, 0, 1).canonical(), "marginal is 2t");
  std::ostringstream density;
  density << m;
  std::string text = density.str();
  while (!text.empty() && text.back() == '\n') text.pop_back();
  c.note << "local y, u x, marginal " << text;
}

void cross_engine(Checker& c) {
  Rng rng(20240601);
  std::size_t sets = 0, nodes = 0;
  while (sets < 200) {
    const auto cs = ordpoly::testing::random_tree_set(rng, 8);
    const auto q = collapse_ties(cs).quotient;
    const auto d = decompose(q);
    if (d.parts.size() != 1 || d.shapes[0] == Shape::general) {
      c.expect(false, "generator produced a non-tree");
      continue;
    }
    ++sets;
    const auto t = ConstraintTree::from_part(d.parts[0]);
    c.expect(volume_tree(t) == volume_exact(cs), "volume, set " + std::to_string(sets));
    for (std::size_t n = 0; n < t.size(); ++n) {
      ++nodes;
      const VarId local = t.nodes[n];
      c.expect(interpolate_tree(t, n) == interpolate_exact(d.parts[0], local), "mean, set " + std::to_string(sets));
      c.expect(marginal_tree(t, n) == marginal_exact(d.parts[0], local).canonical(),
               "marginal, set " + std::to_string(sets));
    }
  }
  c.note << sets << " sets, " << nodes << " unknowns compared";
}

void rank_law(Checker& c) {
  Rng rng(7);
  std::size_t vars = 0;
  for (int i = 0; i < 120; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(i % 7);
    const auto cs = ordpoly::testing::random_order_set(rng, n, 0.35);
    const auto oracle = ordpoly::testing::brute_force(cs);
    const auto means = interpolate_exact_all(cs);
    for (std::size_t v = 0; v < n; ++v) {
      ++vars;
      const Rational r = expected_rank(cs, var(v));
      c.expect(means[v] == r / Rational(n + 1), "set " + std::to_string(i));
      c.expect(r == oracle.ranks[v], "rank oracle, set " + std::to_string(i));
    }
  }
  c.note << "120 sets, " << vars << " variables";
}

void splitting(Checker& c) {
  Rng rng(99);
  std::size_t multi = 0;
  for (int i = 0; i < 120; ++i) {
    const auto cs = ordpoly::testing::random_separated_set(rng, 7);
    const auto q = collapse_ties(cs).quotient;
    const auto d = decompose(q);
    multi += d.parts.size() > 1 ? 1 : 0;
    Rational product(1);
    for (const auto& part : d.parts) product *= volume_exact(part);
    const Rational whole = volume_exact(cs);
    c.expect(whole == product, "volume product, set " + std::to_string(i));
    c.expect(whole == ordpoly::testing::brute_force(cs).volume, "volume oracle, set " + std::to_string(i));
    const auto all = interpolate_exact_all(cs);
    for (std::size_t p = 0; p < d.parts.size(); ++p) {
      for (std::size_t j = 0; j < d.parts[p].size(); ++j) {
        if (d.parts[p].is_exact(var(j))) continue;
        const VarId parent = d.part_to_parent[p][j];
        c.expect(interpolate_exact(d.parts[p], var(j)) == all[idx(parent)], "per-part mean, set " + std::to_string(i));
      }
    }
  }
  c.note << "120 sets, " << multi << " with several parts";
}

void tie_collapse(Checker& c) {
  Rng rng(5150);
  std::size_t ties = 0;
  for (int i = 0; i < 120; ++i) {
    const auto base = ordpoly::testing::random_world_set(rng, 1 + i % 4, i % 3, 0.5);
    const auto tied = ordpoly::testing::inject_ties(rng, base, 1 + i % 3);
    ties += tied.tied.size() - base.size();
    const auto oracle = ordpoly::testing::brute_force(base);
    const auto got = interpolate_exact_all(tied.tied);
    const Analysis a(tied.tied);
    const auto automatic = a.interpolate_all({});
    for (std::size_t v = 0; v < tied.tied.size(); ++v) {
      const Rational& want = oracle.means[idx(tied.base_of[v])];
      c.expect(got[v] == want, "exact engine, set " + std::to_string(i));
      c.expect(automatic[v].exact == want, "auto engine, set " + std::to_string(i));
    }
    c.expect(volume_exact(tied.tied) == oracle.volume, "volume, set " + std::to_string(i));
  }
  c.note << "120 sets, " << ties << " injected tied copies";
}

void order_statistics(Checker& c) {
  Rng rng(10);
  std::size_t checked = 0;
  for (unsigned n = 1; n <= 6; ++n) {
    for (int round = 0; round < 4; ++round) {
      ConstraintSet cs;
      Rational alpha(0), beta(1);
      std::vector<VarId> chain;
      if (round > 0) {
        alpha = ordpoly::testing::random_rational(rng, 0, Rational(1, 2));
        beta = round == 1 ? Rational(1) : ordpoly::testing::random_rational(rng, alpha, 1);
        const VarId lo = cs.add_variable("lo");
        cs.set_exact(lo, alpha);
        chain.push_back(lo);
      }
      for (unsigned i = 0; i < n; ++i) {
        const VarId v = cs.add_variable("x" + std::to_string(i + 1));
        if (!chain.empty()) cs.add_order(chain.back(), v);
        chain.push_back(v);
      }
      if (round > 1) {
        const VarId hi = cs.add_variable("hi");
        cs.set_exact(hi, beta);
        cs.add_order(chain.back(), hi);
      }
      for (unsigned i = 1; i <= n; ++i) {
        const auto got = marginal_exact(cs, cs.variable("x" + std::to_string(i)));
        const auto want =
            PiecewisePolynomial::on_interval(ordpoly::testing::beta_density(i, n, alpha, beta), alpha, beta).canonical();
        c.expect(got == want, "n=" + std::to_string(n) + " rank " + std::to_string(i));
        ++checked;
      }
    }
  }
  c.note << checked << " marginals against rescaled Beta densities";
}

void sampler_quality(Checker& c) {
  Rng rng(4242);
  int good = 0;
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const auto cs = ordpoly::testing::random_world_set(rng, 1 + static_cast<std::size_t>(i % 6), i % 3, 0.4);
    const auto exact = interpolate_exact_all(cs);
    SamplerConfig cfg;
    cfg.seed = 1000 + static_cast<std::uint64_t>(i);
    bool ok = true;
    for (VarId u : cs.unknowns()) {
      const auto e = estimate_expected_value(cs, u, cfg);
      const auto again = estimate_expected_value(cs, u, cfg);
      c.expect(e.value == again.value, "reproducible per seed, instance " + std::to_string(i));
      c.expect(e.samples == 2952, "sample count");
      const double err = std::abs(e.value - exact[idx(u)].to_double());
      worst = std::max(worst, err);
      ok = ok && err <= 0.05;
    }
    good += ok ? 1 : 0;
  }
  c.expect(good >= 18, "only " + std::to_string(good) + "/20 instances within 0.05");
  c.note << good << "/20 instances with every unknown within 0.05 (worst error " << worst << ")";
}

void rejection_cross_check(Checker& c) {
  Rng rng(31337);
  int dags = 0;
  double worst = 0;
  while (dags < 20) {
    const auto cs = ordpoly::testing::random_world_set(rng, 2 + static_cast<std::size_t>(dags % 4), dags % 2, 0.5);
    const auto pilot = ordpoly::testing::rejection_sample(cs, 100, 1);
    if (static_cast<double>(pilot.accepted) / static_cast<double>(pilot.proposed) < 1e-2) continue;
    const auto mc = ordpoly::testing::rejection_sample(cs, 100000, 77 + static_cast<std::uint64_t>(dags));
    const auto exact = interpolate_exact_all(cs);
    for (VarId u : cs.unknowns()) {
      const double z = std::abs(mc.mean[idx(u)] - exact[idx(u)].to_double()) / mc.standard_error[idx(u)];
      worst = std::max(worst, z);
      c.expect(z <= 4, "DAG " + std::to_string(dags) + " off by " + std::to_string(z) + " standard errors");
    }
    ++dags;
  }
  c.note << "20 DAGs, largest deviation " << worst << " standard errors";
}

void scale(Checker& c) {
  Rng rng(1000);
  ConstraintSet cs;
  const VarId root = cs.add_variable("root");
  cs.set_exact(root, Rational(0));
  std::vector<VarId> nodes;
  for (int i = 0; i < 1000; ++i) {
    nodes.push_back(cs.add_variable("n" + std::to_string(i)));
    const VarId parent = i == 0 ? root : nodes[std::uniform_int_distribution<int>(0, i - 1)(rng)];
    cs.add_order(parent, nodes.back());
    if (std::bernoulli_distribution(0.2)(rng)) {
      const VarId z = cs.add_variable("z" + std::to_string(i));
      cs.set_exact(z, ordpoly::testing::random_rational(rng, 0, 1));
      cs.add_order(nodes.back(), z);
    }
  }
  const auto start = std::chrono::steady_clock::now();
  const auto q = collapse_ties(cs).quotient;
  const auto d = decompose(q);
  c.expect(d.parts.size() == 1 && d.shapes[0] == Shape::tree, "1000-node set is one tree");
  const Rational v = volume_tree(ConstraintTree::from_part(d.parts.at(0)));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  c.expect(v > Rational(0), "positive volume");
  c.expect(secs < 10, "tree volume took " + std::to_string(secs) + " s");

  const auto r = run_tool("volume " + file("antichain15.json") + " --engine exact");
  c.equal(r.code, 2, "budget exit code");
  c.note << "1000-node tree volume in " << secs << " s; antichain exit " << r.code;
}

void stable_scheme(Checker& c) {
  const auto cs = parse_dsl(kUnstable);
  const auto v = interpolate_forest(cs, Scheme::stable);
  c.equal(v[idx(cs.variable("x_a"))], Rational(1, 6), "x_a");
  c.equal(v[idx(cs.variable("x_b"))], Rational(1, 3), "x_b");
  c.equal(v[idx(cs.variable("x_d"))], Rational(7, 12), "x_d");

  Rng rng(777);
  for (int i = 0; i < 50; ++i) {
    // one unknown between an exact lower bound and several exact upper bounds
    ConstraintSet s;
    const Rational lo = ordpoly::testing::random_rational(rng, 0, Rational(1, 2));
    const VarId r = s.add_variable("r");
    const VarId x = s.add_variable("x");
    s.set_exact(r, lo);
    s.add_order(r, x);
    Rational tightest(1);
    const int leaves = 1 + i % 3;
    for (int l = 0; l < leaves; ++l) {
      const Rational hi = ordpoly::testing::random_rational(rng, lo, 1);
      tightest = std::min(tightest, hi);
      const VarId z = s.add_variable("z" + std::to_string(l));
      s.set_exact(z, hi);
      s.add_order(x, z);
    }
    c.equal(interpolate_forest(s, Scheme::stable)[idx(x)], (lo + tightest) / 2, "balanced, instance " + std::to_string(i));
  }

  std::size_t checks = 0;
  for (int i = 0; i < 100; ++i) {
    const auto t = ordpoly::testing::random_tree_set(rng, 10);
    for (VarId u : t.unknowns()) {
      ++checks;
      c.expect(check_stability(t, u, Scheme::stable).stable, "stability, tree " + std::to_string(i));
    }
  }
  c.note << "1/6, 1/3, 7/12; 50 balanced cases; " << checks << " stability checks";
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<void(Checker&)> body;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: ordpoly_acceptance <ordpoly tool> <data dir>\n";
    return 2;
  }
  g_tool = argv[1];
  g_data = argv[2];

  const std::vector<Criterion> criteria = {
      {1, "diamond example, exact means and volumes", 1, worked_example},
      {2, "uniform scheme instability on the tree", 1, instability},
      {3, "u-top-k containment counterexample", 1, u_counterexample},
      {4, "global-top-k containment counterexample", 1, global_counterexample},
      {5, "local against u disagreement, marginal 2t", 1, local_vs_u},
      {6, "tree engine against enumeration on 200 trees", 60, cross_engine},
      {7, "expected value from expected rank", 60, rank_law},
      {8, "splitting at exact separators", 60, splitting},
      {9, "tie collapse against tie-free rewriting", 30, tie_collapse},
      {10, "order-statistic marginals", 10, order_statistics},
      {11, "sampler accuracy and reproducibility", 300, sampler_quality},
      {12, "rejection sampling cross-check", 300, rejection_cross_check},
      {13, "1000-node tree and the extension budget", 60, scale},
      {14, "stable and balanced scheme", 60, stable_scheme},
  };

  int failed = 0;
  for (const auto& crit : criteria) {
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    try {
      crit.body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.expect(secs <= crit.budget_seconds, "over the time budget");
    const bool ok = c.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("[%s] criterion %2d: %s (%.3f s; limit %.0f s) %s\n", ok ? "PASS" : "FAIL", crit.id, crit.title, secs,
                crit.budget_seconds, c.note.str().c_str());
    for (const auto& f : c.failures) std::printf("       - %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
