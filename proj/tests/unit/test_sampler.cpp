#include <doctest.h>

#include "dsl.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "ordpoly/errors.hpp"
#include "ordpoly/exact_engine.hpp"
#include "ordpoly/model.hpp"
#include "ordpoly/sampler.hpp"

using namespace ordpoly;
using ordpoly::testing::parse_dsl;

namespace {

bool satisfies(const ConstraintSet& cs, const SamplePoint& p, double tol) {
  for (std::size_t v = 0; v < cs.size(); ++v) {
    if (p[v] < -tol || p[v] > 1 + tol) return false;
    if (cs.is_exact(var(v)) && std::abs(p[v] - cs.exact(var(v))->to_double()) > tol) return false;
  }
  for (const OrderEdge& e : cs.order_edges()) {
    if (p[idx(e.lo)] > p[idx(e.hi)] + tol) return false;
  }
  return true;
}

double mean(const std::vector<SamplePoint>& pts, std::size_t v) {
  double s = 0;
  for (const auto& p : pts) s += p[v];
  return s / static_cast<double>(pts.size());
}

}  // namespace

TEST_SUITE("approx-sampler") {
  TEST_CASE("hoeffding sample size") {
    CHECK(hoeffding_sample_size(0.05, 0.05) == 2952);
    CHECK(hoeffding_sample_size(0.1, 0.05) == 738);
  }

  TEST_CASE("config validation") {
    SamplerConfig cfg;
    cfg.epsilon = 0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg.epsilon = 0.1;
    cfg.delta = 1.5;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg.delta = 0.1;
    cfg.chains = 0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
  }

  TEST_CASE("interior points are strictly feasible") {
    CHECK(interior_point(close_under_implication(parse_dsl("x"))).at(0) == doctest::Approx(0.5));
    const auto chain = close_under_implication(parse_dsl("x1 <= x2"));
    const auto p = interior_point(chain);
    CHECK(0 < p[0]);
    CHECK(p[0] < p[1]);
    CHECK(p[1] < 1);
    const auto d = close_under_implication(parse_dsl("x <= y <= z; x <= yp <= z; yp = 0.5"));
    const auto q = interior_point(d);
    const auto at = [&](const char* n) { return q[idx(d.variable(n))]; };
    CHECK(0 < at("x"));
    CHECK(at("x") < at("y"));
    CHECK(at("x") < 0.5);
    CHECK(at("y") < at("z"));
    CHECK(0.5 < at("z"));
    CHECK(at("z") < 1);
  }

  TEST_CASE("samples satisfy every constraint") {
    ordpoly::testing::Rng rng(12);
    for (int i = 0; i < 20; ++i) {
      const auto cs = ordpoly::testing::random_world_set(rng, 5, 2, 0.5);
      SamplerConfig cfg;
      cfg.seed = static_cast<std::uint64_t>(i);
      for (const auto& p : hit_and_run_sample(cs, cfg, 200)) CHECK(satisfies(cs, p, 1e-12));
    }
  }

  TEST_CASE("tied variables share a value") {
    const auto cs = parse_dsl("a <= b; b <= a; a <= c");
    SamplerConfig cfg;
    for (const auto& p : hit_and_run_sample(cs, cfg, 50)) CHECK(p[0] == p[1]);
  }

  TEST_CASE("empirical moments") {
    SamplerConfig cfg;
    cfg.seed = 3;
    const auto one = hit_and_run_sample(parse_dsl("x"), cfg, 100000);
    CHECK(mean(one, 0) == doctest::Approx(0.5).epsilon(0.01));

    const auto pair = hit_and_run_sample(parse_dsl("xp <= x"), cfg, 100000);
    double above = 0;
    for (const auto& p : pair) above += p[1] > 0.7 ? 1 : 0;
    CHECK(above / static_cast<double>(pair.size()) == doctest::Approx(0.51).epsilon(0.02));

    const auto chain = hit_and_run_sample(parse_dsl("a <= b <= c"), cfg, 100000);
    CHECK(mean(chain, 1) == doctest::Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("estimates are reproducible and close") {
    const auto cs = parse_dsl("xp <= x");
    SamplerConfig cfg;
    cfg.seed = 42;
    const auto a = estimate_expected_value(cs, var(1), cfg);
    const auto b = estimate_expected_value(cs, var(1), cfg);
    CHECK(a.value == b.value);
    CHECK(a.samples == 2952);
    int within = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      cfg.seed = s;
      within += std::abs(estimate_expected_value(cs, var(1), cfg).value - 2.0 / 3.0) <= 0.05 ? 1 : 0;
    }
    CHECK(within >= 95);
    CHECK(estimate_expected_value(parse_dsl("x"), var(0), cfg).value == doctest::Approx(0.5).epsilon(0.1));
  }

  TEST_CASE("chains are concatenated in seed order") {
    const auto cs = parse_dsl("a <= b");
    SamplerConfig cfg;
    cfg.seed = 5;
    cfg.chains = 3;
    cfg.threads = 3;
    const auto parallel = hit_and_run_sample(cs, cfg, 30);
    cfg.threads = 1;
    CHECK(hit_and_run_sample(cs, cfg, 30) == parallel);
  }

  TEST_CASE("estimated top-k") {
    const auto cs = parse_dsl("xp <= x; y = 0.7");
    SamplerConfig cfg;
    cfg.epsilon = 0.02;
    const VarId sel[] = {cs.variable("x"), cs.variable("y")};
    const auto top = estimate_topk(cs, sel, 1, cfg);
    REQUIRE(top.size() == 1);
    CHECK(cs.name(top[0].variable) == "y");
    CHECK(top[0].exact);

    std::size_t used = 7;
    const auto exact_only = estimate_topk(parse_dsl("a = 0.2; b = 0.9"), std::vector<VarId>{var(0), var(1)}, 5,
                                          cfg, &used);
    CHECK(used == 0);
    REQUIRE(exact_only.size() == 2);
    CHECK(exact_only[0].value == 0.9);
  }

  TEST_CASE("agrees with rejection sampling") {
    ordpoly::testing::Rng rng(77);
    for (int i = 0; i < 5; ++i) {
      const auto cs = ordpoly::testing::random_world_set(rng, 3, 1, 0.5);
      const auto reference = ordpoly::testing::rejection_sample(cs, 20000, 100 + i);
      const auto exact = interpolate_exact_all(cs);
      for (VarId u : cs.unknowns()) {
        CHECK(std::abs(reference.mean[idx(u)] - exact[idx(u)].to_double()) <= 5 * reference.standard_error[idx(u)] + 1e-9);
      }
    }
  }
}
