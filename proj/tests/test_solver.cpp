#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "contestnet/model.hpp"
#include "contestnet/rng.hpp"
#include "contestnet/solver.hpp"

using namespace contestnet;

namespace {

Structure random_structure(int n, double edge_prob, Rng& rng) {
  Structure g(n);
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++)
      if (rng.next_double() < edge_prob) g.add_edge(i, j);
  return g;
}

}  // namespace

TEST_CASE("closed-form bipartite efforts") {
  SUBCASE("symmetric duel") {
    const auto e = closed_form_bipartite(1, 1, 2);
    CHECK(e.attacker == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(e.victim == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("three attackers, one victim") {
    const auto e = closed_form_bipartite(3, 1, 2);
    CHECK(e.attacker == doctest::Approx(0.48171652).epsilon(1e-7));
    CHECK(e.victim == doctest::Approx(0.27811916).epsilon(1e-7));
  }
  SUBCASE("ten attackers, two victims: rounds to the reported 0.327 / 0.146") {
    const auto e = closed_form_bipartite(10, 2, 2);
    CHECK(e.attacker == doctest::Approx(0.32674569).epsilon(1e-7));
    CHECK(e.victim == doctest::Approx(0.14612511).epsilon(1e-7));
    CHECK(std::fabs(e.attacker - 0.327) < 5e-4);
    CHECK(std::fabs(e.victim - 0.146) < 5e-4);
  }
  SUBCASE("victim-to-attacker ratio identity") {
    for (double alpha : {2.0, 2.5, 3.0, 4.0}) {
      const auto e = closed_form_bipartite(7, 3, alpha);
      CHECK(e.victim == doctest::Approx(std::pow(3.0 / 7.0, (alpha - 1.0) / alpha) * e.attacker)
                            .epsilon(1e-12));
    }
  }
  SUBCASE("alpha below 2 rejected") {
    CHECK_THROWS_AS(closed_form_bipartite(3, 1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_bipartite(0.5, 1, 2.0), std::invalid_argument);
  }
}

TEST_CASE("solve_equilibrium on reference structures") {
  const GameSpec bench = GameSpec::benchmark();
  SUBCASE("empty structure gives the zero profile") {
    const auto eq = solve_equilibrium(Structure::empty(4), bench);
    CHECK(eq.converged);
    CHECK(eq.kkt_residual == 0.0);
    for (int i = 0; i < 4; i++) CHECK(eq.totals[i] == 0.0);
  }
  SUBCASE("complete triangle lands on the symmetric point") {
    for (Method m : {Method::automatic, Method::newton, Method::best_response,
                     Method::gradient_flow}) {
      SolveOptions o;
      o.method = m;
      o.tol = m == Method::gradient_flow ? 1e-9 : 1e-10;
      const auto eq = solve_equilibrium(Structure::complete(3), bench, o);
      CHECK(eq.converged);
      const double expect = 1.0 / (2.0 * std::sqrt(2.0));
      for (int i = 0; i < 3; i++)
        for (int j = 0; j < 3; j++)
          if (i != j) CHECK(eq.profile.at(i, j) == doctest::Approx(expect).epsilon(1e-7));
    }
  }
  SUBCASE("two-class network matches the closed form") {
    SolveOptions o;
    o.method = Method::newton;
    const auto eq = solve_equilibrium(Structure::bipartite(10, 2), bench, o);
    const auto cf = closed_form_bipartite(10, 2, 2);
    CHECK(eq.converged);
    for (int i = 0; i < 10; i++)
      for (int j = 10; j < 12; j++) {
        CHECK(std::fabs(eq.profile.at(i, j) - cf.attacker) < 1e-9);
        CHECK(std::fabs(eq.profile.at(j, i) - cf.victim) < 1e-9);
      }
    // per-link interiority flags and result invariants
    for (bool flag : eq.interior) CHECK(flag);
    const auto induced = induced_structure(eq.profile);
    for (auto [i, j] : induced.edges()) CHECK(Structure::bipartite(10, 2).has_edge(i, j));
  }
  SUBCASE("non-positive tolerance rejected") {
    SolveOptions o;
    o.tol = 0.0;
    CHECK_THROWS_AS(solve_equilibrium(Structure::complete(3), GameSpec::benchmark(), o),
                    std::invalid_argument);
  }
}

TEST_CASE("uniqueness: random starts land on one profile") {
  const GameSpec bench = GameSpec::benchmark();
  const Structure g = Structure::bipartite(4, 2);
  SolveOptions base;
  const auto ref = solve_equilibrium(g, bench, base);
  for (uint64_t seed = 1; seed <= 10; seed++) {
    SolveOptions o;
    o.randomize_init = true;
    o.seed = seed;
    o.method = seed % 2 == 0 ? Method::newton : Method::best_response;
    const auto eq = solve_equilibrium(g, bench, o);
    CHECK(eq.converged);
    CHECK(eq.profile.max_abs_diff(ref.profile) < 1e-6);
  }
}

TEST_CASE("methods agree pairwise within ten tolerances") {
  Rng rng(31);
  const GameSpec spec = GameSpec::benchmark(0.02);
  const auto g = random_structure(6, 0.6, rng);
  const double tol = 1e-9;
  SolveOptions o;
  o.tol = tol;
  o.randomize_init = true;
  o.method = Method::newton;
  o.seed = 1;
  const auto e1 = solve_equilibrium(g, spec, o);
  o.method = Method::best_response;
  o.seed = 2;
  const auto e2 = solve_equilibrium(g, spec, o);
  o.method = Method::gradient_flow;
  o.seed = 3;
  const auto e3 = solve_equilibrium(g, spec, o);
  CHECK(e1.converged);
  CHECK(e2.converged);
  CHECK(e3.converged);
  CHECK(e1.profile.max_abs_diff(e2.profile) < 10 * tol);
  CHECK(e1.profile.max_abs_diff(e3.profile) < 10 * tol);
  CHECK(e2.profile.max_abs_diff(e3.profile) < 10 * tol);
}

TEST_CASE("interiority in the unbounded-marginal and small-r regimes") {
  Rng rng(17);
  SUBCASE("power technology keeps every linked effort positive") {
    const GameSpec spec{TechnologySpec::power(1.0, 0.6), CostSpec::quadratic(),
                        ContestParams::make(0.5)};
    const auto g = random_structure(6, 0.5, rng);
    const auto eq = solve_equilibrium(g, spec, {});
    CHECK(eq.converged);
    for (auto [i, j] : g.edges()) {
      CHECK(eq.profile.at(i, j) > 0.0);
      CHECK(eq.profile.at(j, i) > 0.0);
    }
  }
  SUBCASE("benchmark with tiny r stays interior") {
    const GameSpec spec = GameSpec::benchmark(1e-3);
    const auto g = random_structure(7, 0.5, rng);
    const auto eq = solve_equilibrium(g, spec, {});
    CHECK(eq.converged);
    for (auto [i, j] : g.edges()) {
      CHECK(eq.profile.at(i, j) > 0.0);
      CHECK(eq.profile.at(j, i) > 0.0);
    }
  }
}

TEST_CASE("strength ordering at equilibrium") {
  Rng rng(23);
  for (int trial = 0; trial < 10; trial++) {
    const auto g = random_structure(6 + static_cast<int>(rng.next_below(3)), 0.55, rng);
    const auto eq = solve_equilibrium(g, GameSpec::benchmark(), {});
    REQUIRE(eq.converged);
    for (auto [i, j] : g.edges()) {
      const double wi = eq.totals[i], wj = eq.totals[j];
      if (wi >= wj) CHECK(eq.profile.at(i, j) <= eq.profile.at(j, i) + 1e-9);
      if (std::fabs(wi - wj) < 1e-10)
        CHECK(eq.profile.at(i, j) == doctest::Approx(eq.profile.at(j, i)).epsilon(1e-7));
    }
  }
}

TEST_CASE("nested neighborhoods imply a strictly larger total") {
  // i's opponents form a strict subset of j's
  const GameSpec bench = GameSpec::benchmark();
  Rng rng(41);
  for (int trial = 0; trial < 8; trial++) {
    const int n = 6;
    Structure g(n);
    // j = 1 fights everyone else; i = 0 fights a strict subset of 1's rivals
    for (int k = 2; k < n; k++) g.add_edge(1, k);
    g.add_edge(0, 1);
    for (int k = 2; k < n; k++)
      if (rng.next_double() < 0.5) g.add_edge(0, k);
    // ensure strictness: 0 must miss at least one of 1's rivals
    bool strict = false;
    for (int k = 2; k < n; k++)
      if (!g.has_edge(0, k)) strict = true;
    if (!strict) g.remove_edge(0, 5);
    const auto eq = solve_equilibrium(g, bench, {});
    REQUIRE(eq.converged);
    CHECK(eq.totals[0] < eq.totals[1]);
  }
}

TEST_CASE("anticipated reply") {
  const GameSpec bench = GameSpec::benchmark();
  SUBCASE("boundary: marginal at zero below the marginal cost") {
    const GameSpec spec{TechnologySpec::identity(), CostSpec::make(2.0, 1.0, 2.0),
                        ContestParams::make(3.0)};
    // marginal at 0 = (3 + 2*0.1)/(3 + 0.1)^2 = 0.333 < c'(1) = 4
    CHECK(anticipated_reply(0.1, 1.0, spec) == 0.0);
  }
  SUBCASE("unit attack on an idle defender") {
    const double z = anticipated_reply(1.0, 0.0, bench);
    CHECK(z == doctest::Approx(0.46557).epsilon(1e-5));
    CHECK(z * (1.0 + z) * (1.0 + z) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("half attack has the exact root one half") {
    CHECK(anticipated_reply(0.5, 0.0, bench) == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("busy defenders answer more softly") {
    const double fresh = anticipated_reply(0.4, 0.0, bench);
    const double busy = anticipated_reply(0.4, 1.0, bench);
    CHECK(busy < fresh);
  }
}

TEST_CASE("best response row") {
  const GameSpec bench = GameSpec::benchmark();
  SUBCASE("zero row when marginals start below the marginal cost") {
    const GameSpec spec{TechnologySpec::identity(), CostSpec::make(2.0, 1.0, 2.0),
                        ContestParams::make(5.0)};
    StrategyProfile s(4);
    const auto row = best_response_row(0, s, Structure::complete(4), spec);
    for (double x : row) CHECK(x == 0.0);
  }
  SUBCASE("single opponent at one half") {
    StrategyProfile s(2);
    s.set(1, 0, 0.5);
    Structure g(2);
    g.add_edge(0, 1);
    const auto row = best_response_row(0, s, g, bench);
    CHECK(row[1] == doctest::Approx(0.5).epsilon(1e-10));
  }
  SUBCASE("an equilibrium row is a fixed point") {
    const auto g = Structure::bipartite(3, 2);
    const auto eq = solve_equilibrium(g, bench, {});
    for (int i = 0; i < g.n(); i++) {
      const auto row = best_response_row(i, eq.profile, g, bench);
      for (int j = 0; j < g.n(); j++) CHECK(std::fabs(row[j] - eq.profile.at(i, j)) < 1e-8);
    }
  }
}

TEST_CASE("total spending fixed point") {
  const auto quad = CostSpec::quadratic();
  SUBCASE("empty structure spends nothing") {
    const auto w = total_spending_fixed_point(Structure::empty(3), 1.0, quad, 0.0);
    for (double x : w) CHECK(x == 0.0);
  }
  SUBCASE("three attackers, one victim") {
    const auto w = total_spending_fixed_point(Structure::bipartite(3, 1), 1.0, quad, 0.0);
    CHECK(w[0] == doctest::Approx(0.4817165).epsilon(1e-6));
    CHECK(w[3] == doctest::Approx(0.8343575).epsilon(1e-6));
    // the per-link consequence of the system: s_ij = 2 c'(w_j) / (c'(w_i) + c'(w_j))^2
    const double ci = 2.0 * w[0], cj = 2.0 * w[3];
    CHECK(2.0 * cj / ((ci + cj) * (ci + cj)) == doctest::Approx(w[0]).epsilon(1e-8));
  }
  SUBCASE("ten attackers, two victims from the closed-form sums") {
    const auto w = total_spending_fixed_point(Structure::bipartite(10, 2), 1.0, quad, 0.0);
    const auto cf = closed_form_bipartite(10, 2, 2);
    CHECK(w[0] == doctest::Approx(2.0 * cf.attacker).epsilon(1e-8));
    CHECK(w[10] == doctest::Approx(10.0 * cf.victim).epsilon(1e-8));
  }
  SUBCASE("agrees with the row sums of the full solve, nonzero r and lambda") {
    const GameSpec spec{TechnologySpec::linear(1.7), CostSpec::quadratic(),
                        ContestParams::make(0.04)};
    const auto g = Structure::bipartite(5, 2);
    const auto w = total_spending_fixed_point(g, 1.7, spec.cost, 0.04);
    const auto eq = solve_equilibrium(g, spec, {});
    REQUIRE(eq.converged);
    for (int i = 0; i < g.n(); i++) CHECK(std::fabs(w[i] - eq.totals[i]) < 1e-8);
  }
}

TEST_CASE("symmetry-reduced multipartite solve matches the full solve") {
  const GameSpec bench = GameSpec::benchmark();
  SUBCASE("bipartite and tripartite class layouts") {
    for (const auto& sizes : std::vector<std::vector<int>>{{10, 2}, {4, 2, 1}, {5, 3, 2}}) {
      const auto red = solve_multipartite(sizes, bench);
      const auto full =
          solve_equilibrium(Structure::complete_multipartite(sizes), bench, {});
      REQUIRE(red.converged);
      REQUIRE(full.converged);
      CHECK(red.profile.max_abs_diff(full.profile) < 1e-8);
      CHECK(red.reduced);
    }
  }
  SUBCASE("single class means no contests") {
    const auto red = solve_multipartite({4}, bench);
    CHECK(red.converged);
    for (double w : red.totals) CHECK(w == 0.0);
  }
  SUBCASE("real-valued class sizes extend the reduced system continuously") {
    const auto a = solve_multipartite_reduced({6.0, 2.0}, bench, 1e-12);
    const auto b = solve_multipartite_reduced({6.0, 2.5}, bench, 1e-12);
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(a.effort(0, 1) != doctest::Approx(b.effort(0, 1)).epsilon(1e-6));
  }
}

TEST_CASE("gradient flow core is a solver") {
  const GameSpec bench = GameSpec::benchmark();
  const auto g = Structure::bipartite(3, 1);
  const auto eq = solve_equilibrium(g, bench, {});
  Rng rng(77);
  std::vector<double> start(2 * g.edge_count());
  for (auto& v : start) v = rng.uniform(0.05, 1.0);
  const auto flow = integrate_projected_flow(g, bench, start, 0.02, 2000000, 1e-9, false);
  CHECK(flow.converged);
  const auto endpoint = profile_from_directed(flow.efforts, g);
  CHECK(endpoint.max_abs_diff(eq.profile) < 1e-6);
}

TEST_CASE("newton scales to a few hundred directed efforts") {
  Rng rng(271828);
  const auto g = random_structure(30, 0.35, rng);
  REQUIRE(g.edge_count() > 100);
  SolveOptions o;
  o.method = Method::newton;
  const auto eq = solve_equilibrium(g, GameSpec::benchmark(0.01), o);
  CHECK(eq.converged);
  CHECK(eq.kkt_residual <= 1e-10);
  o.method = Method::best_response;
  o.tol = 1e-8;
  const auto br = solve_equilibrium(g, GameSpec::benchmark(0.01), o);
  CHECK(br.converged);
  CHECK(eq.profile.max_abs_diff(br.profile) < 1e-7);
}
