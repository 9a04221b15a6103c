// Acceptance suite: each numbered criterion prints one PASS/FAIL line; the
// process exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "contestnet/analytics.hpp"
#include "contestnet/dynamics.hpp"
#include "contestnet/model.hpp"
#include "contestnet/rng.hpp"
#include "contestnet/solver.hpp"
#include "contestnet/stability.hpp"

using namespace contestnet;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail = "") {
  std::printf("[%d] %-58s %s%s%s\n", index, name.c_str(), pass ? "PASS" : "FAIL",
              detail.empty() ? "" : "  ", detail.c_str());
  if (!pass) failures++;
}

bool rel_ok(double got, double want, double tol) {
  return std::fabs(got - want) <= tol * std::max(1.0, std::fabs(want));
}

Structure random_structure(int n, double edge_prob, Rng& rng) {
  Structure g(n);
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++)
      if (rng.next_double() < edge_prob) g.add_edge(i, j);
  return g;
}

// [1] closed form vs numeric equilibrium
void criterion_closed_form() {
  bool pass = true;
  double worst = 0.0;
  for (double alpha : {2.0, 3.0}) {
    for (auto [a, v] : std::vector<std::pair<int, int>>{{1, 1}, {3, 1}, {10, 2}, {20, 5}}) {
      const GameSpec spec{TechnologySpec::identity(), CostSpec::power_benchmark(alpha),
                          ContestParams::make(0.0)};
      const auto cf = closed_form_bipartite(a, v, alpha);
      SolveOptions o;
      o.method = Method::newton;
      const auto eq = solve_equilibrium(Structure::bipartite(a, v), spec, o);
      if (!eq.converged) pass = false;
      for (int i = 0; i < a; i++)
        for (int j = a; j < a + v; j++) {
          worst = std::max(worst, std::fabs(eq.profile.at(i, j) - cf.attacker));
          worst = std::max(worst, std::fabs(eq.profile.at(j, i) - cf.victim));
        }
    }
  }
  pass = pass && worst <= 1e-8;
  report(1, "closed-form vs numeric bipartite equilibria", pass,
         "max effort gap " + std::to_string(worst));
}

// [2] the reported two-class efforts
void criterion_figure_efforts() {
  const auto eq = solve_multipartite({10, 2}, GameSpec::benchmark());
  const double att = eq.profile.at(0, 10), vic = eq.profile.at(10, 0);
  const bool pass =
      eq.converged && std::fabs(att - 0.327) <= 5e-4 && std::fabs(vic - 0.146) <= 5e-4;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "attacker %.5f victim %.5f", att, vic);
  report(2, "two-class network reproduces efforts 0.327 / 0.146", pass, buf);
}

// [3] stability threshold of complete bipartite structures
void criterion_threshold_suite() {
  const auto quad = CostSpec::quadratic();
  bool pass = true;
  std::string detail;

  const auto th3 = bipartite_threshold(3, 0.0, quad);
  if (th3.exists) { pass = false; detail += "n=3 spurious threshold; "; }

  const auto star = check_lfps(Structure::bipartite(3, 1), GameSpec::benchmark());
  if (star.verdict != Verdict::stable) { pass = false; detail += "B(3,1) not certified; "; }

  for (int n : {10, 12, 20, 50}) {
    const auto th = bipartite_threshold(n, 0.0, quad);
    const double ub = n / 2.0 - n / (2.0 * std::sqrt(5.0));
    if (!(th.exists && th.v_star >= 1.0 && th.v_star <= ub + 1e-9)) {
      pass = false;
      detail += "n=" + std::to_string(n) + " threshold outside the bracket; ";
    }
    double prev = -1e100;
    for (int v = 1; v <= n / 2 - 1; v++) {
      const double f = attacker_link_benefit_f(n - v, v, 0.0, quad);
      if (!(f > prev)) {
        pass = false;
        detail += "f not increasing at n=" + std::to_string(n) + " v=" + std::to_string(v) + "; ";
      }
      prev = f;
    }
  }
  report(3, "bipartite stability thresholds and f monotonicity", pass, detail);
}

// [4] Nash and strong pairwise characterizations
void criterion_nash_sps_suite() {
  bool pass = true;
  std::string detail;
  for (int n = 3; n <= 8; n++) {
    for (double r : {0.0, 0.01}) {
      const GameSpec spec = GameSpec::benchmark(r);
      const auto eq = solve_equilibrium(Structure::complete(n), spec, {});
      if (!eq.converged) { pass = false; continue; }
      double spread = 0.0;
      const double ref = eq.profile.at(0, 1);
      for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++)
          if (i != j) spread = std::max(spread, std::fabs(eq.profile.at(i, j) - ref));
      if (spread > 1e-8) { pass = false; detail += "asymmetric complete-" + std::to_string(n) + "; "; }
      if (check_nash(eq.profile, spec).verdict != Verdict::stable) {
        pass = false;
        detail += "complete-" + std::to_string(n) + " r=" + std::to_string(r) + " not Nash; ";
      }
      const auto sps = check_strong_pairwise(eq.profile, spec);
      if (sps.verdict != Verdict::unstable || !sps.has_certificate ||
          sps.certificate.kind != DeviationCertificate::Kind::bilateral) {
        pass = false;
        detail += "complete-" + std::to_string(n) + " missing deletion certificate; ";
      }
    }
  }
  // empty network stable exactly when phi'(0)/r <= c'(0)
  struct EmptyCase {
    double k1, r;
    bool stable;
  };
  for (const auto& c : {EmptyCase{1.0, 2.0, true}, EmptyCase{1.0, 1.0, true},
                        EmptyCase{1.0, 0.5, false}, EmptyCase{0.0, 0.1, false},
                        EmptyCase{0.0, 2.0, false}}) {
    const GameSpec spec{TechnologySpec::identity(), CostSpec::make(c.k1, 1.0, 2.0),
                        ContestParams::make(c.r)};
    const auto nash = check_nash(StrategyProfile(5), spec);
    const auto sps = check_strong_pairwise(StrategyProfile(5), spec);
    const bool want = c.stable;
    if ((nash.verdict == Verdict::stable) != want || (sps.verdict == Verdict::stable) != want) {
      pass = false;
      detail += "empty k1=" + std::to_string(c.k1) + " r=" + std::to_string(c.r) + "; ";
    }
  }
  report(4, "complete/empty Nash verdicts and pair-deletion certificates", pass, detail);
}

// [5] comparative statics in the draw parameter, transfer and cost scale
void criterion_draw_statics() {
  bool pass = true;
  std::string detail;

  const auto d35 = effort_derivatives_r(35, 1, GameSpec::benchmark());
  const auto d4 = effort_derivatives_r(4, 1, GameSpec::benchmark());
  if (!(d35.sign_test_valid && d35.total_spending_rises && d35.d_total_spending > 0.0)) {
    pass = false;
    detail += "(35,1) sign; ";
  }
  if (!(d4.sign_test_valid && !d4.total_spending_rises && d4.d_total_spending < 0.0)) {
    pass = false;
    detail += "(4,1) sign; ";
  }

  for (double alpha : {2.0, 3.0}) {
    for (auto [a, v] :
         std::vector<std::pair<int, int>>{{3, 1}, {5, 1}, {5, 2}, {10, 1}, {10, 2}, {35, 1}}) {
      GameSpec spec{TechnologySpec::identity(), CostSpec::power_benchmark(alpha),
                    ContestParams::make(0.05)};
      const auto d = effort_derivatives_r(a, v, spec);
      GameSpec up = spec, dn = spec;
      up.params = ContestParams::make(0.05 + 1e-4);
      dn.params = ContestParams::make(0.05 - 1e-4);
      const auto ru = solve_multipartite_reduced({double(a), double(v)}, up, 1e-13);
      const auto rd = solve_multipartite_reduced({double(a), double(v)}, dn, 1e-13);
      const double fd_att = (ru.effort(0, 1) - rd.effort(0, 1)) / 2e-4;
      const double fd_vic = (ru.effort(1, 0) - rd.effort(1, 0)) / 2e-4;
      if (!rel_ok(d.d_attacker, fd_att, 1e-3) || !rel_ok(d.d_victim, fd_vic, 1e-3)) {
        pass = false;
        detail += "fd gap at (" + std::to_string(a) + "," + std::to_string(v) + "," +
                  std::to_string(alpha) + "); ";
      }
    }
  }

  {  // interior spending peak on the huge star
    Scenario sc;
    sc.has_partition = true;
    sc.partition_sizes = {200, 1};
    sc.n = 201;
    sc.spec = GameSpec::benchmark();
    std::vector<double> grid;
    for (int k = 0; k <= 20; k++) grid.push_back(k / 20.0);
    const auto table = sweep(SweepKind::r, grid, sc);
    std::vector<double> per_contest;
    for (const auto& row : table.rows) per_contest.push_back(row[2] + row[3]);
    size_t arg = 0;
    for (size_t k = 0; k < per_contest.size(); k++)
      if (per_contest[k] > per_contest[arg]) arg = k;
    if (!(arg > 0 && arg + 1 < per_contest.size() && per_contest[arg] > per_contest.front() &&
          per_contest[arg] > per_contest.back())) {
      pass = false;
      detail += "no interior spending peak on B(200,1); ";
    }
  }

  {  // transfer and cost-scale monotonicity of total spending
    Scenario sc;
    sc.has_partition = true;
    sc.partition_sizes = {10, 2};
    sc.n = 12;
    sc.spec = GameSpec::benchmark();
    const auto tt = sweep(SweepKind::T, {1.0, 1.125, 1.25, 1.375, 1.5}, sc);
    for (size_t k = 1; k < tt.rows.size(); k++)
      if (!(tt.rows[k][1] > tt.rows[k - 1][1])) { pass = false; detail += "T monotonicity; "; }
    const auto cs = sweep(SweepKind::cost_scale, {0.6, 0.7, 0.8, 0.9, 1.0}, sc);
    for (size_t k = 1; k < cs.rows.size(); k++)
      if (!(cs.rows[k][1] < cs.rows[k - 1][1])) { pass = false; detail += "cost-scale monotonicity; "; }
  }

  report(5, "draw/transfer/cost comparative statics", pass, detail);
}

// [6] propagation of an idiosyncratic cost shock
void criterion_cost_shock() {
  bool pass = true;
  std::string detail;
  const GameSpec bench = GameSpec::benchmark();
  for (auto [a, v] : std::vector<std::pair<int, int>>{{5, 2}, {10, 2}, {35, 1}}) {
    const Structure g = Structure::bipartite(a, v);
    for (ShockedRole role : {ShockedRole::attacker, ShockedRole::victim}) {
      const auto d = cost_shock_derivatives(a, v, role, bench);
      const bool attacker = role == ShockedRole::attacker;
      bool signs = d.d_shocked < 0.0 && d.d_total < 0.0;
      signs = signs && (attacker ? d.d_other_class > 0.0 : d.d_other_class < 0.0);
      if ((attacker && a > 1) || (!attacker && v > 1)) signs = signs && d.d_same_class < 0.0;
      if (!signs) {
        pass = false;
        detail += "signs (" + std::to_string(a) + "," + std::to_string(v) + "); ";
      }
      const int k = attacker ? 0 : a;
      const double eps = 1e-6;
      const auto wp = total_spending_fixed_point(g, 1.0, bench.cost, 0.0, CostShock{k, eps});
      const auto wm = total_spending_fixed_point(g, 1.0, bench.cost, 0.0, CostShock{k, -eps});
      auto fd = [&](int idx) { return (wp[idx] - wm[idx]) / (2.0 * eps); };
      const int same = attacker ? 1 : a + 1;
      const int other = attacker ? a : 0;
      bool match = rel_ok(d.d_shocked, fd(k), 1e-3) && rel_ok(d.d_other_class, fd(other), 1e-3);
      if ((attacker && a > 1) || (!attacker && v > 1))
        match = match && rel_ok(d.d_same_class, fd(same), 1e-3);
      double fd_total = 0.0;
      for (int i = 0; i < g.n(); i++) fd_total += fd(i);
      match = match && rel_ok(d.d_total, fd_total, 1e-3);
      if (!match) {
        pass = false;
        detail += "fd (" + std::to_string(a) + "," + std::to_string(v) + "); ";
      }
    }
  }
  report(6, "cost-shock derivatives: signs and finite differences", pass, detail);
}

// [7] gradient-flow dynamics and the formation process
void criterion_dynamics() {
  bool pass = true;
  std::string detail;
  Rng rng(2025);
  const GameSpec bench = GameSpec::benchmark();
  int checked = 0;
  while (checked < 50) {
    const int n = 3 + static_cast<int>(rng.next_below(6));
    const auto g = random_structure(n, 0.5, rng);
    if (g.edge_count() == 0) continue;
    checked++;
    StrategyProfile s0(n);
    for (auto [i, j] : g.edges()) {
      s0.set(i, j, rng.uniform(0.05, 1.0));
      s0.set(j, i, rng.uniform(0.05, 1.0));
    }
    const auto adj = integrate_adjustment(s0, g, bench, 0.02, 4000000, 1e-9, true);
    SolveOptions o;
    o.method = Method::newton;
    const auto eq = solve_equilibrium(g, bench, o);
    if (!adj.converged || !eq.converged || adj.profile.max_abs_diff(eq.profile) > 1e-6) {
      pass = false;
      detail += "flow endpoint case " + std::to_string(checked) + "; ";
    }
    for (size_t k = 1; k < adj.norm_trace.size(); k++) {
      if (!(adj.norm_trace[k] < adj.norm_trace[k - 1])) {
        pass = false;
        detail += "norm not strictly decreasing; ";
        break;
      }
    }
  }

  const auto settled = simulate_formation(Structure::bipartite(10, 2), bench, 20, 11);
  if (settled.status != Trajectory::Status::settled || settled.settled_period != 1) {
    pass = false;
    detail += "B(10,2) did not settle immediately; ";
  }
  for (uint64_t seed = 1; seed <= 10; seed++) {
    const auto traj = simulate_formation(Structure::complete(3), bench, 10, seed);
    if (traj.status != Trajectory::Status::settled ||
        traj.periods.back().structure.edge_count() != 0) {
      pass = false;
      detail += "complete-3 seed " + std::to_string(seed) + "; ";
    }
  }
  report(7, "action adjustment converges; formation settles as expected", pass, detail);
}

// [8] the three-player farsighted example
void criterion_farsighted() {
  const GameSpec bench = GameSpec::benchmark();
  const auto fs = farsighted_stable_set(3, bench);
  bool pass = fs.stable.size() == 1 && fs.stable_names[0] == "empty";
  const auto eq = solve_equilibrium(Structure::complete(3), bench, {});
  pass = pass && check_nash(eq.profile, bench).verdict == Verdict::stable;
  pass = pass && check_nash(StrategyProfile(3), bench).verdict == Verdict::unstable;
  report(8, "farsighted and Nash stable sets are non-nested at n = 3", pass);
}

// [9] effort and revenue orderings across three strength classes
void criterion_orderings() {
  bool pass = true;
  std::string detail;
  const GameSpec bench = GameSpec::benchmark();
  const std::vector<std::vector<int>> size_triples = {
      {4, 2, 1},  {5, 2, 1},  {5, 3, 1},  {5, 3, 2},  {6, 2, 1},  {6, 3, 1},  {6, 3, 2},
      {6, 4, 1},  {6, 4, 2},  {6, 4, 3},  {7, 3, 1},  {7, 4, 2},  {7, 5, 3},  {8, 4, 2},
      {8, 5, 1},  {8, 5, 3},  {9, 4, 2},  {9, 6, 3},  {10, 5, 2}, {10, 6, 3}};
  int violations = 0;
  for (const auto& sizes : size_triples) {
    const auto eq = solve_multipartite(sizes, bench);
    if (!eq.converged) { violations++; continue; }
    const Structure g = Structure::complete_multipartite(sizes);
    // representatives of the three classes, ordered strongest first
    std::vector<int> reps = {0, sizes[0], sizes[0] + sizes[1]};
    std::sort(reps.begin(), reps.end(),
              [&](int x, int y) { return eq.totals[x] < eq.totals[y]; });
    const int a = reps[0], b = reps[1], c = reps[2];
    if (!(eq.totals[a] < eq.totals[b] && eq.totals[b] < eq.totals[c])) {
      violations++;  // class totals failed to separate
      continue;
    }
    const auto s = [&](int i, int j) { return eq.profile.at(i, j); };
    bool ok = s(a, b) > s(a, c) && s(b, a) > s(c, a) && s(c, a) < s(c, b) && s(a, c) > s(b, c);
    ok = ok && contest_revenue(s(a, c), s(c, a), bench) > contest_revenue(s(a, b), s(b, a), bench);
    for (auto [i, j] : g.edges()) {
      if (eq.totals[i] >= eq.totals[j] && s(i, j) > s(j, i) + 1e-9) ok = false;
      if (eq.totals[j] >= eq.totals[i] && s(j, i) > s(i, j) + 1e-9) ok = false;
    }
    if (!ok) violations++;
  }
  pass = violations == 0;
  report(9, "three-class effort and revenue orderings", pass,
         violations ? std::to_string(violations) + " violations" : "");
}

}  // namespace

int main() {
  criterion_closed_form();
  criterion_figure_efforts();
  criterion_threshold_suite();
  criterion_nash_sps_suite();
  criterion_draw_statics();
  criterion_cost_shock();
  criterion_dynamics();
  criterion_farsighted();
  criterion_orderings();
  if (failures == 0)
    std::printf("acceptance: all criteria hold\n");
  else
    std::printf("acceptance: %d criteria failing\n", failures);
  return failures == 0 ? 0 : 1;
}
