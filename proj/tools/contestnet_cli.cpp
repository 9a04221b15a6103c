#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "contestnet/analytics.hpp"
#include "contestnet/dynamics.hpp"
#include "contestnet/linalg.hpp"
#include "contestnet/model.hpp"
#include "contestnet/report_io.hpp"
#include "contestnet/rng.hpp"
#include "contestnet/scenario.hpp"
#include "contestnet/solver.hpp"
#include "contestnet/stability.hpp"

namespace {

using namespace contestnet;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;

struct RunConfig {
  std::string scenario_path;
  std::string out_path;           // empty -> stdout
  std::string format = "json";
  std::string method = "auto";
  std::string concept_name;
  std::string kind;
  std::string role = "attacker";
  double tol = 1e-10;
  double tol_rel = 1e-6;
  double stability_tol = 1e-7;
  int max_exhaustive = 12;
  int n = 0;
  int periods = 100;
  int points = 11;
  double from = 0.0, to = 1.0;
  double r = 0.0;
  double k1 = 0.0, k2 = 1.0, alpha = 2.0;
  std::uint64_t seed = 0;
};

int thread_budget() {
  const char* env = std::getenv("CONTESTNET_THREADS");
  if (!env) return 1;
  const int v = std::atoi(env);
  return v > 0 ? v : 1;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(cfg.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + cfg.out_path + "'");
  out << text;
}

void emit_json(const RunConfig& cfg, const json& j) { emit(cfg, j.dump(2) + "\n"); }

std::vector<double> build_grid(const RunConfig& cfg) {
  if (cfg.points < 2) throw std::invalid_argument("--points must be at least 2");
  if (!(cfg.to > cfg.from)) throw std::invalid_argument("--to must exceed --from");
  std::vector<double> grid(cfg.points);
  for (int k = 0; k < cfg.points; k++)
    grid[k] = cfg.from + (cfg.to - cfg.from) * k / (cfg.points - 1);
  return grid;
}

int cmd_solve(const RunConfig& cfg) {
  const Scenario sc = load_scenario_file(cfg.scenario_path);
  SolveOptions opts;
  const auto m = method_from_name(cfg.method);
  if (!m) throw std::invalid_argument("unknown method '" + cfg.method + "'");
  opts.method = *m;
  opts.tol = cfg.tol;
  opts.seed = cfg.seed;
  opts.randomize_init = cfg.seed != 0;
  const auto eq = solve_scenario(sc, opts);
  const Structure g = sc.structure();
  if (!eq.converged) {
    std::cerr << "solve: no convergence, best residual " << eq.kkt_residual << "\n";
    return kExitNumeric;
  }
  if (cfg.format == "csv")
    emit(cfg, equilibrium_to_csv(eq, g));
  else
    emit_json(cfg, equilibrium_to_json(eq, g));
  return kExitOk;
}

int cmd_stability(const RunConfig& cfg) {
  const Scenario sc = load_scenario_file(cfg.scenario_path);
  StabilityReport report;
  if (cfg.concept_name == "nash" || cfg.concept_name == "sps") {
    const auto eq = solve_scenario(sc, {});
    if (!eq.converged) {
      std::cerr << "stability: equilibrium solve failed\n";
      return kExitNumeric;
    }
    report = cfg.concept_name == "nash"
                 ? check_nash(eq.profile, sc.spec, cfg.stability_tol)
                 : check_strong_pairwise(eq.profile, sc.spec, cfg.stability_tol);
  } else if (cfg.concept_name == "lfps") {
    LfpsSearchConfig config;
    config.max_exhaustive = cfg.max_exhaustive;
    config.tol = cfg.stability_tol;
    report = check_lfps(sc.structure(), sc.spec, config);
  } else {
    throw std::invalid_argument("unknown concept '" + cfg.concept_name + "' (nash|sps|lfps)");
  }
  emit_json(cfg, stability_report_to_json(report));
  return report.verdict == Verdict::inconclusive ? kExitNumeric : kExitOk;
}

int cmd_classify(const RunConfig& cfg) {
  const Scenario sc = load_scenario_file(cfg.scenario_path);
  const auto eq = solve_scenario(sc, {});
  if (!eq.converged) {
    std::cerr << "classify: equilibrium solve failed\n";
    return kExitNumeric;
  }
  emit_json(cfg, partition_to_json(classify_partition(eq, sc.structure(), cfg.tol_rel)));
  return kExitOk;
}

int cmd_threshold(const RunConfig& cfg) {
  const auto cost = CostSpec::make(cfg.k1, cfg.k2, cfg.alpha);
  const auto th = bipartite_threshold(cfg.n, cfg.r, cost);
  json j;
  j["n"] = cfg.n;
  j["r"] = cfg.r;
  j["exists"] = th.exists;
  j["v_star"] = th.v_star;
  j["max_stable_v"] = th.max_stable_v;
  j["upper_bound"] = th.upper_bound;
  emit_json(cfg, j);
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg) {
  const Scenario sc = load_scenario_file(cfg.scenario_path);
  SweepKind kind;
  if (cfg.kind == "r") kind = SweepKind::r;
  else if (cfg.kind == "T") kind = SweepKind::T;
  else if (cfg.kind == "cost_scale") kind = SweepKind::cost_scale;
  else if (cfg.kind == "partition_v") kind = SweepKind::partition_v;
  else if (cfg.kind == "br_curve") kind = SweepKind::br_curve;
  else throw std::invalid_argument("unknown sweep kind '" + cfg.kind + "'");
  const auto table = sweep(kind, build_grid(cfg), sc, thread_budget());
  if (cfg.format == "csv")
    emit(cfg, sweep_to_csv(table));
  else
    emit_json(cfg, sweep_to_json(table));
  for (const auto& st : table.row_status)
    if (st != "ok") return kExitNumeric;
  return kExitOk;
}

int cmd_shock(const RunConfig& cfg) {
  const Scenario sc = load_scenario_file(cfg.scenario_path);
  if (!sc.has_partition || sc.partition_sizes.size() != 2)
    throw std::invalid_argument("shock: scenario must be complete bipartite (partition_sizes)");
  const ShockedRole role =
      cfg.role == "victim" ? ShockedRole::victim : ShockedRole::attacker;
  if (cfg.role != "victim" && cfg.role != "attacker")
    throw std::invalid_argument("shock: --role must be attacker or victim");
  const auto sh = cost_shock_derivatives(sc.partition_sizes[0], sc.partition_sizes[1], role,
                                         sc.spec);
  json j;
  j["role"] = cfg.role;
  j["w_attacker"] = sh.w_attacker;
  j["w_victim"] = sh.w_victim;
  j["d_shocked"] = sh.d_shocked;
  j["d_same_class"] = sh.d_same_class;
  j["d_other_class"] = sh.d_other_class;
  j["d_total"] = sh.d_total;
  emit_json(cfg, j);
  return kExitOk;
}

int cmd_simulate(const RunConfig& cfg) {
  const Scenario sc = load_scenario_file(cfg.scenario_path);
  const auto traj = simulate_formation(sc.structure(), sc.spec, cfg.periods, cfg.seed);
  emit(cfg, trajectory_to_jsonl(traj));
  return kExitOk;
}

int cmd_farsighted(const RunConfig& cfg) {
  GameSpec spec = GameSpec::benchmark(cfg.r);
  if (!cfg.scenario_path.empty()) spec = load_scenario_file(cfg.scenario_path).spec;
  const auto fs = farsighted_stable_set(cfg.n, spec);
  emit_json(cfg, farsighted_to_json(fs));
  return kExitOk;
}

// ----- validate: the per-scenario invariant battery ------------------------------

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

int cmd_validate(const RunConfig& cfg) {
  const Scenario sc = load_scenario_file(cfg.scenario_path);
  const GameSpec& spec = sc.spec;
  const Structure g = sc.structure();
  std::vector<Check> checks;
  Rng rng(20240901);

  auto fd_ok = [](double analytic, double numeric, double tol) {
    return std::fabs(analytic - numeric) <= tol * std::max(1.0, std::fabs(numeric));
  };

  {  // primitive derivatives vs central differences
    Check c{"primitive-derivatives-match-finite-differences"};
    c.pass = true;
    for (int k = 0; k < 40; k++) {
      const double x = 1e-3 + (10.0 - 1e-3) * rng.next_double();
      const double h = 1e-6 * std::max(1.0, x);
      const double dphi = (spec.tech.value(x + h) - spec.tech.value(x - h)) / (2 * h);
      const double dc = (spec.cost.value(x + h) - spec.cost.value(x - h)) / (2 * h);
      if (!fd_ok(spec.tech.deriv(x), dphi, 1e-6) || !fd_ok(spec.cost.deriv(x), dc, 1e-6)) {
        c.pass = false;
        c.detail = "mismatch at x=" + format_double(x);
        break;
      }
    }
    checks.push_back(c);
  }
  {  // revenue antisymmetry
    Check c{"revenue-antisymmetry"};
    c.pass = true;
    for (int k = 0; k < 200; k++) {
      const double a = rng.uniform(0.0, 3.0), b = rng.uniform(0.0, 3.0);
      if (std::fabs(contest_revenue(a, b, spec) + contest_revenue(b, a, spec)) > 1e-12) {
        c.pass = false;
        break;
      }
    }
    checks.push_back(c);
  }
  {  // payoff gradient vs finite differences; profiles keep every pair active
     // so the r = 0 singularity stays out of the way
    Check c{"payoff-gradient-matches-finite-differences"};
    c.pass = true;
    for (int trial = 0; trial < 20 && c.pass; trial++) {
      StrategyProfile s(g.n());
      for (int i = 0; i < g.n(); i++)
        for (int j = 0; j < g.n(); j++)
          if (i != j) s.set(i, j, rng.uniform(0.05, 1.2));
      for (int i = 0; i < g.n() && c.pass; i++) {
        const auto grad = payoff_gradient(i, s, spec);
        for (int j = 0; j < g.n(); j++) {
          if (j == i) continue;
          const double h = 1e-6;
          StrategyProfile up = s, dn = s;
          up.set(i, j, s.at(i, j) + h);
          dn.set(i, j, s.at(i, j) - h);
          const double fd = (payoff(i, up, spec) - payoff(i, dn, spec)) / (2 * h);
          if (!fd_ok(grad[j], fd, 1e-6)) {
            c.pass = false;
            c.detail = "player " + std::to_string(i) + " target " + std::to_string(j);
            break;
          }
        }
      }
    }
    checks.push_back(c);
  }

  EquilibriumResult eq;
  {  // solve + KKT + induced subset
    Check c{"equilibrium-kkt-residual"};
    eq = solve_scenario(sc, {});
    c.pass = eq.converged && eq.kkt_residual <= 1e-10;
    c.detail = "residual " + format_double(eq.kkt_residual);
    checks.push_back(c);
    Check c2{"induced-structure-within-requested"};
    c2.pass = true;
    const Structure induced = induced_structure(eq.profile);
    for (auto [i, j] : induced.edges())
      if (!g.has_edge(i, j)) c2.pass = false;
    checks.push_back(c2);
  }
  {  // methods agree pairwise, each from its own random start
    Check c{"methods-agree-pairwise"};
    const double tol = 1e-8;
    SolveOptions o;
    o.tol = tol;
    o.randomize_init = true;
    o.method = Method::newton;
    o.seed = 11;
    const auto e1 = solve_equilibrium(g, spec, o);
    o.method = Method::best_response;
    o.seed = 22;
    const auto e2 = solve_equilibrium(g, spec, o);
    o.method = Method::gradient_flow;
    o.seed = 33;
    const auto e3 = solve_equilibrium(g, spec, o);
    const double d12 = e1.profile.max_abs_diff(e2.profile);
    const double d13 = e1.profile.max_abs_diff(e3.profile);
    const double d23 = e2.profile.max_abs_diff(e3.profile);
    c.pass = e1.converged && e2.converged && e3.converged &&
             d12 <= 10 * tol && d13 <= 10 * tol && d23 <= 10 * tol;
    c.detail = "max pairwise gap " + format_double(std::max({d12, d13, d23}));
    checks.push_back(c);
  }
  {  // uniqueness across random starts
    Check c{"uniqueness-across-random-starts"};
    c.pass = true;
    double worst = 0.0;
    for (uint64_t s = 1; s <= 5; s++) {
      SolveOptions o;
      o.randomize_init = true;
      o.seed = s;
      const auto e = solve_equilibrium(g, spec, o);
      worst = std::max(worst, e.profile.max_abs_diff(eq.profile));
      if (!e.converged || worst > 1e-6) c.pass = false;
    }
    c.detail = "max gap " + format_double(worst);
    checks.push_back(c);
  }
  {  // strength ordering
    Check c{"strength-ordering"};
    c.pass = true;
    for (auto [i, j] : g.edges()) {
      const double wi = eq.totals[i], wj = eq.totals[j];
      const double sij = eq.profile.at(i, j), sji = eq.profile.at(j, i);
      if (wi >= wj + 1e-9 && sij > sji + 1e-9) c.pass = false;
      if (wj >= wi + 1e-9 && sji > sij + 1e-9) c.pass = false;
    }
    checks.push_back(c);
  }
  if (sc.has_partition && sc.partition_sizes.size() >= 2) {
    Check c{"reduced-solve-matches-full"};
    SolveOptions o;
    const auto full = solve_equilibrium(g, spec, o);
    const auto red = solve_multipartite(sc.partition_sizes, spec, o);
    const double gap = full.profile.max_abs_diff(red.profile);
    c.pass = full.converged && red.converged && gap <= 1e-8;
    c.detail = "gap " + format_double(gap);
    checks.push_back(c);
  }
  if (spec.tech.kind == TechnologySpec::Kind::linear) {
    Check c{"total-spending-fixed-point-matches"};
    try {
      const auto w = total_spending_fixed_point(g, spec.tech.scale, spec.cost, spec.params.r);
      double gap = 0.0;
      for (int i = 0; i < g.n(); i++) gap = std::max(gap, std::fabs(w[i] - eq.totals[i]));
      c.pass = gap <= 1e-8;
      c.detail = "gap " + format_double(gap);
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = e.what();
    }
    checks.push_back(c);
  }
  {  // payoff concave in own row / convex in opposing entries
    Check c{"payoff-curvature"};
    c.pass = true;
    for (int trial = 0; trial < 3 && c.pass; trial++) {
      StrategyProfile s(g.n());
      for (auto [i, j] : g.edges()) {
        s.set(i, j, rng.uniform(0.1, 1.0));
        s.set(j, i, rng.uniform(0.1, 1.0));
      }
      for (int i = 0; i < g.n() && c.pass; i++) {
        const auto nbrs = g.neighbors(i);
        if (nbrs.empty()) continue;
        const int m = static_cast<int>(nbrs.size());
        Matrix hess(m, m);
        const double h = 1e-5;
        for (int arow = 0; arow < m; arow++) {
          for (int bcol = 0; bcol < m; bcol++) {
            StrategyProfile pp = s, pm = s, mp = s, mm = s;
            pp.set(i, nbrs[arow], s.at(i, nbrs[arow]) + h);
            pp.set(i, nbrs[bcol], pp.at(i, nbrs[bcol]) + h);
            pm.set(i, nbrs[arow], s.at(i, nbrs[arow]) + h);
            pm.set(i, nbrs[bcol], pm.at(i, nbrs[bcol]) - h);
            mp.set(i, nbrs[arow], s.at(i, nbrs[arow]) - h);
            mp.set(i, nbrs[bcol], mp.at(i, nbrs[bcol]) + h);
            mm.set(i, nbrs[arow], s.at(i, nbrs[arow]) - h);
            mm.set(i, nbrs[bcol], mm.at(i, nbrs[bcol]) - h);
            hess(arow, bcol) = (payoff(i, pp, spec) - payoff(i, pm, spec) -
                                payoff(i, mp, spec) + payoff(i, mm, spec)) /
                               (4 * h * h);
          }
        }
        for (double ev : symmetric_eigenvalues(hess))
          if (ev > 1e-6) c.pass = false;
        for (int j : nbrs) {
          StrategyProfile up = s, dn = s;
          up.set(j, i, s.at(j, i) + h);
          dn.set(j, i, s.at(j, i) - h);
          const double second =
              (payoff(i, up, spec) - 2 * payoff(i, s, spec) + payoff(i, dn, spec)) / (h * h);
          if (second < -1e-6) c.pass = false;
        }
      }
    }
    checks.push_back(c);
  }

  bool all = true;
  std::string out;
  for (const auto& c : checks) {
    all = all && c.pass;
    out += std::string(c.pass ? "PASS" : "FAIL") + "  " + c.name;
    if (!c.detail.empty()) out += "  (" + c.detail + ")";
    out += "\n";
  }
  out += all ? "all invariants hold\n" : "invariant failures present\n";
  emit(cfg, out);
  return all ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contestnet: equilibria, stability and comparative statics of bilateral contest networks"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_path, "output file (default: stdout)");
  };
  auto add_scenario = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("--scenario", cfg.scenario_path, "scenario JSON file");
    if (required) opt->required();
  };

  auto* solve = app.add_subcommand("solve", "compute the Nash equilibrium of a scenario");
  add_scenario(solve);
  solve->add_option("--method", cfg.method, "auto|newton|best_response|gradient_flow")
      ->default_val("auto");
  solve->add_option("--tol", cfg.tol, "KKT residual bound")->default_val(1e-10);
  solve->add_option("--seed", cfg.seed, "nonzero: solve from a seeded random start")
      ->default_val(0);
  solve->add_option("--format", cfg.format, "json|csv")->default_val("json");
  add_out(solve);

  auto* stability = app.add_subcommand("stability", "check a stability concept");
  add_scenario(stability);
  stability->add_option("--concept", cfg.concept_name, "nash|sps|lfps")->required();
  stability->add_option("--tol", cfg.stability_tol, "improvement threshold")->default_val(1e-7);
  stability->add_option("--max-exhaustive", cfg.max_exhaustive,
                        "exhaustive deviation subsets up to this |F_i|")
      ->default_val(12);
  add_out(stability);

  auto* classify = app.add_subcommand("classify", "group players into strength classes");
  add_scenario(classify);
  classify->add_option("--tol-rel", cfg.tol_rel, "relative grouping tolerance")->default_val(1e-6);
  add_out(classify);

  auto* threshold = app.add_subcommand("threshold", "largest stable victim class for B(n-v, v)");
  threshold->add_option("--n", cfg.n, "population size")->required();
  threshold->add_option("--r", cfg.r, "draw parameter")->default_val(0.0);
  threshold->add_option("--k1", cfg.k1, "cost: linear coefficient")->default_val(0.0);
  threshold->add_option("--k2", cfg.k2, "cost: power coefficient")->default_val(1.0);
  threshold->add_option("--alpha", cfg.alpha, "cost: exponent")->default_val(2.0);
  add_out(threshold);

  auto* sweep_cmd = app.add_subcommand("sweep", "re-solve across a parameter grid");
  add_scenario(sweep_cmd);
  sweep_cmd->add_option("--kind", cfg.kind, "r|T|cost_scale|partition_v|br_curve")->required();
  sweep_cmd->add_option("--from", cfg.from, "grid start")->required();
  sweep_cmd->add_option("--to", cfg.to, "grid end")->required();
  sweep_cmd->add_option("--points", cfg.points, "grid size")->default_val(11);
  sweep_cmd->add_option("--format", cfg.format, "json|csv")->default_val("csv");
  add_out(sweep_cmd);

  auto* shock = app.add_subcommand("shock", "cost-shock propagation through a bipartite network");
  add_scenario(shock);
  shock->add_option("--role", cfg.role, "attacker|victim")->default_val("attacker");
  add_out(shock);

  auto* simulate = app.add_subcommand("simulate", "sequential pair-revision network formation");
  add_scenario(simulate);
  simulate->add_option("--periods", cfg.periods, "period budget")->default_val(100);
  simulate->add_option("--seed", cfg.seed, "PRNG seed")->default_val(0);
  add_out(simulate);

  auto* farsighted = app.add_subcommand("farsighted", "farsightedly stable structures, n <= 4");
  farsighted->add_option("--n", cfg.n, "population size (2..4)")->required();
  farsighted->add_option("--r", cfg.r, "draw parameter for the benchmark spec")->default_val(0.0);
  add_scenario(farsighted, false);
  add_out(farsighted);

  auto* validate = app.add_subcommand("validate", "run the invariant battery on a scenario");
  add_scenario(validate);
  add_out(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg);
    if (stability->parsed()) return cmd_stability(cfg);
    if (classify->parsed()) return cmd_classify(cfg);
    if (threshold->parsed()) return cmd_threshold(cfg);
    if (sweep_cmd->parsed()) return cmd_sweep(cfg);
    if (shock->parsed()) return cmd_shock(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (farsighted->parsed()) return cmd_farsighted(cfg);
    if (validate->parsed()) return cmd_validate(cfg);
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
