#include "contestnet/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "contestnet/linalg.hpp"

namespace contestnet {

namespace {


GameSpec identity_spec(double r, const CostSpec& cost) {
  return GameSpec{TechnologySpec::identity(), cost, ContestParams::make(r, 1.0)};
}

}  // namespace

DeviationValue deviation_value_h(double opponents, double opposing_effort, double r,
                                 const CostSpec& cost) {
  if (!(opponents >= 0.0) || !(opposing_effort >= 0.0) || !(r >= 0.0))
    throw std::invalid_argument("deviation_value_h: bad inputs");
  DeviationValue out;
  if (opponents == 0.0) return out;  // no contests left, c(0) = 0
  if (opposing_effort == 0.0 && r == 0.0)
    throw std::domain_error("deviation_value_h: value unattained against passive rivals at r = 0");

  const double s = opposing_effort, v = opponents;
  auto objective = [&](double x) { return v * (x - s) / (x + s + r) - cost.value(v * x); };
  auto slope = [&](double x) {
    return (2.0 * s + r) / ((x + s + r) * (x + s + r)) - cost.deriv(v * x);
  };
  if (slope(0.0) <= 0.0) {
    out.argmax = 0.0;
    out.value = objective(0.0);
    return out;
  }
  double hi = 1.0;
  for (int it = 0; it < 300 && slope(hi) > 0.0; it++) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0.0) lo = mid; else hi = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 3; it++) {
    const double k = x + s + r;
    const double d2 = -2.0 * (2.0 * s + r) / (k * k * k) - v * cost.deriv2(v * x);
    if (!(d2 < 0.0)) break;
    const double nx = x - slope(x) / d2;
    if (nx > 0.0 && std::isfinite(nx)) x = nx; else break;
  }
  out.argmax = x;
  out.value = objective(x);
  return out;
}

namespace {

// per-contest efforts of the (possibly real-sized) bipartite equilibrium
struct BipPoint {
  double attacker = 0.0, victim = 0.0;
};

BipPoint bipartite_point(double attackers, double victims, const GameSpec& spec) {
  const auto red = solve_multipartite_reduced({attackers, victims}, spec, 1e-13);
  if (!red.converged)
    throw std::runtime_error("bipartite equilibrium solve failed");
  return BipPoint{red.effort(0, 1), red.effort(1, 0)};
}

}  // namespace

double attacker_link_benefit_f(double attackers, double victims, double r, const CostSpec& cost) {
  if (!(attackers > victims) || !(victims >= 1.0))
    throw std::invalid_argument("attacker_link_benefit_f: need a > v >= 1");
  const GameSpec spec = identity_spec(r, cost);
  const double s_bar = bipartite_point(attackers, victims, spec).victim;
  const double keep = deviation_value_h(victims, s_bar, r, cost).value;
  const double drop = victims > 1.0 ? deviation_value_h(victims - 1.0, s_bar, r, cost).value : 0.0;
  return drop - keep;
}

BipartiteThreshold bipartite_threshold(int n, double r, const CostSpec& cost, double tol) {
  if (n < 2) throw std::invalid_argument("bipartite_threshold: need n >= 2");
  BipartiteThreshold out;
  out.upper_bound = n / 2.0 - n / (2.0 * std::sqrt(5.0));

  auto f_at = [&](double v) { return attacker_link_benefit_f(n - v, v, r, cost); };

  const double f1 = f_at(1.0);
  if (f1 >= 0.0) return out;  // even the star fails: no nonempty stable bipartite

  out.exists = true;
  double lo = 1.0, hi = std::max(out.upper_bound, 1.0 + tol);
  if (f_at(hi) < 0.0) {
    out.v_star = hi;  // no sign change below the proof's bracket: report the bound
  } else {
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (f_at(mid) < 0.0) lo = mid; else hi = mid;
    }
    out.v_star = 0.5 * (lo + hi);
  }
  int mv = static_cast<int>(std::floor(out.v_star + 1e-12));
  while (mv >= 1 && !(f_at(mv) < 0.0)) mv--;  // a vanishing benefit already breaks stability
  out.max_stable_v = std::max(mv, 0);
  if (out.max_stable_v == 0) out.exists = false;
  return out;
}

DrawSensitivity effort_derivatives_r(double attackers, double victims, const GameSpec& spec) {
  const double a = attackers, v = victims;
  if (!(a >= 1.0) || !(v >= 1.0))
    throw std::invalid_argument("effort_derivatives_r: class sizes must be at least 1");
  const BipPoint pt = bipartite_point(a, v, spec);
  if (!(pt.attacker > 0.0) || !(pt.victim > 0.0))
    throw std::domain_error("effort_derivatives_r: non-interior equilibrium rejected");

  DrawSensitivity out;
  out.attacker_effort = pt.attacker;
  out.victim_effort = pt.victim;

  const double x = pt.attacker, y = pt.victim;
  const double r = spec.params.r, T = spec.params.T;
  const double px = spec.tech.value(x), py = spec.tech.value(y);
  const double dx = spec.tech.deriv(x), dy = spec.tech.deriv(y);
  const double ddx = spec.tech.deriv2(x), ddy = spec.tech.deriv2(y);
  const double k = r + px + py;
  const double c1dd = spec.cost.deriv2(v * x);  // attacker's total is v x
  const double c2dd = spec.cost.deriv2(a * y);

  // first-order conditions scaled by k^3, differentiated in (x, y, r)
  const double P1 = T * (r + 2.0 * py) * (ddx * k - 2.0 * dx * dx) - v * c1dd * k * k * k;
  const double Q1 = T * 2.0 * dx * dy * (px - py);
  const double R1 = T * dx * (px - 3.0 * py - r);
  const double P2 = T * (r + 2.0 * px) * (ddy * k - 2.0 * dy * dy) - a * c2dd * k * k * k;
  const double Q2 = -Q1;
  const double R2 = T * dy * (py - 3.0 * px - r);
  const double Omega = P1 * P2 - Q1 * Q2;

  out.d_attacker = (Q1 * R2 - R1 * P2) / Omega;
  out.d_victim = (Q2 * R1 - R2 * P1) / Omega;
  out.d_total_spending = a * v * (out.d_attacker + out.d_victim);

  // sign of dw*/dr as r -> 0 for c(x) = (2/alpha) x^alpha, linear technology
  const double alpha = spec.cost.alpha;
  if (spec.tech.kind == TechnologySpec::Kind::linear && spec.cost.k1 == 0.0 &&
      std::fabs(spec.cost.k2 - 2.0 / alpha) <= 1e-12) {
    out.sign_test_valid = true;
    const double q = (alpha - 1.0) / alpha;
    out.sign_lhs = (std::pow(a, alpha - 1.0) - 3.0 * std::pow(v, alpha - 1.0)) +
                   std::pow(v / a, q) * (std::pow(v, alpha - 1.0) - 3.0 * std::pow(a, alpha - 1.0));
    out.sign_rhs = 2.0 / (alpha - 1.0) * (std::pow(a, q) + std::pow(v, q)) *
                   std::pow(v, (alpha - 1.0) * (alpha - 1.0) / alpha);
    out.total_spending_rises = out.sign_lhs > out.sign_rhs;
  }
  return out;
}

ShockResponse cost_shock_derivatives(int attackers, int victims, ShockedRole role,
                                     const GameSpec& spec) {
  if (spec.tech.kind != TechnologySpec::Kind::linear)
    throw std::invalid_argument("cost_shock_derivatives: derived for linear technology only");
  if (attackers < 1 || victims < 1 || attackers <= victims)
    throw std::invalid_argument("cost_shock_derivatives: need a > v >= 1");
  const double a = attackers, v = victims;
  const BipPoint pt = bipartite_point(a, v, spec);

  ShockResponse out;
  out.w_attacker = v * pt.attacker;
  out.w_victim = a * pt.victim;

  const double cA = spec.cost.deriv(out.w_attacker), cV = spec.cost.deriv(out.w_victim);
  const double gA = spec.cost.deriv2(out.w_attacker), gV = spec.cost.deriv2(out.w_victim);
  const double D = cA + cV;
  const double D3 = D * D * D;

  // per-link fixed-point terms, differentiated at eps = 0:
  //   q(b, o)      = 2 c'(b) / (c'(b) + (1+eps) c'(o))^2   owner o, opponent b
  //   shocked link = 2 (1+eps) c'(o_k) / (c'(b) + (1+eps) c'(o_k))^2
  const double qb_AV = 2.0 * gV * (D - 2.0 * cV) / D3;  // d q / d W_V seen by an attacker
  const double qo_AV = -4.0 * cV * gA / D3;             // d q / d W_A
  const double qe_AV = -4.0 * cV * cA / D3;
  const double qb_VA = 2.0 * gA * (D - 2.0 * cA) / D3;  // d q / d W_A seen by a victim
  const double qo_VA = -4.0 * cA * gV / D3;             // d q / d W_V
  const double qe_VA = -4.0 * cA * cV / D3;
  const double qk_o_A = 2.0 * gA * (D - 2.0 * cA) / D3;  // shocked attacker seen by a victim
  const double qk_e_A = 2.0 * cA * (D - 2.0 * cA) / D3;
  const double qk_o_V = 2.0 * gV * (D - 2.0 * cV) / D3;  // shocked victim seen by an attacker
  const double qk_e_V = 2.0 * cV * (D - 2.0 * cV) / D3;

  Matrix m(3, 3);
  std::vector<double> rhs(3);
  // unknowns: [shocked, same-class, other-class]
  if (role == ShockedRole::attacker) {
    m(0, 0) = 1.0 - v * qo_AV;  m(0, 1) = 0.0;                      m(0, 2) = -v * qb_AV;
    rhs[0] = v * qe_AV;
    m(1, 0) = 0.0;              m(1, 1) = 1.0 - v * qo_AV;          m(1, 2) = -v * qb_AV;
    rhs[1] = 0.0;
    m(2, 0) = -qk_o_A;          m(2, 1) = -(a - 1.0) * qb_VA;       m(2, 2) = 1.0 - a * qo_VA;
    rhs[2] = qk_e_A;
  } else {
    m(0, 0) = 1.0 - a * qo_VA;  m(0, 1) = 0.0;                      m(0, 2) = -a * qb_VA;
    rhs[0] = a * qe_VA;
    m(1, 0) = 0.0;              m(1, 1) = 1.0 - a * qo_VA;          m(1, 2) = -a * qb_VA;
    rhs[1] = 0.0;
    m(2, 0) = -qk_o_V;          m(2, 1) = -(v - 1.0) * qb_AV;       m(2, 2) = 1.0 - v * qo_AV;
    rhs[2] = qk_e_V;
  }
  std::vector<double> sol;
  if (!solve_linear(m, rhs, sol))
    throw std::runtime_error("cost_shock_derivatives: singular derivative system");
  out.d_shocked = sol[0];
  out.d_same_class = sol[1];
  out.d_other_class = sol[2];
  if (role == ShockedRole::attacker)
    out.d_total = out.d_shocked + (a - 1.0) * out.d_same_class + v * out.d_other_class;
  else
    out.d_total = out.d_shocked + (v - 1.0) * out.d_same_class + a * out.d_other_class;
  return out;
}

std::string sweep_kind_name(SweepKind k) {
  switch (k) {
    case SweepKind::r: return "r";
    case SweepKind::T: return "T";
    case SweepKind::cost_scale: return "cost_scale";
    case SweepKind::partition_v: return "partition_v";
    case SweepKind::br_curve: return "br_curve";
  }
  return "?";
}

namespace {

// best response within one contest, every other effort held at equilibrium
double pair_best_response(double opp_effort, double base_total, const GameSpec& spec) {
  if (revenue_singular(0.0, opp_effort, spec.params.r)) return 0.0;
  if (revenue_own_marginal(0.0, opp_effort, spec) <= spec.cost.deriv(base_total)) return 0.0;
  auto gap = [&](double x) {
    return revenue_own_marginal(x, opp_effort, spec) - spec.cost.deriv(base_total + x);
  };
  double hi = 1.0;
  for (int it = 0; it < 300 && gap(hi) > 0.0; it++) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 100; it++) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct PointRecord {
  std::vector<double> values;
  std::string status = "ok";
};

PointRecord solve_point(const Scenario& sc) {
  PointRecord rec;
  if (sc.has_partition) {
    std::vector<double> sizes(sc.partition_sizes.begin(), sc.partition_sizes.end());
    const auto red = solve_multipartite_reduced(sizes, sc.spec, 1e-12);
    if (!red.converged) throw std::runtime_error("reduced solve did not converge");
    const int M = red.classes;
    double wstar = 0.0;
    for (int k = 0; k < M; k++) wstar += sizes[k] * red.class_totals[k];
    rec.values.push_back(wstar);
    for (int k = 0; k < M; k++)
      for (int l = 0; l < M; l++)
        if (l != k) rec.values.push_back(red.effort(k, l));
    for (int k = 0; k < M; k++) rec.values.push_back(red.class_totals[k]);
    for (int k = 0; k < M; k++) {
      double pi = -sc.spec.cost.value(red.class_totals[k]);
      for (int l = 0; l < M; l++)
        if (l != k) pi += sizes[l] * contest_revenue(red.effort(k, l), red.effort(l, k), sc.spec);
      rec.values.push_back(pi);
    }
  } else {
    const auto eq = solve_equilibrium(sc.structure(), sc.spec);
    if (!eq.converged) throw std::runtime_error("equilibrium solve did not converge");
    double wstar = 0.0;
    for (double w : eq.totals) wstar += w;
    rec.values.push_back(wstar);
    for (double w : eq.totals) rec.values.push_back(w);
    for (double pi : all_payoffs(eq.profile, sc.spec)) rec.values.push_back(pi);
  }
  return rec;
}

std::vector<std::string> point_columns(const Scenario& sc) {
  std::vector<std::string> cols = {"wstar"};
  if (sc.has_partition) {
    const int M = static_cast<int>(sc.partition_sizes.size());
    for (int k = 0; k < M; k++)
      for (int l = 0; l < M; l++)
        if (l != k) cols.push_back("s_" + std::to_string(k) + "_" + std::to_string(l));
    for (int k = 0; k < M; k++) cols.push_back("w_" + std::to_string(k));
    for (int k = 0; k < M; k++) cols.push_back("pi_" + std::to_string(k));
  } else {
    for (int i = 0; i < sc.n; i++) cols.push_back("w_" + std::to_string(i));
    for (int i = 0; i < sc.n; i++) cols.push_back("pi_" + std::to_string(i));
  }
  return cols;
}

int thread_budget(int requested) {
  if (requested > 1) return requested;
  return 1;
}

template <typename Fn>
void run_points(int count, int threads, Fn&& fn) {
  threads = std::min(thread_budget(threads), count);
  if (threads <= 1) {
    for (int i = 0; i < count; i++) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; t++) {
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

SweepTable sweep(SweepKind kind, const std::vector<double>& grid, const Scenario& scenario,
                 int threads) {
  if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
  for (size_t k = 1; k < grid.size(); k++)
    if (!(grid[k] > grid[k - 1])) throw std::invalid_argument("sweep: grid must be strictly increasing");

  SweepTable table;
  table.kind = kind;
  table.rows.assign(grid.size(), {});
  table.row_status.assign(grid.size(), "ok");

  switch (kind) {
    case SweepKind::r:
    case SweepKind::T:
    case SweepKind::cost_scale: {
      table.param = kind == SweepKind::r ? "r" : (kind == SweepKind::T ? "T" : "cost_scale");
      table.columns = {table.param};
      for (const auto& c : point_columns(scenario)) table.columns.push_back(c);
      run_points(static_cast<int>(grid.size()), threads, [&](int idx) {
        Scenario sc = scenario;
        try {
          if (kind == SweepKind::r)
            sc.spec.params = ContestParams::make(grid[idx], sc.spec.params.T);
          else if (kind == SweepKind::T)
            sc.spec.params = ContestParams::make(sc.spec.params.r, grid[idx]);
          else
            sc.spec.cost = sc.spec.cost.scaled(grid[idx]);
          auto rec = solve_point(sc);
          table.rows[idx].push_back(grid[idx]);
          for (double v : rec.values) table.rows[idx].push_back(v);
        } catch (const std::exception& e) {
          table.rows[idx] = {grid[idx]};
          table.row_status[idx] = e.what();
        }
      });
      break;
    }
    case SweepKind::partition_v: {
      if (!scenario.has_partition || scenario.partition_sizes.size() != 2)
        throw std::invalid_argument("sweep partition_v: scenario must be complete bipartite");
      const double n = scenario.n;
      table.param = "v";
      table.columns = {"v", "pi_attacker", "pi_attacker_dev", "f", "wstar",
                       "s_attacker", "s_victim"};
      run_points(static_cast<int>(grid.size()), threads, [&](int idx) {
        const double v = grid[idx];
        try {
          if (!(v >= 1.0) || !(v < n - v))
            throw std::invalid_argument("v outside (victims < attackers) range");
          const double a = n - v;
          const auto red = solve_multipartite_reduced({a, v}, scenario.spec, 1e-12);
          if (!red.converged) throw std::runtime_error("reduced solve did not converge");
          const double x = red.effort(0, 1), y = red.effort(1, 0);
          const double pi_att = v * contest_revenue(x, y, scenario.spec) -
                                scenario.spec.cost.value(v * x);
          const double pi_dev =
              v > 1.0
                  ? deviation_value_h(v - 1.0, y, scenario.spec.params.r, scenario.spec.cost).value
                  : 0.0;
          const double wstar = a * red.class_totals[0] + v * red.class_totals[1];
          table.rows[idx] = {v, pi_att, pi_dev, pi_dev - pi_att, wstar, x, y};
        } catch (const std::exception& e) {
          table.rows[idx] = {v};
          table.row_status[idx] = e.what();
        }
      });
      break;
    }
    case SweepKind::br_curve: {
      table.param = "opponent_effort";
      table.columns = {"opponent_effort", "br_first", "br_second"};
      const auto eq = solve_scenario(scenario);
      if (!eq.converged) throw std::runtime_error("sweep br_curve: equilibrium solve failed");
      const Structure g = scenario.structure();
      if (g.edge_count() == 0) throw std::invalid_argument("sweep br_curve: no linked pair");
      const auto [i, j] = g.edges().front();
      const double base_i = eq.totals[i] - eq.profile.at(i, j);
      const double base_j = eq.totals[j] - eq.profile.at(j, i);
      run_points(static_cast<int>(grid.size()), threads, [&](int idx) {
        const double y = grid[idx];
        try {
          table.rows[idx] = {y, pair_best_response(y, base_i, scenario.spec),
                             pair_best_response(y, base_j, scenario.spec)};
        } catch (const std::exception& e) {
          table.rows[idx] = {y};
          table.row_status[idx] = e.what();
        }
      });
      break;
    }
  }
  return table;
}

}  // namespace contestnet
