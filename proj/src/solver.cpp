#include "contestnet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "contestnet/linalg.hpp"
#include "contestnet/rng.hpp"

namespace contestnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Directed view of a structure: slot 2k is (i,j), slot 2k+1 is (j,i) for the
// k-th undirected edge (i, j).
struct DirectedEdges {
  explicit DirectedEdges(const Structure& g) : n(g.n()) {
    owner.reserve(2 * g.edge_count());
    target.reserve(2 * g.edge_count());
    rows.assign(n, {});
    for (auto [i, j] : g.edges()) {
      rows[i].push_back(static_cast<int>(owner.size()));
      owner.push_back(i);
      target.push_back(j);
      rows[j].push_back(static_cast<int>(owner.size()));
      owner.push_back(j);
      target.push_back(i);
    }
  }
  int opposite(int e) const { return e ^ 1; }
  int count() const { return static_cast<int>(owner.size()); }

  int n;
  std::vector<int> owner, target;
  std::vector<std::vector<int>> rows;  // directed edges owned by each player
};

std::vector<double> player_totals(const DirectedEdges& de, const std::vector<double>& x) {
  std::vector<double> w(de.n, 0.0);
  for (int e = 0; e < de.count(); e++) w[de.owner[e]] += x[e];
  return w;
}

// KKT residual over directed efforts.
double residual_directed(const DirectedEdges& de, const std::vector<double>& x,
                         const GameSpec& spec) {
  const std::vector<double> w = player_totals(de, x);
  double worst = 0.0;
  for (int e = 0; e < de.count(); e++) {
    const double own = x[e], opp = x[de.opposite(e)];
    const double cw = spec.cost.deriv(w[de.owner[e]]);
    if (own > 0.0) {
      worst = std::max(worst, std::fabs(revenue_own_marginal(own, opp, spec) - cw));
    } else {
      if (revenue_singular(0.0, opp, spec.params.r)) return kInf;
      const double m0 = revenue_own_marginal(0.0, opp, spec);
      worst = std::max(worst, std::max(0.0, m0 - cw));
    }
    if (!std::isfinite(worst)) return kInf;
  }
  return worst;
}

// Root of marginal_revenue(x | opp) = mu for mu > 0; the marginal is strictly
// decreasing in own effort. Returns 0 when the marginal at zero already sits
// below mu.
double effort_matching_marginal(double opp, double mu, const GameSpec& spec, double hint) {
  if (revenue_singular(0.0, opp, spec.params.r)) return 0.0;  // caller keeps r=0 duels two-sided
  const double m0 = revenue_own_marginal(0.0, opp, spec);
  if (m0 <= mu) return 0.0;
  double hi = std::max(hint, 1e-3);
  for (int it = 0; it < 400 && revenue_own_marginal(hi, opp, spec) > mu; it++) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 90; it++) {
    const double mid = 0.5 * (lo + hi);
    if (revenue_own_marginal(mid, opp, spec) > mu) lo = mid; else hi = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 4; it++) {
    const double f = revenue_own_marginal(x, opp, spec) - mu;
    const double df = revenue_own_marginal_dx(x, opp, spec);
    if (!(df < 0.0)) break;
    const double nx = x - f / df;
    if (nx > lo && nx < hi) x = nx; else break;
  }
  return x;
}

struct NewtonOutcome {
  std::vector<double> x;
  double residual = kInf;
  int iterations = 0;
  bool converged = false;
};

NewtonOutcome newton_solve(const DirectedEdges& de, const GameSpec& spec,
                           std::vector<double> x, double tol, int max_iters) {
  const int m = de.count();
  NewtonOutcome best;
  best.x = x;
  best.residual = residual_directed(de, x, spec);
  if (m == 0 || best.residual <= tol) {
    best.converged = best.residual <= tol;
    return best;
  }

  std::vector<char> active(m, 1);
  for (int e = 0; e < m; e++) active[e] = x[e] > 0.0;
  int reactivations = 0;
  double rho = best.residual;

  for (int iter = 0; iter < max_iters; iter++) {
    best.iterations = iter + 1;
    std::vector<int> act;
    for (int e = 0; e < m; e++)
      if (active[e]) act.push_back(e);
    const int ma = static_cast<int>(act.size());
    if (ma == 0) break;
    std::vector<int> slot(m, -1);
    for (int a = 0; a < ma; a++) slot[act[a]] = a;

    const std::vector<double> w = player_totals(de, x);
    Matrix jac(ma, ma);
    std::vector<double> rhs(ma);
    for (int a = 0; a < ma; a++) {
      const int e = act[a];
      const int i = de.owner[e];
      const double own = x[e], opp = x[de.opposite(e)];
      const double cdd = spec.cost.deriv2(w[i]);
      rhs[a] = -(revenue_own_marginal(own, opp, spec) - spec.cost.deriv(w[i]));
      for (int f : de.rows[i]) {
        if (slot[f] >= 0) jac(a, slot[f]) -= cdd;
      }
      jac(a, a) += revenue_own_marginal_dx(own, opp, spec);
      const int o = de.opposite(e);
      if (slot[o] >= 0) jac(a, slot[o]) += revenue_own_marginal_dy(own, opp, spec);
    }

    std::vector<double> d;
    if (!solve_linear(jac, rhs, d)) {
      for (int a = 0; a < ma; a++) jac(a, a) -= 1e-8;  // nudge off the singularity
      if (!solve_linear(jac, rhs, d)) break;
    }

    // backtracking on the KKT residual, projecting negatives to zero
    double t = 1.0;
    bool accepted = false;
    std::vector<double> cand(x);
    for (int halving = 0; halving < 30; halving++) {
      for (int a = 0; a < ma; a++) cand[act[a]] = std::max(0.0, x[act[a]] + t * d[a]);
      const double rho_c = residual_directed(de, cand, spec);
      if (rho_c < rho) {
        x = cand;
        rho = rho_c;
        accepted = true;
        break;
      }
      t *= 0.5;
      cand = x;
    }
    if (!accepted) break;

    // active-set re-check
    for (int e = 0; e < m; e++) active[e] = x[e] > 0.0;
    const std::vector<double> w2 = player_totals(de, x);
    double scale = 0.0;
    for (int e = 0; e < m; e++) scale = std::max(scale, x[e]);
    for (int e = 0; e < m; e++) {
      if (active[e]) continue;
      const double opp = x[de.opposite(e)];
      if (revenue_singular(0.0, opp, spec.params.r)) continue;
      const double m0 = revenue_own_marginal(0.0, opp, spec);
      if (m0 > spec.cost.deriv(w2[de.owner[e]]) + 0.1 * tol && reactivations < 100) {
        x[e] = std::max(1e-6, 1e-3 * scale);
        active[e] = 1;
        reactivations++;
      }
    }
    rho = residual_directed(de, x, spec);

    if (rho < best.residual) {
      best.residual = rho;
      best.x = x;
    }
    if (rho <= tol) break;
  }

  best.converged = best.residual <= tol;
  return best;
}

std::vector<double> br_row_directed(const DirectedEdges& de, int i, const std::vector<double>& x,
                                    const GameSpec& spec) {
  // exact row maximizer via the multiplier mu = c'(w_i): each coordinate solves
  // marginal = mu, and mu is pinned by the total the coordinates add up to
  const auto& row = de.rows[i];
  std::vector<double> opp(row.size());
  std::vector<double> m0(row.size());
  double m0_max = 0.0;
  bool any_unbounded = false;
  for (size_t t = 0; t < row.size(); t++) {
    opp[t] = x[de.opposite(row[t])];
    if (revenue_singular(0.0, opp[t], spec.params.r)) {
      m0[t] = 0.0;  // undefended duel at r=0: leave the coordinate at zero
      continue;
    }
    m0[t] = revenue_own_marginal(0.0, opp[t], spec);
    if (std::isinf(m0[t])) any_unbounded = true; else m0_max = std::max(m0_max, m0[t]);
  }
  const double c0 = spec.cost.deriv(0.0);
  std::vector<double> out(row.size(), 0.0);
  if (!any_unbounded && m0_max <= c0) return out;  // boundary best response

  auto coords_at = [&](double mu, std::vector<double>& buf) {
    double sum = 0.0;
    for (size_t t = 0; t < row.size(); t++) {
      buf[t] = (m0[t] == 0.0) ? 0.0 : effort_matching_marginal(opp[t], mu, spec, 1.0);
      sum += buf[t];
    }
    return sum;
  };
  std::vector<double> buf(row.size(), 0.0);
  double lo = c0;
  double hi = any_unbounded ? std::max(1.0, c0 + 1.0) : m0_max;
  for (int it = 0; it < 400; it++) {
    const double total = coords_at(hi, buf);
    if (spec.cost.deriv(total) - hi < 0.0) break;
    hi *= 2.0;
  }
  for (int it = 0; it < 130; it++) {
    const double mu = 0.5 * (lo + hi);
    const double total = coords_at(mu, buf);
    if (spec.cost.deriv(total) - mu > 0.0) lo = mu; else hi = mu;
  }
  coords_at(0.5 * (lo + hi), out);
  return out;
}

std::vector<double> initial_guess(const DirectedEdges& de, const Structure& g,
                                  const GameSpec& spec, const SolveOptions& opts) {
  std::vector<double> x(de.count(), 0.25);
  if (opts.randomize_init) {
    Rng rng(opts.seed * 0x9E3779B97f4A7C15ull + 0xD1B54A32D192ED03ull);
    for (auto& v : x) v = rng.uniform(0.05, 1.0);
    return x;
  }
  if (spec.tech.kind == TechnologySpec::Kind::linear) {
    // seed from the total-spending system; exact at interior equilibria
    try {
      const auto w = total_spending_fixed_point(g, spec.tech.scale, spec.cost, spec.params.r);
      bool ok = true;
      std::vector<double> seed(de.count());
      for (int e = 0; e < de.count(); e++) {
        const double ci = spec.cost.deriv(w[de.owner[e]]);
        const double cj = spec.cost.deriv(w[de.target[e]]);
        const double s = 2.0 * cj / ((ci + cj) * (ci + cj)) - spec.params.r / (2.0 * spec.tech.scale);
        if (!(s > 0.0) || !std::isfinite(s)) { ok = false; break; }
        seed[e] = s;
      }
      if (ok && de.count() > 0) return seed;
    } catch (const std::exception&) {
      // fall through to the generic start
    }
  }
  // two best-response warm sweeps stabilize Newton on awkward specs
  for (int sweep = 0; sweep < 2; sweep++) {
    for (int i = 0; i < de.n; i++) {
      const auto row = br_row_directed(de, i, x, spec);
      for (size_t t = 0; t < row.size(); t++) x[de.rows[i][t]] = row[t];
    }
  }
  return x;
}

struct SweepOutcome {
  std::vector<double> x;
  double residual = kInf;
  int sweeps = 0;
  bool converged = false;
};

SweepOutcome best_response_solve(const DirectedEdges& de, const GameSpec& spec,
                                 std::vector<double> x, double tol, int max_sweeps,
                                 double stop_at = -1.0) {
  SweepOutcome out;
  out.x = x;
  out.residual = residual_directed(de, x, spec);
  double theta = 1.0;
  for (int sweep = 0; sweep < max_sweeps && out.residual > tol; sweep++) {
    out.sweeps = sweep + 1;
    for (int i = 0; i < de.n; i++) {
      const auto row = br_row_directed(de, i, x, spec);
      for (size_t t = 0; t < row.size(); t++) {
        const int e = de.rows[i][t];
        x[e] = (1.0 - theta) * x[e] + theta * row[t];
      }
    }
    const double rho = residual_directed(de, x, spec);
    if (rho > out.residual) theta = std::max(0.1, 0.5 * theta);
    if (rho < out.residual) {
      out.residual = rho;
      out.x = x;
    }
    if (stop_at > 0.0 && out.residual <= stop_at) break;
  }
  out.converged = out.residual <= tol;
  return out;
}

EquilibriumResult pack_result(const Structure& g, const GameSpec& spec,
                              const std::vector<double>& x, double residual, int iterations,
                              Method method, bool converged) {
  EquilibriumResult res;
  res.profile = profile_from_directed(x, g);
  res.totals = res.profile.totals();
  res.payoffs = all_payoffs(res.profile, spec);
  res.kkt_residual = residual;
  res.iterations = iterations;
  res.method = method;
  res.converged = converged;
  res.interior.reserve(g.edges().size());
  for (size_t k = 0; k < g.edges().size(); k++)
    res.interior.push_back(x[2 * k] > 0.0 && x[2 * k + 1] > 0.0);
  return res;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::automatic: return "auto";
    case Method::newton: return "newton";
    case Method::best_response: return "best_response";
    case Method::gradient_flow: return "gradient_flow";
  }
  return "?";
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "auto") return Method::automatic;
  if (name == "newton") return Method::newton;
  if (name == "best_response") return Method::best_response;
  if (name == "gradient_flow") return Method::gradient_flow;
  return std::nullopt;
}

std::vector<double> directed_efforts(const StrategyProfile& s, const Structure& g) {
  std::vector<double> x;
  x.reserve(2 * g.edge_count());
  for (auto [i, j] : g.edges()) {
    x.push_back(s.at(i, j));
    x.push_back(s.at(j, i));
  }
  return x;
}

StrategyProfile profile_from_directed(const std::vector<double>& x, const Structure& g) {
  StrategyProfile s(g.n());
  const auto& edges = g.edges();
  for (size_t k = 0; k < edges.size(); k++) {
    s.set(edges[k].first, edges[k].second, x[2 * k]);
    s.set(edges[k].second, edges[k].first, x[2 * k + 1]);
  }
  return s;
}

double kkt_residual(const StrategyProfile& s, const Structure& g, const GameSpec& spec) {
  DirectedEdges de(g);
  return residual_directed(de, directed_efforts(s, g), spec);
}

double anticipated_reply(double attack, double defender_total, const GameSpec& spec) {
  if (!(attack >= 0.0) || !(defender_total >= 0.0) || !std::isfinite(attack) ||
      !std::isfinite(defender_total))
    throw std::invalid_argument("anticipated_reply: bad inputs");
  if (attack == 0.0 && spec.params.r == 0.0) return 0.0;  // no attack, nothing to answer
  const double m0 = revenue_own_marginal(0.0, attack, spec);
  if (m0 <= spec.cost.deriv(defender_total)) return 0.0;

  auto gap = [&](double z) {
    return revenue_own_marginal(z, attack, spec) - spec.cost.deriv(defender_total + z);
  };
  double hi = std::max(attack, 0.5);
  int grow = 0;
  while (gap(hi) > 0.0) {
    hi *= 2.0;
    if (++grow > 300) throw std::runtime_error("anticipated_reply: failed to bracket the root");
  }
  double lo = 0.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0) lo = mid; else hi = mid;
  }
  double z = 0.5 * (lo + hi);
  for (int it = 0; it < 3; it++) {
    const double f = gap(z);
    const double df = revenue_own_marginal_dx(z, attack, spec) -
                      spec.cost.deriv2(defender_total + z);
    if (!(df < 0.0)) break;
    const double nz = z - f / df;
    if (nz > 0.0 && std::isfinite(nz)) z = nz; else break;
  }
  return z;
}

std::vector<double> best_response_row(int i, const StrategyProfile& s, const Structure& g,
                                      const GameSpec& spec, double) {
  if (i < 0 || i >= g.n()) throw std::invalid_argument("best_response_row: index out of range");
  DirectedEdges de(g);
  const auto x = directed_efforts(s, g);
  const auto row = br_row_directed(de, i, x, spec);
  std::vector<double> out(g.n(), 0.0);
  for (size_t t = 0; t < row.size(); t++) out[de.target[de.rows[i][t]]] = row[t];
  return out;
}

std::vector<double> total_spending_fixed_point(const Structure& g, double lambda,
                                               const CostSpec& cost, double r,
                                               const std::optional<CostShock>& shock,
                                               double tol) {
  if (!(lambda > 0.0)) throw std::invalid_argument("total_spending_fixed_point: lambda must be positive");
  const int n = g.n();
  auto shocked_deriv = [&](int i, double w) {
    const double c = cost.deriv(w);
    return (shock && shock->player == i) ? (1.0 + shock->epsilon) * c : c;
  };
  auto iterate = [&](const std::vector<double>& w, std::vector<double>& out) {
    for (int i = 0; i < n; i++) {
      double acc = 0.0;
      const double ci = shocked_deriv(i, w[i]);
      for (int j : g.neighbors(i)) {
        const double cj = shocked_deriv(j, w[j]);
        acc += 2.0 * cj / ((ci + cj) * (ci + cj));
      }
      out[i] = acc - g.degree(i) * r / (2.0 * lambda);
    }
  };

  std::vector<double> w(n, 0.0), next(n, 0.0);
  for (int i = 0; i < n; i++) w[i] = g.degree(i) > 0 ? 0.5 : 0.0;
  double theta = 1.0;
  double prev_gap = kInf;
  for (int it = 0; it < 200000; it++) {
    iterate(w, next);
    double gap = 0.0;
    for (int i = 0; i < n; i++) gap = std::max(gap, std::fabs(next[i] - w[i]));
    if (gap <= tol) {
      for (int i = 0; i < n; i++) w[i] = std::max(0.0, next[i]);
      return w;
    }
    if (gap > prev_gap) theta = std::max(1e-3, 0.5 * theta);  // damp when the plain map diverges
    prev_gap = gap;
    for (int i = 0; i < n; i++) w[i] = std::max(0.0, (1.0 - theta) * w[i] + theta * next[i]);
  }
  throw std::runtime_error("total_spending_fixed_point: no convergence");
}

BipartiteEfforts closed_form_bipartite(double attackers, double victims, double alpha) {
  if (!(attackers >= 1.0) || !(victims >= 1.0))
    throw std::invalid_argument("closed_form_bipartite: class sizes must be at least 1");
  if (!(alpha >= 2.0)) throw std::invalid_argument("closed_form_bipartite: alpha below 2 rejected");
  const double q = (alpha - 1.0) / alpha;
  const double aq = std::pow(attackers, q), vq = std::pow(victims, q);
  const double common = std::pow(aq + vq, -2.0 / alpha) * std::pow(attackers * victims, -q * q);
  return BipartiteEfforts{aq * common, vq * common};
}

ReducedEquilibrium solve_multipartite_reduced(const std::vector<double>& sizes,
                                              const GameSpec& spec, double tol) {
  const int M = static_cast<int>(sizes.size());
  for (double m : sizes)
    if (!(m >= 1.0)) throw std::invalid_argument("reduced solve: class sizes must be at least 1");
  ReducedEquilibrium out;
  out.classes = M;
  out.efforts.assign(static_cast<size_t>(M) * M, 0.0);
  out.class_totals.assign(M, 0.0);
  if (M <= 1) {
    out.converged = true;
    return out;
  }

  auto idx = [M](int k, int l) { return static_cast<size_t>(k) * M + l; };
  std::vector<double> x(static_cast<size_t>(M) * M, 0.3);
  for (int k = 0; k < M; k++) x[idx(k, k)] = 0.0;

  auto totals = [&](const std::vector<double>& v) {
    std::vector<double> w(M, 0.0);
    for (int k = 0; k < M; k++)
      for (int l = 0; l < M; l++)
        if (l != k) w[k] += sizes[l] * v[idx(k, l)];
    return w;
  };
  auto residual = [&](const std::vector<double>& v) {
    const auto w = totals(v);
    double worst = 0.0;
    for (int k = 0; k < M; k++)
      for (int l = 0; l < M; l++) {
        if (l == k) continue;
        const double own = v[idx(k, l)], opp = v[idx(l, k)];
        const double cw = spec.cost.deriv(w[k]);
        if (own > 0.0)
          worst = std::max(worst, std::fabs(revenue_own_marginal(own, opp, spec) - cw));
        else if (!revenue_singular(0.0, opp, spec.params.r))
          worst = std::max(worst, std::max(0.0, revenue_own_marginal(0.0, opp, spec) - cw));
        else
          return kInf;
        if (!std::isfinite(worst)) return kInf;
      }
    return worst;
  };

  // water-level warm sweeps on the reduced game
  for (int sweep = 0; sweep < 6; sweep++) {
    for (int k = 0; k < M; k++) {
      double lo = spec.cost.deriv(0.0);
      double hi = std::max(1.0, lo + 1.0);
      auto row_total = [&](double mu, bool store) {
        double sum = 0.0;
        for (int l = 0; l < M; l++) {
          if (l == k) continue;
          const double xl = effort_matching_marginal(x[idx(l, k)], mu, spec, 1.0);
          if (store) x[idx(k, l)] = xl;
          sum += sizes[l] * xl;
        }
        return sum;
      };
      for (int it = 0; it < 200 && spec.cost.deriv(row_total(hi, false)) - hi >= 0.0; it++) hi *= 2.0;
      for (int it = 0; it < 80; it++) {
        const double mu = 0.5 * (lo + hi);
        if (spec.cost.deriv(row_total(mu, false)) - mu > 0.0) lo = mu; else hi = mu;
      }
      row_total(0.5 * (lo + hi), true);
    }
  }

  // damped Newton on the reduced first-order system
  const int mvars = M * (M - 1);
  std::vector<std::pair<int, int>> vars;
  vars.reserve(mvars);
  for (int k = 0; k < M; k++)
    for (int l = 0; l < M; l++)
      if (l != k) vars.push_back({k, l});
  std::vector<int> slot(static_cast<size_t>(M) * M, -1);
  for (int v = 0; v < mvars; v++) slot[idx(vars[v].first, vars[v].second)] = v;

  double rho = residual(x);
  for (int iter = 0; iter < 200 && rho > tol; iter++) {
    const auto w = totals(x);
    Matrix jac(mvars, mvars);
    std::vector<double> rhs(mvars);
    for (int v = 0; v < mvars; v++) {
      auto [k, l] = vars[v];
      const double own = x[idx(k, l)], opp = x[idx(l, k)];
      rhs[v] = -(revenue_own_marginal(own, opp, spec) - spec.cost.deriv(w[k]));
      const double cdd = spec.cost.deriv2(w[k]);
      for (int l2 = 0; l2 < M; l2++)
        if (l2 != k) jac(v, slot[idx(k, l2)]) -= sizes[l2] * cdd;
      jac(v, v) += revenue_own_marginal_dx(own, opp, spec);
      jac(v, slot[idx(l, k)]) += revenue_own_marginal_dy(own, opp, spec);
    }
    std::vector<double> d;
    if (!solve_linear(jac, rhs, d)) break;
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; halving++) {
      std::vector<double> cand(x);
      for (int v = 0; v < mvars; v++)
        cand[idx(vars[v].first, vars[v].second)] = std::max(0.0, x[idx(vars[v].first, vars[v].second)] + t * d[v]);
      const double rho_c = residual(cand);
      if (rho_c < rho) {
        x = cand;
        rho = rho_c;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }

  out.efforts = x;
  out.class_totals = totals(x);
  out.residual = rho;
  out.converged = rho <= tol;
  return out;
}

EquilibriumResult solve_multipartite(const std::vector<int>& sizes, const GameSpec& spec,
                                     const SolveOptions& opts) {
  std::vector<double> real_sizes(sizes.begin(), sizes.end());
  const auto red = solve_multipartite_reduced(real_sizes, spec, opts.tol);
  const Structure g = Structure::complete_multipartite(sizes);
  std::vector<int> cls(g.n());
  int at = 0;
  for (size_t k = 0; k < sizes.size(); k++)
    for (int t = 0; t < sizes[k]; t++) cls[at++] = static_cast<int>(k);

  std::vector<double> x(2 * g.edge_count());
  const auto& edges = g.edges();
  for (size_t k = 0; k < edges.size(); k++) {
    x[2 * k] = red.effort(cls[edges[k].first], cls[edges[k].second]);
    x[2 * k + 1] = red.effort(cls[edges[k].second], cls[edges[k].first]);
  }
  DirectedEdges de(g);
  auto res = pack_result(g, spec, x, residual_directed(de, x, spec), 0, Method::newton,
                         red.converged);
  res.reduced = true;
  return res;
}

FlowResult integrate_projected_flow(const Structure& g, const GameSpec& spec,
                                    const std::vector<double>& start, double step0,
                                    long max_steps, double tol, bool record_trace) {
  DirectedEdges de(g);
  if (static_cast<int>(start.size()) != de.count())
    throw std::invalid_argument("integrate_projected_flow: start size mismatch");
  FlowResult out;
  out.efforts = start;

  auto gradient = [&](const std::vector<double>& x, std::vector<double>& grad) {
    const auto w = player_totals(de, x);
    for (int e = 0; e < de.count(); e++)
      grad[e] = revenue_own_marginal(x[e], x[de.opposite(e)], spec) -
                spec.cost.deriv(w[de.owner[e]]);
  };
  auto projected_norm = [&](const std::vector<double>& x, const std::vector<double>& grad) {
    double worst = 0.0;
    for (int e = 0; e < de.count(); e++) {
      if (x[e] == 0.0 && grad[e] < 0.0) continue;
      worst = std::max(worst, std::fabs(grad[e]));
    }
    return worst;
  };

  std::vector<double> grad(de.count()), cand(de.count()), cgrad(de.count());
  gradient(out.efforts, grad);
  double norm = projected_norm(out.efforts, grad);
  if (record_trace) out.norm_trace.push_back(norm);
  double dt = step0;
  const double dt_cap = std::max(step0, 0.5);

  for (long step = 0; step < max_steps && norm > tol; step++) {
    out.steps = step + 1;
    bool accepted = false;
    for (int halving = 0; halving < 80; halving++) {
      for (int e = 0; e < de.count(); e++) cand[e] = std::max(0.0, out.efforts[e] + dt * grad[e]);
      gradient(cand, cgrad);
      const double cnorm = projected_norm(cand, cgrad);
      if (cnorm < norm) {
        out.efforts = cand;
        grad = cgrad;
        norm = cnorm;
        accepted = true;
        break;
      }
      dt *= 0.5;
    }
    if (!accepted) break;
    if (record_trace) out.norm_trace.push_back(norm);
    dt = std::min(dt * 1.1, dt_cap);
  }
  out.grad_norm = norm;
  out.converged = norm <= tol;
  return out;
}

EquilibriumResult solve_equilibrium(const Structure& g, const GameSpec& spec,
                                    const SolveOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("solve_equilibrium: tol must be positive");
  DirectedEdges de(g);
  if (de.count() == 0) {
    return pack_result(g, spec, {}, 0.0, 0, opts.method, true);
  }
  const auto x0 = initial_guess(de, g, spec, opts);

  switch (opts.method) {
    case Method::newton: {
      const auto nres = newton_solve(de, spec, x0, opts.tol, opts.max_newton_iterations);
      return pack_result(g, spec, nres.x, nres.residual, nres.iterations, Method::newton,
                         nres.converged);
    }
    case Method::best_response: {
      const auto bres = best_response_solve(de, spec, x0, opts.tol, opts.max_br_sweeps);
      return pack_result(g, spec, bres.x, bres.residual, bres.sweeps, Method::best_response,
                         bres.converged);
    }
    case Method::gradient_flow: {
      const auto fres = integrate_projected_flow(g, spec, x0, opts.flow_step, opts.max_flow_steps,
                                                 opts.tol, false);
      return pack_result(g, spec, fres.efforts, residual_directed(de, fres.efforts, spec),
                         static_cast<int>(std::min<long>(fres.steps, INT32_MAX)),
                         Method::gradient_flow, fres.converged);
    }
    case Method::automatic: {
      auto warm = best_response_solve(de, spec, x0, opts.tol, 60, std::max(opts.tol, 1e-6));
      if (warm.converged)
        return pack_result(g, spec, warm.x, warm.residual, warm.sweeps, Method::automatic, true);
      const auto nres = newton_solve(de, spec, warm.x, opts.tol, opts.max_newton_iterations);
      if (nres.converged)
        return pack_result(g, spec, nres.x, nres.residual, warm.sweeps + nres.iterations,
                           Method::automatic, true);
      const auto bres = best_response_solve(de, spec, nres.x, opts.tol, opts.max_br_sweeps);
      if (bres.converged)
        return pack_result(g, spec, bres.x, bres.residual, warm.sweeps + nres.iterations + bres.sweeps,
                           Method::automatic, true);
      const auto fres = integrate_projected_flow(g, spec, bres.x, opts.flow_step,
                                                 opts.max_flow_steps, opts.tol, false);
      const double rho_f = residual_directed(de, fres.efforts, spec);
      if (rho_f <= bres.residual)
        return pack_result(g, spec, fres.efforts, rho_f, warm.sweeps + nres.iterations,
                           Method::automatic, fres.converged);
      return pack_result(g, spec, bres.x, bres.residual,
                         warm.sweeps + nres.iterations + bres.sweeps, Method::automatic, false);
    }
  }
  throw std::invalid_argument("solve_equilibrium: unknown method tag");
}

}  // namespace contestnet
