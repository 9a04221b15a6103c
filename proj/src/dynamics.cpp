#include "contestnet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "contestnet/rng.hpp"
#include "contestnet/stability.hpp"

namespace contestnet {

AdjustmentResult integrate_adjustment(const StrategyProfile& s0, const Structure& g,
                                      const GameSpec& spec, double step, long horizon,
                                      double tol, bool record_trace) {
  for (int i = 0; i < g.n(); i++)
    for (int j = 0; j < g.n(); j++)
      if (i != j && s0.at(i, j) > 0.0 && !g.has_edge(i, j))
        throw std::invalid_argument("integrate_adjustment: start profile leaves the edge mask");
  const auto flow = integrate_projected_flow(g, spec, directed_efforts(s0, g), step, horizon,
                                             tol, record_trace);
  AdjustmentResult out;
  out.profile = profile_from_directed(flow.efforts, g);
  out.grad_norm = flow.grad_norm;
  out.steps = flow.steps;
  out.converged = flow.converged;
  out.norm_trace = flow.norm_trace;
  return out;
}

std::string revision_type_name(RevisionEvent::Type t) {
  switch (t) {
    case RevisionEvent::Type::none: return "none";
    case RevisionEvent::Type::bilateral_delete: return "bilateral_delete";
    case RevisionEvent::Type::unilateral_add: return "unilateral_add";
  }
  return "?";
}

namespace {

std::vector<DeviationTargetSpec> kept_targets(const Structure& g, const EquilibriumResult& eq,
                                              int owner, int severed) {
  std::vector<DeviationTargetSpec> targets;
  for (int k : g.neighbors(owner)) {
    if (k == severed) continue;
    DeviationTargetSpec t;
    t.target = k;
    t.anticipated = false;
    t.opponent_effort = eq.profile.at(k, owner);
    targets.push_back(t);
  }
  return targets;
}

struct SideBest {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<int> added;
};

// Best payoff a player can reach after severing `severed`, allowed to redirect
// to at most one new target.
SideBest severed_side_best(const Structure& g, const EquilibriumResult& eq, const GameSpec& spec,
                           int owner, int severed) {
  SideBest best;
  std::vector<std::vector<int>> families = {{}};
  for (int k : g.non_neighbors(owner)) families.push_back({k});
  for (const auto& added : families) {
    auto targets = kept_targets(g, eq, owner, severed);
    for (int k : added) {
      DeviationTargetSpec t;
      t.target = k;
      t.anticipated = true;
      t.opponent_total = eq.totals[k];
      targets.push_back(t);
    }
    const auto dev = optimize_row_deviation(owner, g.n(), targets, spec);
    if (dev.value > best.value) {
      best.value = dev.value;
      best.added = added;
    }
  }
  return best;
}

// Bilateral deletion of the link (i,j), each side allowed one redirection.
// Fires when neither loses and one strictly gains.
RevisionEvent deletion_revision(const Structure& g, const EquilibriumResult& eq,
                                const GameSpec& spec, int i, int j, double tol) {
  RevisionEvent ev;
  if (!g.has_edge(i, j)) return ev;
  const auto best_i = severed_side_best(g, eq, spec, i, j);
  const auto best_j = severed_side_best(g, eq, spec, j, i);
  const double di = best_i.value - payoff(i, eq.profile, spec);
  const double dj = best_j.value - payoff(j, eq.profile, spec);
  if (di >= -tol && dj >= -tol && (di > tol || dj > tol)) {
    ev.type = RevisionEvent::Type::bilateral_delete;
    ev.first = i;
    ev.second = j;
    ev.added_first = best_i.added;
    ev.added_second = best_j.added;
  }
  return ev;
}

// `owner` opens a contest with `target`, re-optimizing her whole row against
// the anticipated reply.
RevisionEvent addition_revision(const Structure& g, const EquilibriumResult& eq,
                                const GameSpec& spec, int owner, int target, double tol) {
  RevisionEvent ev;
  if (owner == target || g.has_edge(owner, target)) return ev;
  auto targets = kept_targets(g, eq, owner, -1);
  DeviationTargetSpec t;
  t.target = target;
  t.anticipated = true;
  t.opponent_total = eq.totals[target];
  targets.push_back(t);
  const auto dev = optimize_row_deviation(owner, g.n(), targets, spec);
  if (dev.value > payoff(owner, eq.profile, spec) + tol && dev.row[target] > 0.0) {
    ev.type = RevisionEvent::Type::unilateral_add;
    ev.first = owner;
    ev.second = target;
  }
  return ev;
}

// One period's revision, deletions before formations: ending a contest is a
// joint agreement both sides want immediately, so a pending deletion anywhere
// pre-empts new attacks. The drawn pair gets the first say at each stage.
RevisionEvent period_revision(const Structure& g, const EquilibriumResult& eq,
                              const GameSpec& spec, int pi, int pj, double tol) {
  RevisionEvent ev = deletion_revision(g, eq, spec, pi, pj, tol);
  if (ev.type != RevisionEvent::Type::none) return ev;
  for (auto [i, j] : g.edges()) {
    if ((i == pi && j == pj) || (i == pj && j == pi)) continue;
    ev = deletion_revision(g, eq, spec, i, j, tol);
    if (ev.type != RevisionEvent::Type::none) {
      ev.from_sweep = true;
      return ev;
    }
  }
  for (int owner : {pi, pj}) {
    for (int k : g.non_neighbors(owner)) {
      ev = addition_revision(g, eq, spec, owner, k, tol);
      if (ev.type != RevisionEvent::Type::none) return ev;
    }
  }
  for (int owner = 0; owner < g.n(); owner++) {
    if (owner == pi || owner == pj) continue;
    for (int k : g.non_neighbors(owner)) {
      ev = addition_revision(g, eq, spec, owner, k, tol);
      if (ev.type != RevisionEvent::Type::none) {
        ev.from_sweep = true;
        return ev;
      }
    }
  }
  return ev;
}

Structure apply_event(const Structure& g, const RevisionEvent& ev) {
  Structure next = g;
  switch (ev.type) {
    case RevisionEvent::Type::none:
      break;
    case RevisionEvent::Type::bilateral_delete:
      next.remove_edge(ev.first, ev.second);
      for (int k : ev.added_first)
        if (!next.has_edge(ev.first, k)) next.add_edge(ev.first, k);
      for (int k : ev.added_second)
        if (!next.has_edge(ev.second, k)) next.add_edge(ev.second, k);
      break;
    case RevisionEvent::Type::unilateral_add:
      next.add_edge(ev.first, ev.second);
      break;
  }
  return next;
}

}  // namespace

Trajectory simulate_formation(const Structure& g0, const GameSpec& spec, int periods,
                              uint64_t seed, const SolveOptions& solve_opts) {
  if (periods < 1) throw std::invalid_argument("simulate_formation: periods must be at least 1");
  const int n = g0.n();
  if (n < 2) throw std::invalid_argument("simulate_formation: need at least two players");
  const double tol = 1e-7;

  Trajectory traj;
  traj.seed = seed;
  Rng rng(seed);

  Structure g = g0;
  EquilibriumResult eq = solve_equilibrium(g, spec, solve_opts);
  if (!eq.converged) throw std::runtime_error("simulate_formation: initial solve failed");
  traj.periods.push_back({0, g, eq, RevisionEvent{}});

  std::vector<std::pair<int, int>> all_pairs;
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++) all_pairs.push_back({i, j});

  for (int period = 1; period <= periods; period++) {
    const auto [pi, pj] = all_pairs[rng.next_below(all_pairs.size())];
    RevisionEvent ev = period_revision(g, eq, spec, pi, pj, tol);
    if (ev.type == RevisionEvent::Type::none) {
      traj.status = Trajectory::Status::settled;
      traj.settled_period = period;
      traj.periods.push_back({period, g, eq, ev});
      return traj;
    }
    g = apply_event(g, ev);
    eq = solve_equilibrium(g, spec, solve_opts);
    if (!eq.converged) throw std::runtime_error("simulate_formation: inner solve failed, partial trajectory");
    traj.periods.push_back({period, g, eq, ev});
  }
  traj.status = Trajectory::Status::budget_exhausted;
  return traj;
}

bool pairwise_revision_stable(const Structure& g, const GameSpec& spec,
                              const SolveOptions& solve_opts, double tol) {
  const auto eq = solve_equilibrium(g, spec, solve_opts);
  if (!eq.converged) throw std::runtime_error("pairwise_revision_stable: solve failed");
  for (auto [i, j] : g.edges())
    if (deletion_revision(g, eq, spec, i, j, tol).type != RevisionEvent::Type::none) return false;
  for (int owner = 0; owner < g.n(); owner++)
    for (int k : g.non_neighbors(owner))
      if (addition_revision(g, eq, spec, owner, k, tol).type != RevisionEvent::Type::none)
        return false;
  return true;
}

namespace {

struct PairIndex {
  std::vector<std::pair<int, int>> pairs;
  int bit(int i, int j) const {
    if (i > j) std::swap(i, j);
    for (size_t k = 0; k < pairs.size(); k++)
      if (pairs[k] == std::make_pair(i, j)) return static_cast<int>(k);
    return -1;
  }
};

Structure mask_to_structure(int n, const PairIndex& px, unsigned mask) {
  Structure g(n);
  for (size_t k = 0; k < px.pairs.size(); k++)
    if (mask & (1u << k)) g.add_edge(px.pairs[k].first, px.pairs[k].second);
  return g;
}

unsigned permute_mask(const PairIndex& px, unsigned mask, const std::vector<int>& perm) {
  unsigned out = 0;
  for (size_t k = 0; k < px.pairs.size(); k++) {
    if (!(mask & (1u << k))) continue;
    out |= 1u << px.bit(perm[px.pairs[k].first], perm[px.pairs[k].second]);
  }
  return out;
}

struct Move {
  unsigned to = 0;
  bool bilateral = false;
  int i = -1, j = -1;  // movers; unilateral moves use i only
};

}  // namespace

FarsightedResult farsighted_stable_set(int n, const GameSpec& spec) {
  if (n < 2 || n > 4)
    throw std::invalid_argument("farsighted_stable_set: population must be between 2 and 4");

  PairIndex px;
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++) px.pairs.push_back({i, j});
  const int bits = static_cast<int>(px.pairs.size());
  const unsigned count = 1u << bits;

  // equilibrium payoffs per labeled structure
  std::vector<std::vector<double>> pay(count);
  for (unsigned mask = 0; mask < count; mask++) {
    const Structure g = mask_to_structure(n, px, mask);
    const auto eq = solve_equilibrium(g, spec, {});
    if (!eq.converged) throw std::runtime_error("farsighted_stable_set: equilibrium solve failed");
    pay[mask] = all_payoffs(eq.profile, spec);
  }

  // legal moves, endpoint-independent part
  std::vector<std::vector<Move>> moves(count);
  for (unsigned mask = 0; mask < count; mask++) {
    const Structure g = mask_to_structure(n, px, mask);
    for (int i = 0; i < n; i++) {
      const auto free = g.non_neighbors(i);
      const int f = static_cast<int>(free.size());
      for (unsigned sub = 1; sub < (1u << f); sub++) {
        unsigned to = mask;
        for (int b = 0; b < f; b++)
          if (sub & (1u << b)) to |= 1u << px.bit(i, free[b]);
        moves[mask].push_back({to, false, i, -1});
      }
    }
    for (auto [i, j] : g.edges()) {
      const auto free_i = g.non_neighbors(i);
      const auto free_j = g.non_neighbors(j);
      const int fi = static_cast<int>(free_i.size());
      const int fj = static_cast<int>(free_j.size());
      const unsigned base = mask & ~(1u << px.bit(i, j));
      for (unsigned si = 0; si < (1u << fi); si++) {
        unsigned mid = base;
        for (int b = 0; b < fi; b++)
          if (si & (1u << b)) mid |= 1u << px.bit(i, free_i[b]);
        for (unsigned sj = 0; sj < (1u << fj); sj++) {
          unsigned to = mid;
          for (int b = 0; b < fj; b++)
            if (sj & (1u << b)) to |= 1u << px.bit(j, free_j[b]);
          moves[mask].push_back({to, true, i, j});
        }
      }
    }
  }

  const double eps = 1e-9;
  auto step_allowed = [&](const Move& mv, unsigned from, unsigned endpoint) {
    if (!mv.bilateral) return pay[endpoint][mv.i] > pay[from][mv.i] + eps;
    const bool ij = pay[endpoint][mv.i] > pay[from][mv.i] + eps &&
                    pay[endpoint][mv.j] >= pay[from][mv.j] - eps;
    const bool ji = pay[endpoint][mv.j] > pay[from][mv.j] + eps &&
                    pay[endpoint][mv.i] >= pay[from][mv.i] - eps;
    return ij || ji;
  };

  // g' in F(g) iff g reaches g' through steps each profitable at g'
  std::vector<bool> has_outgoing(count, false);
  for (unsigned endpoint = 0; endpoint < count; endpoint++) {
    std::vector<std::vector<unsigned>> preds(count);
    for (unsigned from = 0; from < count; from++)
      for (const auto& mv : moves[from])
        if (mv.to != from && step_allowed(mv, from, endpoint)) preds[mv.to].push_back(from);
    std::vector<bool> reaches(count, false);
    std::vector<unsigned> frontier = preds[endpoint];
    for (unsigned f : frontier) reaches[f] = true;
    while (!frontier.empty()) {
      const unsigned cur = frontier.back();
      frontier.pop_back();
      for (unsigned p : preds[cur]) {
        if (!reaches[p]) {
          reaches[p] = true;
          frontier.push_back(p);
        }
      }
    }
    for (unsigned g = 0; g < count; g++)
      if (reaches[g]) has_outgoing[g] = true;
  }

  // deduplicate the stable set by isomorphism class
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  auto canonical = [&](unsigned mask) {
    unsigned best = mask;
    for (const auto& p : perms) best = std::min(best, permute_mask(px, mask, p));
    return best;
  };

  FarsightedResult out;
  out.structures_examined = static_cast<int>(count);
  std::map<unsigned, bool> seen;
  for (unsigned mask = 0; mask < count; mask++) {
    if (has_outgoing[mask]) continue;
    const unsigned canon = canonical(mask);
    if (seen.count(canon)) continue;
    seen[canon] = true;
    const Structure g = mask_to_structure(n, px, canon);
    out.stable.push_back(g);
    if (g.edge_count() == 0) {
      out.stable_names.push_back("empty");
    } else if (g.edge_count() == bits) {
      out.stable_names.push_back("complete");
    } else {
      std::string name = "edges:";
      for (auto [i, j] : g.edges()) name += " " + std::to_string(i) + "-" + std::to_string(j);
      out.stable_names.push_back(name);
    }
  }
  return out;
}

}  // namespace contestnet
