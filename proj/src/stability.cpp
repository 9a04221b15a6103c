#include "contestnet/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace contestnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest effort worth considering in a deviation: beyond it the extra cost
// alone outweighs everything the row could ever win.
double effort_cap(int target_count, const GameSpec& spec) {
  const double budget = spec.params.T * (target_count + 2.0);
  double hi = 1.0;
  while (spec.cost.value(hi) < budget) hi *= 2.0;
  return hi;
}

// max over x >= 0 of rev(x, fixed_opp) - c(base + x) + c(base): the concave
// kept-link coordinate problem. Returns the maximizer.
double kept_link_coordinate(double fixed_opp, double base_total, const GameSpec& spec) {
  if (revenue_singular(0.0, fixed_opp, spec.params.r)) return 0.0;
  const double m0 = revenue_own_marginal(0.0, fixed_opp, spec);
  if (m0 <= spec.cost.deriv(base_total)) return 0.0;
  auto gap = [&](double x) {
    return revenue_own_marginal(x, fixed_opp, spec) - spec.cost.deriv(base_total + x);
  };
  double hi = 1.0;
  for (int it = 0; it < 300 && gap(hi) > 0.0; it++) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 90; it++) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct NewLinkEval {
  double value = 0.0;   // rev(x, reply(x))
  double reply = 0.0;
};

NewLinkEval new_link_value(double x, double opponent_total, const GameSpec& spec) {
  NewLinkEval out;
  if (x <= 0.0) return out;  // no link formed
  out.reply = anticipated_reply(x, opponent_total, spec);
  out.value = contest_revenue(x, out.reply, spec);
  return out;
}

// 1-D maximization of rev(x, reply(x)) - [c(base + x) - c(base)] over
// {0} U (0, cap]. The leader value need not be concave, so scan then refine.
double new_link_coordinate(double opponent_total, double base_total, double cap,
                           const GameSpec& spec) {
  auto score = [&](double x) {
    if (x <= 0.0) return 0.0;
    return new_link_value(x, opponent_total, spec).value -
           (spec.cost.value(base_total + x) - spec.cost.value(base_total));
  };
  double best_x = 0.0, best_v = 0.0;
  std::vector<double> grid;
  grid.reserve(40);
  for (int k = 0; k < 28; k++) grid.push_back(cap * std::pow(10.0, -6.0 * (27 - k) / 27.0));
  for (int k = 1; k <= 6; k++) grid.push_back(cap * k / 6.0);
  std::sort(grid.begin(), grid.end());
  std::vector<double> vals(grid.size());
  for (size_t k = 0; k < grid.size(); k++) {
    vals[k] = score(grid[k]);
    if (vals[k] > best_v) { best_v = vals[k]; best_x = grid[k]; }
  }
  if (best_x > 0.0) {
    size_t at = 0;
    for (size_t k = 0; k < grid.size(); k++)
      if (grid[k] == best_x) at = k;
    double lo = at == 0 ? 0.0 : grid[at - 1];
    double hi = at + 1 < grid.size() ? grid[at + 1] : cap;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = score(x1), f2 = score(x2);
    for (int it = 0; it < 56; it++) {
      if (f1 < f2) {
        lo = x1; x1 = x2; f1 = f2;
        x2 = lo + phi * (hi - lo); f2 = score(x2);
      } else {
        hi = x2; x2 = x1; f2 = f1;
        x1 = hi - phi * (hi - lo); f1 = score(x1);
      }
    }
    const double xm = 0.5 * (lo + hi);
    const double fm = score(xm);
    if (fm > best_v) { best_v = fm; best_x = xm; }
  }
  return best_v > 0.0 ? best_x : 0.0;
}

double outcome_value(const std::vector<DeviationTargetSpec>& targets,
                     const std::vector<double>& x, const GameSpec& spec) {
  double revenue = 0.0, total = 0.0;
  for (size_t t = 0; t < targets.size(); t++) {
    total += x[t];
    if (targets[t].anticipated) {
      revenue += new_link_value(x[t], targets[t].opponent_total, spec).value;
    } else {
      revenue += contest_revenue(x[t], targets[t].opponent_effort, spec);
    }
  }
  return revenue - spec.cost.value(total);
}

}  // namespace

RowDeviationOutcome optimize_row_deviation(int owner, int n,
                                           const std::vector<DeviationTargetSpec>& targets,
                                           const GameSpec& spec,
                                           const std::vector<double>& warm_row) {
  if (owner < 0 || owner >= n) throw std::invalid_argument("row deviation: owner out of range");
  for (const auto& t : targets)
    if (t.target < 0 || t.target >= n || t.target == owner)
      throw std::invalid_argument("row deviation: bad target index");
  const size_t m = targets.size();
  const double cap = effort_cap(static_cast<int>(m), spec);

  auto ascend = [&](std::vector<double> x) {
    double total = std::accumulate(x.begin(), x.end(), 0.0);
    double value = outcome_value(targets, x, spec);
    for (int sweep = 0; sweep < 50; sweep++) {
      double improved = 0.0;
      for (size_t t = 0; t < m; t++) {
        const double base = total - x[t];
        double nx;
        if (targets[t].anticipated) {
          nx = new_link_coordinate(targets[t].opponent_total, base, cap, spec);
        } else {
          nx = kept_link_coordinate(targets[t].opponent_effort, base, spec);
        }
        x[t] = nx;
        total = base + nx;
      }
      const double nv = outcome_value(targets, x, spec);
      improved = nv - value;
      value = nv;
      if (improved < 1e-13 * std::max(1.0, std::fabs(value))) break;
    }
    return std::make_pair(value, x);
  };

  std::vector<std::vector<double>> starts;
  starts.push_back(std::vector<double>(m, 0.0));
  starts.push_back(std::vector<double>(m, 0.25));
  if (!warm_row.empty()) {
    std::vector<double> w(m, 0.0);
    for (size_t t = 0; t < m; t++) w[t] = warm_row[targets[t].target];
    starts.push_back(std::move(w));
  }

  double best_v = -kInf;
  std::vector<double> best_x;
  for (auto& s0 : starts) {
    auto [v, x] = ascend(std::move(s0));
    if (v > best_v) { best_v = v; best_x = std::move(x); }
  }

  RowDeviationOutcome out;
  out.value = best_v;
  out.row.assign(n, 0.0);
  for (size_t t = 0; t < m; t++) {
    out.row[targets[t].target] = best_x[t];
    if (targets[t].anticipated) {
      out.reply_targets.push_back(targets[t].target);
      out.replies.push_back(new_link_value(best_x[t], targets[t].opponent_total, spec).reply);
    }
  }
  return out;
}

ReplayResult replay_certificate(const DeviationCertificate& cert, const StrategyProfile& base,
                                const GameSpec& spec, double tol) {
  StrategyProfile cand = base;
  const int n = base.n();
  auto apply_row = [&](int who, const std::vector<double>& row) {
    for (int j = 0; j < n; j++)
      if (j != who) cand.set(who, j, row[j]);
  };
  apply_row(cert.deviators[0], cert.row_first);
  if (cert.deviators.size() > 1) apply_row(cert.deviators[1], cert.row_second);
  for (const auto& rep : cert.replies) cand.set(rep.replier, rep.against, rep.effort);

  ReplayResult res;
  res.max_error = 0.0;
  for (size_t d = 0; d < cert.deviators.size(); d++) {
    const double pi = payoff(cert.deviators[d], cand, spec);
    res.replayed_payoffs.push_back(pi);
    res.max_error = std::max(res.max_error, std::fabs(pi - cert.payoff_after[d]));
  }
  res.ok = res.max_error <= tol;
  return res;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::nonexistent_by_theory: return "nonexistent-by-theory";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string role_name(Role r) {
  switch (r) {
    case Role::attacker: return "attacker";
    case Role::hybrid: return "hybrid";
    case Role::victim: return "victim";
    case Role::isolated: return "isolated";
    case Role::peer: return "peer";
  }
  return "?";
}

namespace {

void fill_predicate(StabilityReport& report, const GameSpec& spec) {
  report.predicate_applies = true;
  const double d0 = spec.tech.deriv_at_zero();
  if (spec.params.r == 0.0 || std::isinf(d0)) {
    report.predicate_trivially_complete = true;
    report.predicate_empty_stable = false;
  } else {
    report.predicate_empty_stable = d0 / spec.params.r <= spec.cost.deriv(0.0);
  }
}

DeviationCertificate unilateral_certificate(int i, const StrategyProfile& base,
                                            const StrategyProfile& cand, const GameSpec& spec,
                                            std::vector<int> added,
                                            std::vector<AnticipatedReplyRecord> replies) {
  DeviationCertificate cert;
  cert.kind = DeviationCertificate::Kind::unilateral;
  cert.deviators = {i};
  cert.links_added_first = std::move(added);
  cert.row_first.assign(base.n(), 0.0);
  for (int j = 0; j < base.n(); j++)
    if (j != i) cert.row_first[j] = cand.at(i, j);
  cert.replies = std::move(replies);
  cert.payoff_before = {payoff(i, base, spec)};
  cert.payoff_after = {payoff(i, cand, spec)};
  return cert;
}

}  // namespace

StabilityReport check_nash(const StrategyProfile& s, const GameSpec& spec, double tol) {
  const int n = s.n();
  StabilityReport report;
  report.concept_name = "nash";
  report.search_family = "full row best response, all opponents";
  fill_predicate(report, spec);

  const auto totals = s.totals();

  if (spec.params.r == 0.0) {
    // At r = 0 a pair with an undefended positive effort wins outright, so a
    // stable profile can hold no such pair: the winner shrinks her effort, or
    // anyone grabs an unattended opponent with an arbitrarily small stake.
    for (int i = 0; i < n; i++) {
      for (int j = 0; j < n; j++) {
        if (j == i) continue;
        const double sij = s.at(i, j), sji = s.at(j, i);
        if (sji != 0.0) continue;
        StrategyProfile cand = s;
        if (sij > 0.0) {
          cand.set(i, j, 0.5 * sij);  // same certain win, lower cost
        } else {
          double eps = 1e-3;
          while (eps > 1e-12 &&
                 spec.cost.value(totals[i] + eps) - spec.cost.value(totals[i]) >= spec.params.T)
            eps *= 0.5;
          cand.set(i, j, eps);
        }
        const double before = payoff(i, s, spec), after = payoff(i, cand, spec);
        if (after > before + tol) {
          report.verdict = Verdict::unstable;
          report.has_certificate = true;
          report.certificate = unilateral_certificate(i, s, cand, spec, {}, {});
          report.note = sij > 0.0 ? "undefended contest: winner cuts her stake"
                                  : "unattended opponent grabbed at negligible cost";
          return report;
        }
      }
    }
  }

  for (int i = 0; i < n; i++) {
    std::vector<DeviationTargetSpec> targets;
    targets.reserve(n - 1);
    for (int j = 0; j < n; j++) {
      if (j == i) continue;
      DeviationTargetSpec t;
      t.target = j;
      t.anticipated = false;
      t.opponent_effort = s.at(j, i);
      targets.push_back(t);
    }
    std::vector<double> warm(n, 0.0);
    for (int j = 0; j < n; j++)
      if (j != i) warm[j] = s.at(i, j);
    const auto dev = optimize_row_deviation(i, n, targets, spec, warm);
    const double before = payoff(i, s, spec);
    if (dev.value > before + tol) {
      StrategyProfile cand = s;
      for (int j = 0; j < n; j++)
        if (j != i) cand.set(i, j, dev.row[j]);
      report.verdict = Verdict::unstable;
      report.has_certificate = true;
      report.certificate = unilateral_certificate(i, s, cand, spec, {}, {});
      return report;
    }
  }
  report.verdict = Verdict::stable;
  return report;
}

StabilityReport check_strong_pairwise(const StrategyProfile& s, const GameSpec& spec, double tol) {
  StabilityReport report = check_nash(s, spec, tol);
  report.concept_name = "strong_pairwise";
  report.search_family = "nash prerequisite + pair severs its link, both rows re-optimized";
  if (report.verdict == Verdict::unstable) {
    report.note = "fails the Nash prerequisite; " + report.note;
    return report;
  }

  const int n = s.n();
  const Structure g = induced_structure(s);
  for (auto [i, j] : g.edges()) {
    auto severed_targets = [&](int owner, int severed) {
      std::vector<DeviationTargetSpec> targets;
      for (int k : g.neighbors(owner)) {
        if (k == severed) continue;
        DeviationTargetSpec t;
        t.target = k;
        t.anticipated = false;
        t.opponent_effort = s.at(k, owner);
        targets.push_back(t);
      }
      return targets;
    };
    const auto dev_i = optimize_row_deviation(i, n, severed_targets(i, j), spec);
    const auto dev_j = optimize_row_deviation(j, n, severed_targets(j, i), spec);
    const double di = dev_i.value - payoff(i, s, spec);
    const double dj = dev_j.value - payoff(j, s, spec);
    if (di > tol && dj > tol) {
      DeviationCertificate cert;
      cert.kind = DeviationCertificate::Kind::bilateral;
      cert.deviators = {i, j};
      cert.removed_links = {{i, j}};
      cert.row_first = dev_i.row;
      cert.row_second = dev_j.row;
      cert.payoff_before = {payoff(i, s, spec), payoff(j, s, spec)};
      StrategyProfile cand = s;
      for (int k = 0; k < n; k++) {
        if (k != i) cand.set(i, k, dev_i.row[k]);
        if (k != j) cand.set(j, k, dev_j.row[k]);
      }
      cert.payoff_after = {payoff(i, cand, spec), payoff(j, cand, spec)};
      report.verdict = Verdict::unstable;
      report.has_certificate = true;
      report.certificate = cert;
      report.note = "linked pair gains by ending its contest";
      return report;
    }
  }
  report.verdict = Verdict::stable;
  return report;
}

namespace {

std::vector<std::vector<int>> deviation_families(const std::vector<int>& candidates,
                                                 const std::vector<double>& totals,
                                                 int max_exhaustive) {
  std::vector<std::vector<int>> out;
  const int f = static_cast<int>(candidates.size());
  if (f <= max_exhaustive) {
    out.reserve(static_cast<size_t>(1) << f);
    for (unsigned mask = 0; mask < (1u << f); mask++) {
      std::vector<int> set;
      for (int b = 0; b < f; b++)
        if (mask & (1u << b)) set.push_back(candidates[b]);
      out.push_back(std::move(set));
    }
    return out;
  }
  // weakest targets first: the profitable additions point at high spenders
  std::vector<int> order(candidates);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (totals[a] != totals[b]) return totals[a] > totals[b];
    return a < b;
  });
  out.push_back({});
  std::vector<int> chain;
  for (int c : order) {
    chain.push_back(c);
    out.push_back(chain);
  }
  return out;
}

struct BestDeviation {
  double value = -kInf;
  RowDeviationOutcome outcome;
  std::vector<int> added;
};

BestDeviation best_row_deviation(int owner, const Structure& g, const EquilibriumResult& eq,
                                 const GameSpec& spec, const std::vector<int>& kept,
                                 const std::vector<std::vector<int>>& families) {
  const int n = g.n();
  std::vector<double> warm(n, 0.0);
  for (int j = 0; j < n; j++)
    if (j != owner) warm[j] = eq.profile.at(owner, j);

  BestDeviation best;
  for (const auto& added : families) {
    std::vector<DeviationTargetSpec> targets;
    targets.reserve(kept.size() + added.size());
    for (int k : kept) {
      DeviationTargetSpec t;
      t.target = k;
      t.anticipated = false;
      t.opponent_effort = eq.profile.at(k, owner);
      targets.push_back(t);
    }
    for (int k : added) {
      DeviationTargetSpec t;
      t.target = k;
      t.anticipated = true;
      t.opponent_total = eq.totals[k];
      targets.push_back(t);
    }
    auto dev = optimize_row_deviation(owner, n, targets, spec, warm);
    if (dev.value > best.value) {
      best.value = dev.value;
      best.outcome = std::move(dev);
      best.added = added;
    }
  }
  return best;
}

std::vector<AnticipatedReplyRecord> reply_records(int deviator, const RowDeviationOutcome& out) {
  std::vector<AnticipatedReplyRecord> reps;
  for (size_t k = 0; k < out.reply_targets.size(); k++) {
    if (out.row[out.reply_targets[k]] <= 0.0) continue;  // link not actually formed
    reps.push_back({out.reply_targets[k], deviator, out.replies[k]});
  }
  return reps;
}

}  // namespace

StabilityReport check_lfps(const Structure& g, const GameSpec& spec,
                           const LfpsSearchConfig& config) {
  StabilityReport report;
  report.concept_name = "lfps";

  SolveOptions opts = config.solve;
  const auto eq = solve_equilibrium(g, spec, opts);
  if (!eq.converged) {
    report.verdict = Verdict::inconclusive;
    report.note = "inner equilibrium solve did not converge";
    return report;
  }
  const int n = g.n();
  const auto pis = all_payoffs(eq.profile, spec);
  const double tol = config.tol;

  bool exhaustive_everywhere = true;
  for (int i = 0; i < n; i++)
    if (static_cast<int>(g.non_neighbors(i).size()) > config.max_exhaustive)
      exhaustive_everywhere = false;
  report.search_family =
      exhaustive_everywhere
          ? "exhaustive subsets of each F_i (|F_i| <= " + std::to_string(config.max_exhaustive) + ")"
          : "exhaustive subsets where |F_i| <= " + std::to_string(config.max_exhaustive) +
                ", else prefix chains of weakest non-neighbors";

  // (U): unilateral deviations with anticipated replies on new links
  for (int i = 0; i < n; i++) {
    const auto families = deviation_families(g.non_neighbors(i), eq.totals, config.max_exhaustive);
    const auto best = best_row_deviation(i, g, eq, spec, g.neighbors(i), families);
    if (best.value > pis[i] + tol) {
      StrategyProfile cand = eq.profile;
      for (int j = 0; j < n; j++)
        if (j != i) cand.set(i, j, best.outcome.row[j]);
      for (const auto& rep : reply_records(i, best.outcome)) cand.set(rep.replier, rep.against, rep.effort);
      DeviationCertificate cert;
      cert.kind = DeviationCertificate::Kind::unilateral;
      cert.deviators = {i};
      cert.links_added_first = best.added;
      cert.row_first = best.outcome.row;
      cert.replies = reply_records(i, best.outcome);
      cert.payoff_before = {pis[i]};
      cert.payoff_after = {payoff(i, cand, spec)};
      report.verdict = Verdict::unstable;
      report.has_certificate = true;
      report.certificate = cert;
      report.note = "condition (U) fails";
      return report;
    }
  }

  // (B): sever one link, both players re-optimize and possibly rewire
  for (auto [i, j] : g.edges()) {
    auto kept_minus = [&](int owner, int severed) {
      std::vector<int> kept;
      for (int k : g.neighbors(owner))
        if (k != severed) kept.push_back(k);
      return kept;
    };
    const auto fam_i = deviation_families(g.non_neighbors(i), eq.totals, config.max_exhaustive);
    const auto fam_j = deviation_families(g.non_neighbors(j), eq.totals, config.max_exhaustive);
    const auto best_i = best_row_deviation(i, g, eq, spec, kept_minus(i, j), fam_i);
    const auto best_j = best_row_deviation(j, g, eq, spec, kept_minus(j, i), fam_j);
    const double di = best_i.value - pis[i];
    const double dj = best_j.value - pis[j];
    if (di >= -tol && dj >= -tol && (di > tol || dj > tol)) {
      StrategyProfile cand = eq.profile;
      for (int k = 0; k < n; k++) {
        if (k != i) cand.set(i, k, best_i.outcome.row[k]);
        if (k != j) cand.set(j, k, best_j.outcome.row[k]);
      }
      auto reps = reply_records(i, best_i.outcome);
      for (const auto& rep : reply_records(j, best_j.outcome)) reps.push_back(rep);
      for (const auto& rep : reps) cand.set(rep.replier, rep.against, rep.effort);
      DeviationCertificate cert;
      cert.kind = DeviationCertificate::Kind::bilateral;
      cert.deviators = {i, j};
      cert.removed_links = {{i, j}};
      cert.links_added_first = best_i.added;
      cert.links_added_second = best_j.added;
      cert.row_first = best_i.outcome.row;
      cert.row_second = best_j.outcome.row;
      cert.replies = reps;
      cert.payoff_before = {pis[i], pis[j]};
      cert.payoff_after = {payoff(i, cand, spec), payoff(j, cand, spec)};
      report.verdict = Verdict::unstable;
      report.has_certificate = true;
      report.certificate = cert;
      report.note = "condition (B) fails";
      return report;
    }
  }

  report.verdict = Verdict::stable;
  return report;
}

ClassPartition classify_partition(const EquilibriumResult& eq, const Structure& g,
                                  double tol_rel) {
  const int n = g.n();
  if (static_cast<int>(eq.totals.size()) != n)
    throw std::invalid_argument("classify_partition: result does not match the structure");

  ClassPartition p;
  p.tol_rel = tol_rel;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (eq.totals[a] != eq.totals[b]) return eq.totals[a] < eq.totals[b];
    return a < b;
  });

  p.class_of.assign(n, -1);
  auto band = [&](double w) { return tol_rel * std::max(1.0, std::fabs(w)); };
  double anchor = 0.0;
  int cls = -1;
  for (int idx : order) {
    const double w = eq.totals[idx];
    if (cls < 0 || w - anchor > band(anchor)) {
      cls++;
      anchor = w;
      p.class_totals.push_back(w);
      p.sizes.push_back(0);
    }
    p.class_of[idx] = cls;
    p.sizes[cls]++;
  }
  p.classes = cls + 1;

  // grouping sanity: members must sit within one band of their class anchor,
  // adjacent anchors must be separated by more than a band
  for (int i = 0; i < n; i++) {
    const double ref = p.class_totals[p.class_of[i]];
    if (std::fabs(eq.totals[i] - ref) > band(ref)) {
      p.ambiguous = true;
      p.note = "totals straddle the grouping tolerance";
    }
  }
  for (int c = 0; c + 1 < p.classes; c++) {
    if (p.class_totals[c + 1] - p.class_totals[c] <= band(p.class_totals[c])) {
      p.ambiguous = true;
      p.note = "adjacent class totals closer than the grouping tolerance";
    }
  }

  p.roles.assign(n, Role::isolated);
  for (int i = 0; i < n; i++) {
    if (g.degree(i) == 0) continue;
    bool any_weaker = false, any_stronger = false, any_same = false;
    for (int j : g.neighbors(i)) {
      if (p.class_of[j] > p.class_of[i]) any_weaker = true;
      else if (p.class_of[j] < p.class_of[i]) any_stronger = true;
      else any_same = true;
    }
    if (any_weaker && !any_stronger && !any_same) p.roles[i] = Role::attacker;
    else if (any_stronger && !any_weaker && !any_same) p.roles[i] = Role::victim;
    else if (any_weaker && any_stronger) p.roles[i] = Role::hybrid;
    else p.roles[i] = Role::peer;  // only same-strength contests
  }
  return p;
}

MpartiteVerdict validate_mpartite(const ClassPartition& p, const Structure& g) {
  MpartiteVerdict v;
  if (g.edge_count() == 0) {
    v.pass = true;
    return v;
  }
  for (auto [i, j] : g.edges())
    if (p.class_of[i] == p.class_of[j])
      v.violations.push_back("intra-class edge " + std::to_string(i) + "-" + std::to_string(j));
  for (int i = 0; i < g.n(); i++)
    for (int j = i + 1; j < g.n(); j++)
      if (p.class_of[i] != p.class_of[j] && !g.has_edge(i, j))
        v.violations.push_back("missing cross-class edge " + std::to_string(i) + "-" +
                               std::to_string(j));
  for (int c = 0; c + 1 < p.classes; c++)
    if (p.sizes[c] <= p.sizes[c + 1])
      v.violations.push_back("class sizes not strictly decreasing at class " + std::to_string(c));
  if (p.classes < 2) {
    v.violations.push_back("fewer than two strength classes in a nonempty structure");
  } else {
    for (int i = 0; i < g.n(); i++) {
      const bool should_attack = p.class_of[i] == 0;
      const bool should_be_victim = p.class_of[i] == p.classes - 1;
      if (should_attack && p.roles[i] != Role::attacker)
        v.violations.push_back("player " + std::to_string(i) + " in the strongest class is not an attacker");
      if (should_be_victim && p.roles[i] != Role::victim)
        v.violations.push_back("player " + std::to_string(i) + " in the weakest class is not a victim");
      if (!should_attack && p.roles[i] == Role::attacker)
        v.violations.push_back("attacker outside the strongest class: player " + std::to_string(i));
      if (!should_be_victim && p.roles[i] == Role::victim)
        v.violations.push_back("victim outside the weakest class: player " + std::to_string(i));
    }
  }
  v.pass = v.violations.empty();
  return v;
}

}  // namespace contestnet
