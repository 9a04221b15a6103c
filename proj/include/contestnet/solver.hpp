#ifndef CONTESTNET_SOLVER_HPP
#define CONTESTNET_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "contestnet/model.hpp"

namespace contestnet {

enum class Method { automatic, newton, best_response, gradient_flow };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct SolveOptions {
  Method method = Method::automatic;
  double tol = 1e-10;            // bound on the KKT residual
  int max_br_sweeps = 10000;
  int max_newton_iterations = 1000;
  long max_flow_steps = 4000000;
  double flow_step = 0.02;
  uint64_t seed = 0;
  bool randomize_init = false;   // draw the starting profile from the seed
};

struct EquilibriumResult {
  StrategyProfile profile;
  std::vector<double> totals;
  std::vector<double> payoffs;
  double kkt_residual = 0.0;
  int iterations = 0;
  Method method = Method::automatic;
  bool converged = true;
  bool reduced = false;              // solved in per-class variables and expanded
  std::vector<bool> interior;        // per structure edge: both directed efforts > 0
};

// KKT residual of a profile on a structure: on edges, active efforts must meet
// the first-order condition and zero efforts must not be profitable to raise;
// off edges efforts are zero by construction.
double kkt_residual(const StrategyProfile& s, const Structure& g, const GameSpec& spec);

// Unique pure-strategy Nash equilibrium of the contest game restricted to g.
// Non-convergence is reported through `converged` and the best residual found.
EquilibriumResult solve_equilibrium(const Structure& g, const GameSpec& spec,
                                    const SolveOptions& opts = {});

// Symmetry-reduced solve for a complete M-partite structure given as class
// sizes (classes laid out consecutively). Solves in M(M-1) per-class-pair
// variables and expands; players in one class share one strategy.
EquilibriumResult solve_multipartite(const std::vector<int>& sizes, const GameSpec& spec,
                                     const SolveOptions& opts = {});

// Per-class-pair efforts of the complete M-partite game with real-valued class
// sizes (used by the continuous relaxation in the bipartite threshold).
// Entry (k,l) of the returned M x M row-major matrix is the effort a member of
// class k spends against one member of class l; diagonal is zero.
struct ReducedEquilibrium {
  std::vector<double> efforts;  // M*M row-major
  std::vector<double> class_totals;
  double residual = 0.0;
  bool converged = false;
  int classes = 0;
  double effort(int k, int l) const { return efforts[static_cast<size_t>(k) * classes + l]; }
};
ReducedEquilibrium solve_multipartite_reduced(const std::vector<double>& sizes,
                                              const GameSpec& spec, double tol = 1e-12);

// Closed-form equilibrium of the complete bipartite game for phi(x) = x,
// c(x) = (2/alpha) x^alpha, r = 0. Rejects alpha < 2.
struct BipartiteEfforts {
  double attacker;  // per-contest effort of a member of the larger class
  double victim;
};
BipartiteEfforts closed_form_bipartite(double attackers, double victims, double alpha);

// Best response of a player who currently spends defender_total in her other
// contests to an attack of size `attack`: the root of
//   marginal_revenue(reply | attack) = c'(defender_total + reply),
// or zero when even the first unit does not pay.
double anticipated_reply(double attack, double defender_total, const GameSpec& spec);

// Exact maximizer of player i's payoff over her own row, holding opponents
// fixed and restricting investment to the edges of g. Returns efforts for all
// n columns (zeros off the mask).
std::vector<double> best_response_row(int i, const StrategyProfile& s, const Structure& g,
                                      const GameSpec& spec, double tol = 1e-12);

// Equilibrium total spending per player for linear technology phi(x) = lambda x,
// from the fixed-point system the first-order conditions imply. An optional
// multiplicative cost shock (1 + epsilon) can be applied to one player.
struct CostShock {
  int player = -1;
  double epsilon = 0.0;
};
std::vector<double> total_spending_fixed_point(const Structure& g, double lambda,
                                               const CostSpec& cost, double r,
                                               const std::optional<CostShock>& shock = std::nullopt,
                                               double tol = 1e-13);

// Projected gradient ascent core shared by the gradient_flow method and the
// action-adjustment integrator. Directed edge order: for the structure's k-th
// undirected edge (i,j), slots 2k and 2k+1 hold s_ij and s_ji.
struct FlowResult {
  std::vector<double> efforts;      // directed edge order
  double grad_norm = 0.0;           // projected sup-norm at the endpoint
  long steps = 0;
  bool converged = false;
  std::vector<double> norm_trace;   // per accepted step, when recorded
};
FlowResult integrate_projected_flow(const Structure& g, const GameSpec& spec,
                                    const std::vector<double>& start, double step0,
                                    long max_steps, double tol, bool record_trace);

std::vector<double> directed_efforts(const StrategyProfile& s, const Structure& g);
StrategyProfile profile_from_directed(const std::vector<double>& x, const Structure& g);

}  // namespace contestnet

#endif
