#ifndef CONTESTNET_DYNAMICS_HPP
#define CONTESTNET_DYNAMICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "contestnet/model.hpp"
#include "contestnet/solver.hpp"

namespace contestnet {

// ----- action adjustment ------------------------------------------------------

struct AdjustmentResult {
  StrategyProfile profile;
  double grad_norm = 0.0;
  long steps = 0;
  bool converged = true;
  std::vector<double> norm_trace;  // projected gradient norm per accepted step
};

// Integrates the gradient flow s-dot = J(s) on the non-negative orthant by
// explicit Euler with step halving whenever ||J|| would rise. Stops once the
// projected gradient norm falls below tol or the horizon is exhausted.
AdjustmentResult integrate_adjustment(const StrategyProfile& s0, const Structure& g,
                                      const GameSpec& spec, double step = 0.02,
                                      long horizon = 4000000, double tol = 1e-9,
                                      bool record_trace = false);

// ----- sequential network formation -------------------------------------------

struct RevisionEvent {
  enum class Type { none, bilateral_delete, unilateral_add };
  Type type = Type::none;
  int first = -1, second = -1;     // the revising pair
  std::vector<int> added_first;    // links added by `first` together with a deletion
  std::vector<int> added_second;
  bool from_sweep = false;         // found by the deterministic settling sweep
};
std::string revision_type_name(RevisionEvent::Type t);

struct TrajectoryPeriod {
  int period = 0;                  // 0 is the initial state
  Structure structure;
  EquilibriumResult equilibrium;
  RevisionEvent event;
};

struct Trajectory {
  enum class Status { settled, budget_exhausted };
  std::vector<TrajectoryPeriod> periods;
  Status status = Status::budget_exhausted;
  int settled_period = -1;
  uint64_t seed = 0;
};

// One period: a uniformly drawn pair leads the revision round, then the
// equilibrium is re-solved on the new structure. Deletions trump formations
// inside a period (ending a contest is an agreement both sides want at once);
// the drawn pair gets the first say at each stage and a deterministic sweep
// covers the rest. A period in which nothing fires means the process settled.
Trajectory simulate_formation(const Structure& g0, const GameSpec& spec, int periods,
                              uint64_t seed, const SolveOptions& solve_opts = {});

// One silent sweep of the formation process's revision menu: the fixed-point
// test a settled trajectory's terminal structure must pass.
bool pairwise_revision_stable(const Structure& g, const GameSpec& spec,
                              const SolveOptions& solve_opts = {}, double tol = 1e-7);

// ----- farsighted stability for tiny populations --------------------------------

struct FarsightedResult {
  std::vector<Structure> stable;               // canonical representatives
  std::vector<std::string> stable_names;
  int structures_examined = 0;                 // labeled graphs
};

// Enumerates every labeled structure on n <= 4 players, builds the
// farsightedly-improving-path relation (movers judge a step by the payoff at
// the path's endpoint) and returns the structures with no outgoing path,
// deduplicated by isomorphism.
FarsightedResult farsighted_stable_set(int n, const GameSpec& spec);

}  // namespace contestnet

#endif
