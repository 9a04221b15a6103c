#ifndef CONTESTNET_ANALYTICS_HPP
#define CONTESTNET_ANALYTICS_HPP

#include <string>
#include <vector>

#include "contestnet/model.hpp"
#include "contestnet/scenario.hpp"
#include "contestnet/solver.hpp"

namespace contestnet {

// Value of optimally fighting `opponents` rivals who each keep playing
// `opposing_effort`, identity technology:
//   max over x >= 0 of opponents * (x - s)/(x + s + r) - c(opponents * x).
struct DeviationValue {
  double value = 0.0;
  double argmax = 0.0;
};
DeviationValue deviation_value_h(double opponents, double opposing_effort, double r,
                                 const CostSpec& cost);

// Expected benefit for an attacker in the bipartite equilibrium of dropping
// one victim link: h(v-1, s_bar, r) - h(v, s_bar, r) with s_bar the victim's
// per-contest equilibrium effort. Negative means no attacker wants out.
double attacker_link_benefit_f(double attackers, double victims, double r, const CostSpec& cost);

struct BipartiteThreshold {
  bool exists = false;        // false when even the star is not worth keeping
  double v_star = 0.0;        // continuous sign change of f
  int max_stable_v = 0;       // greatest integer v with f < 0
  double upper_bound = 0.0;   // n/2 - n/(2 sqrt 5)
};
BipartiteThreshold bipartite_threshold(int n, double r, const CostSpec& cost, double tol = 1e-9);

// Sensitivity of the bipartite equilibrium to the draw parameter, from
// implicit differentiation of the two reduced first-order conditions.
struct DrawSensitivity {
  double attacker_effort = 0.0;   // per-contest equilibrium efforts
  double victim_effort = 0.0;
  double d_attacker = 0.0;        // d s_ij / dr
  double d_victim = 0.0;          // d s_ji / dr
  double d_total_spending = 0.0;  // d w* / dr, w* = a v (s_ij + s_ji)
  // alpha-parameterized sign test for r -> 0, phi linear, c = (2/alpha) x^alpha
  bool sign_test_valid = false;
  bool total_spending_rises = false;
  double sign_lhs = 0.0, sign_rhs = 0.0;
};
DrawSensitivity effort_derivatives_r(double attackers, double victims, const GameSpec& spec);

enum class ShockedRole { attacker, victim };

struct ShockResponse {
  double w_attacker = 0.0, w_victim = 0.0;  // unshocked equilibrium totals
  double d_shocked = 0.0;      // d w_k / d eps, the player hit by the shock
  double d_same_class = 0.0;   // others in the shocked player's class
  double d_other_class = 0.0;  // members of the opposite class
  double d_total = 0.0;        // d w* / d eps
};
// Propagation of a small idiosyncratic cost shock (1 + eps) c through a
// bipartite equilibrium, linear technology. Derivatives solve the linear
// system obtained by differentiating the total-spending fixed point.
ShockResponse cost_shock_derivatives(int attackers, int victims, ShockedRole role,
                                     const GameSpec& spec);

// ----- parameter sweeps --------------------------------------------------------

enum class SweepKind { r, T, cost_scale, partition_v, br_curve };
std::string sweep_kind_name(SweepKind k);

struct SweepTable {
  SweepKind kind = SweepKind::r;
  std::string param;
  std::vector<std::string> columns;           // first column is the parameter
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_status;        // "ok" or the per-point error
};

// Re-solves the scenario across the grid and records efforts, totals, total
// spending and payoffs. partition_v walks the victim-class size at fixed n and
// records the attacker's payoff next to her value after dropping one link;
// br_curve records both best-reply curves of one linked pair, everything else
// held at equilibrium.
SweepTable sweep(SweepKind kind, const std::vector<double>& grid, const Scenario& scenario,
                 int threads = 1);

}  // namespace contestnet

#endif
