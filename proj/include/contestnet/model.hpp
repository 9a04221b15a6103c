#ifndef CONTESTNET_MODEL_HPP
#define CONTESTNET_MODEL_HPP

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace contestnet {

// Contest technology: maps invested effort into means of fighting.
// phi(x) = scale * x^exponent with exponent in (0,1]; the linear kind fixes
// exponent = 1. phi(0) = 0, phi strictly increasing, weakly concave.
struct TechnologySpec {
  enum class Kind { linear, power };

  Kind kind = Kind::linear;
  double scale = 1.0;     // > 0
  double exponent = 1.0;  // in (0,1]; 1 for linear

  static TechnologySpec linear(double scale = 1.0);
  static TechnologySpec power(double scale, double exponent);
  static TechnologySpec identity() { return linear(1.0); }

  double value(double x) const;
  double deriv(double x) const;   // +inf at x=0 when exponent < 1
  double deriv2(double x) const;  // <= 0
  // phi'(0); +inf when exponent < 1
  double deriv_at_zero() const;
  bool marginal_unbounded_at_zero() const { return exponent < 1.0; }

  std::string kind_name() const { return kind == Kind::linear ? "linear" : "power"; }
};

// Cost of total effort: c(x) = k1*x + k2*x^alpha, k1 >= 0, k2 > 0, alpha > 1.
// c(0) = 0, strictly increasing, strictly convex on x > 0. The benchmark
// c(x) = x^2 is (0, 1, 2); c(x) = (2/alpha) x^alpha is (0, 2/alpha, alpha).
struct CostSpec {
  double k1 = 0.0;
  double k2 = 1.0;
  double alpha = 2.0;

  static CostSpec make(double k1, double k2, double alpha);
  static CostSpec quadratic() { return make(0.0, 1.0, 2.0); }
  static CostSpec power_benchmark(double alpha) { return make(0.0, 2.0 / alpha, alpha); }
  CostSpec scaled(double m) const { return make(k1 * m, k2 * m, alpha); }

  double value(double x) const;
  double deriv(double x) const;   // c'(0) = k1
  double deriv2(double x) const;
};

// r: additive term in the contest-success denominator (chance of a draw).
// T: transfer from the defeated to the victor.
struct ContestParams {
  double r = 0.0;  // >= 0, finite
  double T = 1.0;  // > 0, finite

  static ContestParams make(double r, double T = 1.0);
};

// Bundle passed to every payoff/solver routine.
struct GameSpec {
  TechnologySpec tech;
  CostSpec cost;
  ContestParams params;

  static GameSpec benchmark(double r = 0.0) {
    return GameSpec{TechnologySpec::identity(), CostSpec::quadratic(), ContestParams::make(r)};
  }
};

// Unweighted simple graph: which contests exist.
class Structure {
 public:
  Structure() : n_(0) {}
  explicit Structure(int n);
  Structure(int n, const std::vector<std::pair<int, int>>& edges);

  static Structure empty(int n) { return Structure(n); }
  static Structure complete(int n);
  // classes laid out consecutively: class k occupies the next sizes[k] indices
  static Structure complete_multipartite(const std::vector<int>& sizes);
  static Structure bipartite(int a, int v) { return complete_multipartite({a, v}); }

  int n() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  bool has_edge(int i, int j) const;
  void add_edge(int i, int j);
  void remove_edge(int i, int j);

  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adj_[i]; }
  int degree(int i) const { return static_cast<int>(adj_[i].size()); }
  std::vector<int> non_neighbors(int i) const;

  bool operator==(const Structure& o) const { return n_ == o.n_ && edges_ == o.edges_; }

 private:
  void check_pair(int i, int j) const;
  int n_;
  std::vector<std::pair<int, int>> edges_;  // each stored with first < second, kept sorted
  std::vector<std::vector<int>> adj_;
};

// Nonnegative effort matrix with zero diagonal. s(i,j) is i's investment in
// the contest with j; the pair is linked iff s(i,j) + s(j,i) > 0.
class StrategyProfile {
 public:
  StrategyProfile() : n_(0) {}
  explicit StrategyProfile(int n);

  int n() const { return n_; }
  double at(int i, int j) const { return s_[static_cast<size_t>(i) * n_ + j]; }
  void set(int i, int j, double v);
  double total(int i) const;                 // w_i
  std::vector<double> totals() const;
  double max_abs_diff(const StrategyProfile& o) const;
  const std::vector<double>& raw() const { return s_; }

 private:
  int n_;
  std::vector<double> s_;  // row-major
};

// Expected revenue of the contest between efforts x (own) and y (opponent):
//   T * (phi(x) - phi(y)) / (phi(x) + phi(y) + r).
// At x = y = 0 with r = 0 the ratio is 0/0; that point is defined as 0
// (a draw), matching the convention that no investment means no transfer.
double contest_revenue(double x, double y, const ContestParams& params, const TechnologySpec& tech);

inline double contest_revenue(double x, double y, const GameSpec& spec) {
  return contest_revenue(x, y, spec.params, spec.tech);
}

// True where the revenue derivative does not exist: r = 0 and both efforts 0.
inline bool revenue_singular(double x, double y, double r) {
  return r == 0.0 && x == 0.0 && y == 0.0;
}

// d/dx of contest_revenue: T * (r + 2 phi(y)) phi'(x) / (r + phi(x) + phi(y))^2.
// +inf when phi'(0) = inf at x = 0. Throws std::domain_error at the singular point.
double revenue_own_marginal(double x, double y, const GameSpec& spec);
// second derivatives of the revenue in own / opposing effort, used by Newton
double revenue_own_marginal_dx(double x, double y, const GameSpec& spec);
double revenue_own_marginal_dy(double x, double y, const GameSpec& spec);

// pi_i = sum of contest revenues over the induced neighborhood minus c(w_i)
double payoff(int i, const StrategyProfile& s, const GameSpec& spec);
std::vector<double> all_payoffs(const StrategyProfile& s, const GameSpec& spec);

// Entry j: d pi_i / d s_ij evaluated at s, for every j != i (entry i is 0).
// Throws std::domain_error if some evaluated pair sits at the r = 0 singularity.
std::vector<double> payoff_gradient(int i, const StrategyProfile& s, const GameSpec& spec);

Structure induced_structure(const StrategyProfile& s);

}  // namespace contestnet

#endif
