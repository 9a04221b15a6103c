#include "contestnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace contestnet {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

TechnologySpec TechnologySpec::linear(double scale) {
  require(std::isfinite(scale) && scale > 0.0, "technology: scale must be positive and finite");
  TechnologySpec t;
  t.kind = Kind::linear;
  t.scale = scale;
  t.exponent = 1.0;
  return t;
}

TechnologySpec TechnologySpec::power(double scale, double exponent) {
  require(std::isfinite(scale) && scale > 0.0, "technology: scale must be positive and finite");
  require(std::isfinite(exponent) && exponent > 0.0 && exponent <= 1.0,
          "technology: exponent must lie in (0, 1]");
  TechnologySpec t;
  t.kind = Kind::power;
  t.scale = scale;
  t.exponent = exponent;
  return t;
}

double TechnologySpec::value(double x) const {
  if (exponent == 1.0) return scale * x;
  return scale * std::pow(x, exponent);
}

double TechnologySpec::deriv(double x) const {
  if (exponent == 1.0) return scale;
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  return scale * exponent * std::pow(x, exponent - 1.0);
}

double TechnologySpec::deriv2(double x) const {
  if (exponent == 1.0) return 0.0;
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  return scale * exponent * (exponent - 1.0) * std::pow(x, exponent - 2.0);
}

double TechnologySpec::deriv_at_zero() const {
  return exponent == 1.0 ? scale : std::numeric_limits<double>::infinity();
}

CostSpec CostSpec::make(double k1, double k2, double alpha) {
  require(std::isfinite(k1) && k1 >= 0.0, "cost: k1 must be nonnegative and finite");
  require(std::isfinite(k2) && k2 > 0.0, "cost: k2 must be positive and finite");
  require(std::isfinite(alpha) && alpha > 1.0, "cost: alpha must exceed 1");
  return CostSpec{k1, k2, alpha};
}

double CostSpec::value(double x) const { return k1 * x + k2 * std::pow(x, alpha); }

double CostSpec::deriv(double x) const {
  if (x == 0.0) return k1;
  return k1 + k2 * alpha * std::pow(x, alpha - 1.0);
}

double CostSpec::deriv2(double x) const {
  if (alpha == 2.0) return 2.0 * k2;
  if (x == 0.0) {
    return alpha < 2.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return k2 * alpha * (alpha - 1.0) * std::pow(x, alpha - 2.0);
}

ContestParams ContestParams::make(double r, double T) {
  require(std::isfinite(r) && r >= 0.0, "params: r must be nonnegative and finite");
  require(std::isfinite(T) && T > 0.0, "params: T must be positive and finite");
  return ContestParams{r, T};
}

Structure::Structure(int n) : n_(n), adj_(static_cast<size_t>(std::max(n, 0))) {
  require(n >= 0, "structure: negative player count");
}

Structure::Structure(int n, const std::vector<std::pair<int, int>>& edges) : Structure(n) {
  for (auto [i, j] : edges) add_edge(i, j);
}

Structure Structure::complete(int n) {
  Structure g(n);
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++) g.add_edge(i, j);
  return g;
}

Structure Structure::complete_multipartite(const std::vector<int>& sizes) {
  int n = 0;
  for (int m : sizes) {
    require(m >= 1, "structure: partition sizes must be positive");
    n += m;
  }
  Structure g(n);
  std::vector<int> cls(n);
  int at = 0;
  for (size_t k = 0; k < sizes.size(); k++)
    for (int t = 0; t < sizes[k]; t++) cls[at++] = static_cast<int>(k);
  for (int i = 0; i < n; i++)
    for (int j = i + 1; j < n; j++)
      if (cls[i] != cls[j]) g.add_edge(i, j);
  return g;
}

void Structure::check_pair(int i, int j) const {
  require(i >= 0 && i < n_ && j >= 0 && j < n_, "structure: player index out of range");
  require(i != j, "structure: self-loops not allowed");
}

bool Structure::has_edge(int i, int j) const {
  check_pair(i, j);
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(i, j));
  return it != edges_.end() && *it == std::make_pair(i, j);
}

void Structure::add_edge(int i, int j) {
  check_pair(i, j);
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(i, j));
  require(it == edges_.end() || *it != std::make_pair(i, j), "structure: duplicate edge");
  edges_.insert(it, {i, j});
  adj_[i].insert(std::lower_bound(adj_[i].begin(), adj_[i].end(), j), j);
  adj_[j].insert(std::lower_bound(adj_[j].begin(), adj_[j].end(), i), i);
}

void Structure::remove_edge(int i, int j) {
  check_pair(i, j);
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::make_pair(i, j));
  require(it != edges_.end() && *it == std::make_pair(i, j), "structure: removing a missing edge");
  edges_.erase(it);
  adj_[i].erase(std::lower_bound(adj_[i].begin(), adj_[i].end(), j));
  adj_[j].erase(std::lower_bound(adj_[j].begin(), adj_[j].end(), i));
}

std::vector<int> Structure::non_neighbors(int i) const {
  std::vector<int> out;
  for (int j = 0; j < n_; j++) {
    if (j == i) continue;
    if (!std::binary_search(adj_[i].begin(), adj_[i].end(), j)) out.push_back(j);
  }
  return out;
}

StrategyProfile::StrategyProfile(int n) : n_(n), s_(static_cast<size_t>(n) * n, 0.0) {
  require(n >= 0, "profile: negative player count");
}

void StrategyProfile::set(int i, int j, double v) {
  require(i >= 0 && i < n_ && j >= 0 && j < n_, "profile: index out of range");
  require(i != j, "profile: diagonal must stay zero");
  require(finite_nonneg(v), "profile: efforts must be finite and nonnegative");
  s_[static_cast<size_t>(i) * n_ + j] = v;
}

double StrategyProfile::total(int i) const {
  double w = 0.0;
  for (int j = 0; j < n_; j++) w += at(i, j);
  return w;
}

std::vector<double> StrategyProfile::totals() const {
  std::vector<double> w(n_);
  for (int i = 0; i < n_; i++) w[i] = total(i);
  return w;
}

double StrategyProfile::max_abs_diff(const StrategyProfile& o) const {
  require(n_ == o.n_, "profile: size mismatch");
  double m = 0.0;
  for (size_t k = 0; k < s_.size(); k++) m = std::max(m, std::fabs(s_[k] - o.s_[k]));
  return m;
}

double contest_revenue(double x, double y, const ContestParams& params, const TechnologySpec& tech) {
  require(finite_nonneg(x) && finite_nonneg(y), "revenue: efforts must be finite and nonnegative");
  if (revenue_singular(x, y, params.r)) return 0.0;
  const double px = tech.value(x), py = tech.value(y);
  return params.T * (px - py) / (px + py + params.r);
}

double revenue_own_marginal(double x, double y, const GameSpec& spec) {
  const double r = spec.params.r;
  if (revenue_singular(x, y, r))
    throw std::domain_error("revenue marginal undefined at s_ij = s_ji = 0 with r = 0");
  const double px = spec.tech.value(x), py = spec.tech.value(y);
  const double k = r + px + py;
  return spec.params.T * (r + 2.0 * py) * spec.tech.deriv(x) / (k * k);
}

double revenue_own_marginal_dx(double x, double y, const GameSpec& spec) {
  const double r = spec.params.r;
  const double px = spec.tech.value(x), py = spec.tech.value(y);
  const double k = r + px + py;
  const double d1 = spec.tech.deriv(x);
  return spec.params.T * (r + 2.0 * py) * (spec.tech.deriv2(x) * k - 2.0 * d1 * d1) / (k * k * k);
}

double revenue_own_marginal_dy(double x, double y, const GameSpec& spec) {
  const double r = spec.params.r;
  const double px = spec.tech.value(x), py = spec.tech.value(y);
  const double k = r + px + py;
  return spec.params.T * 2.0 * spec.tech.deriv(x) * spec.tech.deriv(y) * (px - py) / (k * k * k);
}

double payoff(int i, const StrategyProfile& s, const GameSpec& spec) {
  const int n = s.n();
  require(i >= 0 && i < n, "payoff: player index out of range");
  double revenue = 0.0;
  for (int j = 0; j < n; j++) {
    if (j == i) continue;
    const double sij = s.at(i, j), sji = s.at(j, i);
    if (sij + sji <= 0.0) continue;  // not linked
    revenue += contest_revenue(sij, sji, spec.params, spec.tech);
  }
  return revenue - spec.cost.value(s.total(i));
}

std::vector<double> all_payoffs(const StrategyProfile& s, const GameSpec& spec) {
  std::vector<double> out(s.n());
  for (int i = 0; i < s.n(); i++) out[i] = payoff(i, s, spec);
  return out;
}

std::vector<double> payoff_gradient(int i, const StrategyProfile& s, const GameSpec& spec) {
  const int n = s.n();
  require(i >= 0 && i < n, "gradient: player index out of range");
  const double cw = spec.cost.deriv(s.total(i));
  std::vector<double> g(n, 0.0);
  for (int j = 0; j < n; j++) {
    if (j == i) continue;
    g[j] = revenue_own_marginal(s.at(i, j), s.at(j, i), spec) - cw;
  }
  return g;
}

Structure induced_structure(const StrategyProfile& s) {
  Structure g(s.n());
  for (int i = 0; i < s.n(); i++)
    for (int j = i + 1; j < s.n(); j++)
      if (s.at(i, j) + s.at(j, i) > 0.0) g.add_edge(i, j);
  return g;
}

}  // namespace contestnet
