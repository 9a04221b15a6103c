#include "contestnet/scenario.hpp"

#include "contestnet/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>

namespace contestnet {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ScenarioError("scenario: unknown key '" + it.key() + "' in " + where);
  }
}

double number_at(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ScenarioError("scenario: field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) throw ScenarioError("scenario: top level must be an object");
  reject_unknown_keys(j, {"n", "edges", "partition_sizes", "phi", "cost", "r", "T"}, "the scenario");

  Scenario s;
  const bool has_edges = j.contains("edges");
  const bool has_parts = j.contains("partition_sizes");
  if (has_edges && has_parts)
    throw ScenarioError("scenario: give either 'edges' or 'partition_sizes', not both");
  if (!has_edges && !has_parts)
    throw ScenarioError("scenario: one of 'edges' or 'partition_sizes' is required");

  if (has_parts) {
    s.has_partition = true;
    const auto& parts = j.at("partition_sizes");
    if (!parts.is_array() || parts.empty())
      throw ScenarioError("scenario: 'partition_sizes' must be a nonempty array");
    int total = 0;
    for (const auto& m : parts) {
      if (!m.is_number_integer() || m.get<int>() < 1)
        throw ScenarioError("scenario: partition sizes must be positive integers");
      s.partition_sizes.push_back(m.get<int>());
      total += m.get<int>();
    }
    s.n = total;
    if (j.contains("n") && j.at("n").get<int>() != total)
      throw ScenarioError("scenario: 'n' does not match the sum of partition sizes");
  } else {
    if (!j.contains("n")) throw ScenarioError("scenario: 'n' is required with an edge list");
    if (!j.at("n").is_number_integer() || j.at("n").get<int>() < 0)
      throw ScenarioError("scenario: 'n' must be a nonnegative integer");
    s.n = j.at("n").get<int>();
    const auto& edges = j.at("edges");
    if (!edges.is_array()) throw ScenarioError("scenario: 'edges' must be an array of pairs");
    for (const auto& e : edges) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
        throw ScenarioError("scenario: each edge must be a pair of player indices");
      const int a = e[0].get<int>(), b = e[1].get<int>();
      if (a < 0 || a >= s.n || b < 0 || b >= s.n)
        throw ScenarioError("scenario: edge [" + std::to_string(a) + "," + std::to_string(b) +
                            "] out of range for n=" + std::to_string(s.n));
      if (a == b) throw ScenarioError("scenario: self-loop at player " + std::to_string(a));
      s.edges.push_back({a, b});
    }
  }

  if (j.contains("phi")) {
    const auto& p = j.at("phi");
    if (!p.is_object()) throw ScenarioError("scenario: 'phi' must be an object");
    reject_unknown_keys(p, {"kind", "lambda", "beta"}, "'phi'");
    const std::string kind = p.contains("kind") ? p.at("kind").get<std::string>() : "linear";
    const double lambda = number_at(p, "lambda", 1.0);
    try {
      if (kind == "linear") {
        if (p.contains("beta") && p.at("beta").get<double>() != 1.0)
          throw ScenarioError("scenario: linear technology fixes beta = 1");
        s.spec.tech = TechnologySpec::linear(lambda);
      } else if (kind == "power") {
        if (!p.contains("beta")) throw ScenarioError("scenario: power technology needs 'beta'");
        s.spec.tech = TechnologySpec::power(lambda, p.at("beta").get<double>());
      } else {
        throw ScenarioError("scenario: phi.kind must be 'linear' or 'power'");
      }
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(std::string("scenario: ") + e.what());
    }
  }

  if (j.contains("cost")) {
    const auto& c = j.at("cost");
    if (!c.is_object()) throw ScenarioError("scenario: 'cost' must be an object");
    reject_unknown_keys(c, {"k1", "k2", "alpha"}, "'cost'");
    try {
      s.spec.cost = CostSpec::make(number_at(c, "k1", 0.0), number_at(c, "k2", 1.0),
                                   number_at(c, "alpha", 2.0));
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(std::string("scenario: ") + e.what());
    }
  }

  try {
    s.spec.params = ContestParams::make(number_at(j, "r", 0.0), number_at(j, "T", 1.0));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("scenario: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError("scenario: " + path + ": " + e.what());
  }
  return parse_scenario(j);
}

json scenario_to_json(const Scenario& s) {
  json j;
  if (s.has_partition) {
    j["partition_sizes"] = s.partition_sizes;
  } else {
    j["n"] = s.n;
    json edges = json::array();
    for (auto [a, b] : s.edges) edges.push_back({a, b});
    j["edges"] = edges;
  }
  j["phi"] = {{"kind", s.spec.tech.kind_name()}, {"lambda", s.spec.tech.scale}};
  if (s.spec.tech.kind == TechnologySpec::Kind::power) j["phi"]["beta"] = s.spec.tech.exponent;
  j["cost"] = {{"k1", s.spec.cost.k1}, {"k2", s.spec.cost.k2}, {"alpha", s.spec.cost.alpha}};
  j["r"] = s.spec.params.r;
  j["T"] = s.spec.params.T;
  return j;
}

EquilibriumResult solve_scenario(const Scenario& s, const SolveOptions& opts) {
  if (s.has_partition && s.partition_sizes.size() >= 2 &&
      (opts.method == Method::automatic || opts.method == Method::newton) &&
      !opts.randomize_init) {
    auto eq = solve_multipartite(s.partition_sizes, s.spec, opts);
    if (eq.converged) return eq;
  }
  return solve_equilibrium(s.structure(), s.spec, opts);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json equilibrium_to_json(const EquilibriumResult& eq, const Structure& g) {
  json j;
  j["n"] = g.n();
  j["method"] = method_name(eq.method);
  j["reduced"] = eq.reduced;
  j["converged"] = eq.converged;
  j["iterations"] = eq.iterations;
  j["kkt_residual"] = eq.kkt_residual;
  j["profile"] = eq.profile.raw();
  j["totals"] = eq.totals;
  j["payoffs"] = eq.payoffs;
  json interior = json::array();
  const auto& edges = g.edges();
  for (size_t k = 0; k < edges.size(); k++)
    interior.push_back({edges[k].first, edges[k].second,
                        k < eq.interior.size() ? static_cast<bool>(eq.interior[k]) : false});
  j["interior"] = interior;
  return j;
}

std::string equilibrium_to_csv(const EquilibriumResult& eq, const Structure& g) {
  std::string out = "i,j,s_ij\n";
  for (auto [i, j] : g.edges()) {
    out += std::to_string(i) + "," + std::to_string(j) + "," +
           format_double(eq.profile.at(i, j)) + "\n";
    out += std::to_string(j) + "," + std::to_string(i) + "," +
           format_double(eq.profile.at(j, i)) + "\n";
  }
  return out;
}

StrategyProfile profile_from_json(const json& j) {
  const int n = j.at("n").get<int>();
  const auto raw = j.at("profile").get<std::vector<double>>();
  if (static_cast<int>(raw.size()) != n * n)
    throw ScenarioError("profile: dense array size does not match n");
  StrategyProfile s(n);
  for (int i = 0; i < n; i++)
    for (int k = 0; k < n; k++)
      if (i != k) s.set(i, k, raw[static_cast<size_t>(i) * n + k]);
  return s;
}

json stability_report_to_json(const StabilityReport& report) {
  json j;
  j["concept"] = report.concept_name;
  j["verdict"] = verdict_name(report.verdict);
  j["search_family"] = report.search_family;
  if (!report.note.empty()) j["note"] = report.note;
  if (report.predicate_applies) {
    j["predicate"] = {{"trivially_complete", report.predicate_trivially_complete},
                      {"empty_stable", report.predicate_empty_stable}};
  }
  if (report.has_certificate) {
    const auto& c = report.certificate;
    json cert;
    cert["kind"] = c.kind == DeviationCertificate::Kind::unilateral ? "unilateral" : "bilateral";
    cert["deviators"] = c.deviators;
    json removed = json::array();
    for (auto [a, b] : c.removed_links) removed.push_back({a, b});
    cert["removed_links"] = removed;
    cert["links_added_first"] = c.links_added_first;
    cert["links_added_second"] = c.links_added_second;
    cert["row_first"] = c.row_first;
    cert["row_second"] = c.row_second;
    json reps = json::array();
    for (const auto& r : c.replies)
      reps.push_back({{"replier", r.replier}, {"against", r.against}, {"effort", r.effort}});
    cert["replies"] = reps;
    cert["payoff_before"] = c.payoff_before;
    cert["payoff_after"] = c.payoff_after;
    j["certificate"] = cert;
  }
  return j;
}

json partition_to_json(const ClassPartition& p) {
  json j;
  j["classes"] = p.classes;
  j["class_of"] = p.class_of;
  j["class_totals"] = p.class_totals;
  j["sizes"] = p.sizes;
  j["tol_rel"] = p.tol_rel;
  j["ambiguous"] = p.ambiguous;
  if (!p.note.empty()) j["note"] = p.note;
  json roles = json::array();
  for (Role r : p.roles) roles.push_back(role_name(r));
  j["roles"] = roles;
  return j;
}

}  // namespace contestnet

// ----- sweep / trajectory / farsighted output ----------------------------------

namespace contestnet {

std::string sweep_to_csv(const SweepTable& table) {
  std::string out;
  for (size_t c = 0; c < table.columns.size(); c++) {
    out += table.columns[c];
    out += c + 1 < table.columns.size() ? ',' : '\n';
  }
  for (size_t rix = 0; rix < table.rows.size(); rix++) {
    const auto& row = table.rows[rix];
    if (table.row_status[rix] != "ok") {
      out += row.empty() ? std::string("?") : format_double(row[0]);
      out += ",error:" + table.row_status[rix] + "\n";
      continue;
    }
    for (size_t c = 0; c < row.size(); c++) {
      out += format_double(row[c]);
      out += c + 1 < row.size() ? ',' : '\n';
    }
  }
  return out;
}

json sweep_to_json(const SweepTable& table) {
  json j;
  j["kind"] = sweep_kind_name(table.kind);
  j["param"] = table.param;
  j["columns"] = table.columns;
  j["rows"] = table.rows;
  j["row_status"] = table.row_status;
  return j;
}

std::string trajectory_to_jsonl(const Trajectory& traj) {
  std::string out;
  for (const auto& p : traj.periods) {
    json j;
    j["period"] = p.period;
    json edges = json::array();
    for (auto [a, b] : p.structure.edges()) edges.push_back({a, b});
    j["edges"] = edges;
    j["profile"] = p.equilibrium.profile.raw();
    j["totals"] = p.equilibrium.totals;
    j["kkt_residual"] = p.equilibrium.kkt_residual;
    json ev;
    ev["type"] = revision_type_name(p.event.type);
    if (p.event.type != RevisionEvent::Type::none) {
      ev["pair"] = {p.event.first, p.event.second};
      ev["from_sweep"] = p.event.from_sweep;
      if (p.event.type == RevisionEvent::Type::bilateral_delete) {
        ev["added_first"] = p.event.added_first;
        ev["added_second"] = p.event.added_second;
      }
    }
    j["event"] = ev;
    out += j.dump();
    out += "\n";
  }
  json tail;
  tail["status"] = traj.status == Trajectory::Status::settled ? "settled" : "budget-exhausted";
  tail["settled_period"] = traj.settled_period;
  tail["seed"] = traj.seed;
  out += tail.dump();
  out += "\n";
  return out;
}

json farsighted_to_json(const FarsightedResult& fs) {
  json j;
  j["structures_examined"] = fs.structures_examined;
  json stable = json::array();
  for (size_t k = 0; k < fs.stable.size(); k++) {
    json s;
    s["name"] = fs.stable_names[k];
    json edges = json::array();
    for (auto [a, b] : fs.stable[k].edges()) edges.push_back({a, b});
    s["edges"] = edges;
    s["n"] = fs.stable[k].n();
    stable.push_back(s);
  }
  j["stable"] = stable;
  return j;
}

}  // namespace contestnet
