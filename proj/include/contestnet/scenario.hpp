#ifndef CONTESTNET_SCENARIO_HPP
#define CONTESTNET_SCENARIO_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "contestnet/model.hpp"
#include "contestnet/solver.hpp"
#include "contestnet/stability.hpp"

namespace contestnet {

struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

// One self-contained problem instance. Structures come either as an explicit
// edge list or as complete M-partite class sizes; the latter unlocks the
// symmetry-reduced solver.
struct Scenario {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> partition_sizes;
  bool has_partition = false;
  GameSpec spec = GameSpec::benchmark();

  Structure structure() const {
    return has_partition ? Structure::complete_multipartite(partition_sizes)
                         : Structure(n, edges);
  }
};

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario_file(const std::string& path);
nlohmann::json scenario_to_json(const Scenario& s);

// Solve dispatch that honors the symmetry reduction for partitioned scenarios.
EquilibriumResult solve_scenario(const Scenario& s, const SolveOptions& opts = {});

// ----- result serialization ----------------------------------------------------

nlohmann::json equilibrium_to_json(const EquilibriumResult& eq, const Structure& g);
// (i, j, s_ij) triples for both directions of every edge, 17 significant digits
std::string equilibrium_to_csv(const EquilibriumResult& eq, const Structure& g);
// re-reads a serialized equilibrium
StrategyProfile profile_from_json(const nlohmann::json& j);

nlohmann::json stability_report_to_json(const StabilityReport& report);
nlohmann::json partition_to_json(const ClassPartition& p);

std::string format_double(double v);  // %.17g

}  // namespace contestnet

#endif
