#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "contestnet/model.hpp"
#include "contestnet/report_io.hpp"
#include "contestnet/scenario.hpp"
#include "contestnet/solver.hpp"

using namespace contestnet;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario parsing") {
  SUBCASE("edge-list form") {
    const auto sc = parse_scenario(json::parse(R"({
      "n": 3, "edges": [[0,1],[1,2]],
      "phi": {"kind": "linear", "lambda": 2.0},
      "cost": {"k1": 0.5, "k2": 1.0, "alpha": 2.5},
      "r": 0.1, "T": 2.0})"));
    CHECK(sc.n == 3);
    CHECK_FALSE(sc.has_partition);
    CHECK(sc.structure().edge_count() == 2);
    CHECK(sc.spec.tech.scale == 2.0);
    CHECK(sc.spec.cost.alpha == 2.5);
    CHECK(sc.spec.params.r == 0.1);
    CHECK(sc.spec.params.T == 2.0);
  }
  SUBCASE("partition shorthand") {
    const auto sc = parse_scenario(json::parse(R"({"partition_sizes": [10, 2]})"));
    CHECK(sc.n == 12);
    CHECK(sc.has_partition);
    CHECK(sc.structure().edge_count() == 20);
    CHECK(sc.spec.params.T == 1.0);  // defaults fill in the benchmark
  }
  SUBCASE("power technology") {
    const auto sc = parse_scenario(
        json::parse(R"({"partition_sizes": [3,1], "phi": {"kind": "power", "beta": 0.5}})"));
    CHECK(sc.spec.tech.kind == TechnologySpec::Kind::power);
    CHECK(sc.spec.tech.exponent == 0.5);
  }
  SUBCASE("rejections carry the offending field") {
    CHECK_THROWS_WITH_AS(parse_scenario(json::parse(R"({"n": 3})")),
                         doctest::Contains("edges"), ScenarioError);
    CHECK_THROWS_WITH_AS(
        parse_scenario(json::parse(R"({"n": 2, "edges": [], "partition_sizes": [2]})")),
        doctest::Contains("not both"), ScenarioError);
    CHECK_THROWS_WITH_AS(parse_scenario(json::parse(R"({"n": 2, "edges": [], "bogus": 1})")),
                         doctest::Contains("bogus"), ScenarioError);
    CHECK_THROWS_WITH_AS(parse_scenario(json::parse(R"({"n": 2, "edges": [[0, 2]]})")),
                         doctest::Contains("out of range"), ScenarioError);
    CHECK_THROWS_WITH_AS(parse_scenario(json::parse(R"({"n": 2, "edges": [[1, 1]]})")),
                         doctest::Contains("self-loop"), ScenarioError);
    CHECK_THROWS_WITH_AS(
        parse_scenario(json::parse(R"({"n": 2, "edges": [], "phi": {"kind": "cubic"}})")),
        doctest::Contains("phi.kind"), ScenarioError);
    CHECK_THROWS_WITH_AS(
        parse_scenario(json::parse(R"({"n": 2, "edges": [], "cost": {"alpha": 1.0}})")),
        doctest::Contains("alpha"), ScenarioError);
    CHECK_THROWS_WITH_AS(parse_scenario(json::parse(R"({"n": 2, "edges": [], "r": -0.5})")),
                         doctest::Contains("r"), ScenarioError);
  }
  SUBCASE("scenario JSON round-trips") {
    const auto sc = parse_scenario(json::parse(R"({"partition_sizes": [4, 2], "r": 0.25})"));
    const auto again = parse_scenario(scenario_to_json(sc));
    CHECK(again.n == sc.n);
    CHECK(again.partition_sizes == sc.partition_sizes);
    CHECK(again.spec.params.r == sc.spec.params.r);
  }
}

TEST_CASE("equilibrium serialization replays") {
  const auto sc = parse_scenario(json::parse(R"({"partition_sizes": [10, 2]})"));
  const auto eq = solve_scenario(sc, {});
  const Structure g = sc.structure();
  const json j = equilibrium_to_json(eq, g);

  SUBCASE("profile re-parses and reproduces totals and payoffs within 1e-9") {
    const auto profile = profile_from_json(j);
    CHECK(profile.max_abs_diff(eq.profile) == 0.0);  // shortest-round-trip doubles
    const auto totals = j.at("totals").get<std::vector<double>>();
    const auto payoffs = j.at("payoffs").get<std::vector<double>>();
    for (int i = 0; i < g.n(); i++) {
      CHECK(std::fabs(profile.total(i) - totals[i]) <= 1e-9);
      CHECK(std::fabs(payoff(i, profile, sc.spec) - payoffs[i]) <= 1e-9);
    }
  }
  SUBCASE("csv lists both directions of every edge with full precision") {
    const std::string csv = equilibrium_to_csv(eq, g);
    size_t lines = 0;
    for (char ch : csv)
      if (ch == '\n') lines++;
    CHECK(lines == 1 + 2 * static_cast<size_t>(g.edge_count()));  // header + 40 rows
    CHECK(csv.find("0.32674568976684387") != std::string::npos);
    CHECK(csv.find("0.14612511473474404") != std::string::npos);
  }
}

TEST_CASE("stability report serialization keeps the certificate replayable") {
  const GameSpec bench = GameSpec::benchmark();
  const auto eq = solve_equilibrium(Structure::complete(3), bench, {});
  const auto rep = check_strong_pairwise(eq.profile, bench);
  REQUIRE(rep.has_certificate);
  const json j = stability_report_to_json(rep);
  CHECK(j.at("verdict") == "unstable");
  CHECK(j.at("certificate").at("kind") == "bilateral");
  // rebuild the certificate from JSON and replay it
  DeviationCertificate cert;
  cert.kind = DeviationCertificate::Kind::bilateral;
  cert.deviators = j.at("certificate").at("deviators").get<std::vector<int>>();
  cert.row_first = j.at("certificate").at("row_first").get<std::vector<double>>();
  cert.row_second = j.at("certificate").at("row_second").get<std::vector<double>>();
  cert.payoff_after = j.at("certificate").at("payoff_after").get<std::vector<double>>();
  cert.payoff_before = j.at("certificate").at("payoff_before").get<std::vector<double>>();
  for (const auto& r : j.at("certificate").at("replies"))
    cert.replies.push_back({r.at("replier").get<int>(), r.at("against").get<int>(),
                            r.at("effort").get<double>()});
  CHECK(replay_certificate(cert, eq.profile, bench).ok);
}

TEST_CASE("cli runs are byte-identical for identical inputs") {
  const char* cli = std::getenv("CONTESTNET_CLI");
  if (!cli) {
    MESSAGE("CONTESTNET_CLI not set; skipping the end-to-end determinism check");
    return;
  }
  const std::string scenario = "cli_det_scenario.json";
  {
    std::ofstream out(scenario);
    out << R"({"partition_sizes": [5, 2], "r": 0.05})";
  }
  const std::string cmd1 = std::string(cli) + " solve --scenario " + scenario +
                           " --format csv --out cli_det_a.csv";
  const std::string cmd2 = std::string(cli) + " solve --scenario " + scenario +
                           " --format csv --out cli_det_b.csv";
  REQUIRE(std::system(cmd1.c_str()) == 0);
  REQUIRE(std::system(cmd2.c_str()) == 0);
  CHECK(slurp("cli_det_a.csv") == slurp("cli_det_b.csv"));

  const std::string sim1 = std::string(cli) + " simulate --scenario " + scenario +
                           " --periods 5 --seed 9 --out cli_det_a.jsonl";
  const std::string sim2 = std::string(cli) + " simulate --scenario " + scenario +
                           " --periods 5 --seed 9 --out cli_det_b.jsonl";
  REQUIRE(std::system(sim1.c_str()) == 0);
  REQUIRE(std::system(sim2.c_str()) == 0);
  CHECK(slurp("cli_det_a.jsonl") == slurp("cli_det_b.jsonl"));

  std::remove(scenario.c_str());
  std::remove("cli_det_a.csv");
  std::remove("cli_det_b.csv");
  std::remove("cli_det_a.jsonl");
  std::remove("cli_det_b.jsonl");
}

TEST_CASE("sweep tables serialize to csv and json") {
  const auto sc = parse_scenario(json::parse(R"({"partition_sizes": [4, 1]})"));
  const auto table = sweep(SweepKind::T, {1.0, 1.25, 1.5}, sc);
  const std::string csv = sweep_to_csv(table);
  CHECK(csv.rfind("T,wstar,", 0) == 0);
  const json j = sweep_to_json(table);
  CHECK(j.at("rows").size() == 3);
  CHECK(j.at("columns")[0] == "T");
}
