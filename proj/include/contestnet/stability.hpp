#ifndef CONTESTNET_STABILITY_HPP
#define CONTESTNET_STABILITY_HPP

#include <string>
#include <vector>

#include "contestnet/model.hpp"
#include "contestnet/solver.hpp"

namespace contestnet {

// ----- deviation machinery ---------------------------------------------------
//
// A row deviation fixes everyone else and lets one player repick her whole
// row. Kept opponents stay at their current efforts; newly attacked targets
// answer with anticipated_reply given their pre-deviation totals.

struct DeviationTargetSpec {
  int target = -1;
  bool anticipated = false;   // new link: opponent replies to the chosen effort
  double opponent_effort = 0.0;  // kept link: opponent's fixed effort
  double opponent_total = 0.0;   // anticipated link: opponent's pre-deviation total
};

struct RowDeviationOutcome {
  double value = 0.0;                 // deviator's payoff at the optimum
  std::vector<double> row;            // full row over n columns
  std::vector<double> replies;        // per anticipated target, aligned with targets
  std::vector<int> reply_targets;
};

RowDeviationOutcome optimize_row_deviation(int owner, int n,
                                           const std::vector<DeviationTargetSpec>& targets,
                                           const GameSpec& spec,
                                           const std::vector<double>& warm_row = {});

// ----- certificates and reports ----------------------------------------------

struct AnticipatedReplyRecord {
  int replier = -1;   // newly attacked player
  int against = -1;   // the deviator she answers
  double effort = 0.0;
};

struct DeviationCertificate {
  enum class Kind { unilateral, bilateral };
  Kind kind = Kind::unilateral;
  std::vector<int> deviators;                    // one or two players
  std::vector<std::pair<int, int>> removed_links;
  std::vector<int> links_added_first;            // L_i of the first deviator
  std::vector<int> links_added_second;           // L_j of the second deviator
  std::vector<double> row_first, row_second;     // deviating rows, n columns each
  std::vector<AnticipatedReplyRecord> replies;   // anticipated replies actually used
  std::vector<double> payoff_before, payoff_after;  // aligned with deviators
};

// Rebuilds the post-deviation profile a certificate describes and recomputes
// the deviators' payoffs; certificates must replay within 1e-9.
struct ReplayResult {
  bool ok = false;
  double max_error = 0.0;
  std::vector<double> replayed_payoffs;
};
ReplayResult replay_certificate(const DeviationCertificate& cert, const StrategyProfile& base,
                                const GameSpec& spec, double tol = 1e-9);

enum class Verdict { stable, unstable, nonexistent_by_theory, inconclusive };
std::string verdict_name(Verdict v);

struct StabilityReport {
  std::string concept_name;                  // "nash", "strong_pairwise", "lfps"
  Verdict verdict = Verdict::inconclusive;
  bool has_certificate = false;
  DeviationCertificate certificate;
  std::string search_family;            // soundness scope of a "stable" verdict
  std::string note;
  // analytic predicate fields (nash / strong pairwise)
  bool predicate_applies = false;
  bool predicate_trivially_complete = false;  // phi'(0)/r unbounded
  bool predicate_empty_stable = false;        // phi'(0)/r <= c'(0)
};

// ----- checks -----------------------------------------------------------------

// Nash stability of the network the profile induces: no player can gain by
// re-optimizing her row with every other player as a potential target. Also
// evaluates the analytic characterization: empty iff phi'(0)/r <= c'(0),
// otherwise only the complete network with symmetric efforts.
StabilityReport check_nash(const StrategyProfile& s, const GameSpec& spec, double tol = 1e-7);

// Nash stability plus immunity to joint pair deviations in which a linked pair
// severs its link and both re-optimize.
StabilityReport check_strong_pairwise(const StrategyProfile& s, const GameSpec& spec,
                                      double tol = 1e-7);

struct LfpsSearchConfig {
  int max_exhaustive = 12;   // exhaustive subsets of F_i up to this size
  double tol = 1e-7;
  SolveOptions solve;
};

// Limited-farsighted pairwise stability of a structure. Solves the unique
// candidate profile, then searches unilateral deviations with anticipated
// replies (condition U) and pair deviations that sever one link while both
// players re-optimize and possibly rewire (condition B). A "stable" verdict is
// sound with respect to the declared search family only.
StabilityReport check_lfps(const Structure& g, const GameSpec& spec,
                           const LfpsSearchConfig& config = {});

// ----- strength classes -------------------------------------------------------

enum class Role { attacker, hybrid, victim, isolated, peer };
std::string role_name(Role r);

struct ClassPartition {
  int classes = 0;                   // M
  std::vector<int> class_of;         // per player, classes ordered by ascending total
  std::vector<double> class_totals;  // representative w* per class
  std::vector<int> sizes;
  std::vector<Role> roles;
  double tol_rel = 1e-6;
  bool ambiguous = false;            // totals straddle the grouping band
  std::string note;
};

ClassPartition classify_partition(const EquilibriumResult& eq, const Structure& g,
                                  double tol_rel = 1e-6);

struct MpartiteVerdict {
  bool pass = false;
  std::vector<std::string> violations;
};

// Structural test of the stable-network characterization: no intra-class
// edges, all cross-class pairs linked, strictly decreasing class sizes, one
// attacker class (the strongest) and one victim class (the weakest).
MpartiteVerdict validate_mpartite(const ClassPartition& p, const Structure& g);

}  // namespace contestnet

#endif
