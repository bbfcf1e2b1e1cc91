#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prefsel/disaggregation.hpp"

namespace prefsel {

/// A criteria subset as sorted table indices.
using CriteriaSet = std::vector<std::size_t>;

struct SupportAnalysis {
  std::vector<CriterionId> criteria;
  /// Streamlined supporting sets in discovery order.
  std::vector<CriteriaSet> family;
  /// Least slope deviation of a compatible function on each set.
  std::vector<double> phi;
  /// relevance[j]: number of sets containing criterion j.
  std::vector<int> relevance;
  std::vector<std::size_t> core;
  std::vector<std::size_t> redundant;
  int gamma_used = 0;
  double epsilon_used = 0.0;
};

/// Fills relevance, core and redundant from the family.
void summarize(SupportAnalysis& analysis);

struct EnumerationOptions {
  milp::SolverOptions solver;
  /// Cut budget; defaults to 10 * 2^m.
  std::optional<std::size_t> max_cuts;
  /// Solve for the least phi of every set found.
  bool compute_phi = true;
  /// Called after each set is found with the set and its position.
  std::function<void(const CriteriaSet&, std::size_t)> on_set;
};

/// Repeatedly finds a smallest supporting set, excludes it and its supersets
/// with a cut, and stops when no supporting set is left. Uses the subinterval
/// overrides and epsilon of `params`; p and C are ignored. Throws
/// InfeasibleError when the statements admit no supporting set and
/// ResourceError when the cut budget runs out.
SupportAnalysis enumerate_streamlined_supports(const PerformanceTable& table,
                                               std::span<const PreferenceStatement> statements,
                                               const SolveParams& params, const EnumerationOptions& options = {});

/// True when some normalized monotone value function using only `subset`
/// reproduces every statement.
bool is_supporting(const PerformanceTable& table, std::span<const PreferenceStatement> statements,
                   const CriteriaSet& subset, double epsilon, const milp::SolverOptions& options = {});

struct BruteForceSupports {
  /// Minimal supporting subsets ordered by size, then lexicographically.
  std::vector<CriteriaSet> family;
  /// feasible[mask]: whether the subset with that bit mask is supporting.
  std::vector<bool> feasible;
};

inline constexpr std::size_t kBruteForceMaxCriteria = 16;

/// Solves the compatibility LP of every nonempty subset. Throws InputError
/// when the table has more than kBruteForceMaxCriteria criteria.
BruteForceSupports brute_force_supports(const PerformanceTable& table,
                                        std::span<const PreferenceStatement> statements, const SolveParams& params,
                                        unsigned threads = 0, const milp::SolverOptions& options = {});

struct RelevanceReport {
  std::vector<CriterionId> criteria;
  std::vector<int> relevance;
  std::vector<std::size_t> core;
  std::vector<std::size_t> redundant;
  /// Family members with the largest summed relevance of their criteria.
  std::vector<std::size_t> best_members;
  int best_score = 0;
};

/// Throws InputError on an empty family.
RelevanceReport relevance_report(const SupportAnalysis& analysis);

inline constexpr double kTieTolerance = 1e-6;

struct Ranking {
  /// Groups in decreasing score order; members of a group are tied.
  std::vector<std::vector<AlternativeId>> groups;
  std::vector<AlternativeId> alternatives;
  std::vector<double> scores;
};

Ranking rank(const ValueFunctionModel& vfm, const PerformanceTable& table);

/// "a2 > a5 > a6 ~ a9".
std::string to_string(const Ranking& ranking);

std::vector<CriterionId> criterion_ids(const PerformanceTable& table, const CriteriaSet& set);

}  // namespace prefsel
