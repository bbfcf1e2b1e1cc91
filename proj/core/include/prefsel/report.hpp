#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prefsel/analysis.hpp"
#include "prefsel/disaggregation.hpp"

namespace prefsel {

enum class Mode {
  consistency,
  uta,
  select_consistent,
  select_inconsistent,
  representative,
  enumerate,
  relevance,
  rank,
};

enum class Format { json, markdown, csv };

/// Accepts the hyphenated names, e.g. "select-consistent".
Mode parse_mode(std::string_view name);
std::string to_string(Mode mode);
Format parse_format(std::string_view name);
std::string to_string(Format format);

/// Whether the mode needs a compatible value function to exist.
bool requires_consistency(Mode mode);

struct ProjectConfig {
  Mode mode = Mode::consistency;
  /// gamma defaults to 5 subintervals.
  SolveParams params = default_params();
  Format format = Format::json;
  /// Representative mode: maximize the common margin instead of the sum.
  bool epsilon_as_variable = true;
  /// Rank mode input.
  std::optional<ValueFunctionModel> vfm;
  milp::SolverOptions solver;

  void validate() const;
  static SolveParams default_params();
};

/// Everything a mode produced; unset parts were not computed.
struct Report {
  Mode mode = Mode::consistency;
  SolveParams params;
  bool epsilon_as_variable = true;
  /// The table as solved, i.e. with the subinterval overrides applied.
  PerformanceTable table;
  std::vector<PreferenceStatement> statements;

  std::optional<ConsistencyResult> consistency;
  std::optional<UtaResult> uta;
  std::optional<SelectionResult> selection;
  std::optional<RepresentativeResult> representative;
  std::optional<SupportAnalysis> supports;
  std::optional<RelevanceReport> relevance;
  /// Value function behind `scores` and `ranking`.
  std::optional<ValueFunctionModel> vfm;
  std::optional<Ranking> ranking;
};

/// Progress hook for enumeration: each supporting set as it is found.
using SupportProgress = std::function<void(const CriteriaSet&, std::size_t)>;

/// Dispatches to the engine. Errors keep their type and gain the mode name.
Report run(const ProjectConfig& config, const PerformanceTable& table,
           std::span<const PreferenceStatement> statements, const SupportProgress& progress = {});

/// JSON carries full precision; markdown and CSV round to 4 decimals.
std::string render(const Report& report, Format format);
std::string render_json(const Report& report);
std::string render_markdown(const Report& report);
std::string render_csv(const Report& report);

/// "{g2,g9}".
std::string format_set(std::span<const CriterionId> ids);

}  // namespace prefsel
