#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "prefsel/milp/solver.hpp"
#include "prefsel/performance_table.hpp"
#include "prefsel/value_function.hpp"

namespace prefsel {

/// Default margin for strict preferences.
inline constexpr double kDefaultEpsilon = 0.01;
/// F* at or below this counts as consistent.
inline constexpr double kConsistencyTolerance = 1e-6;

struct SolveParams {
  /// Weight of the empirical error (inconsistent mode only).
  double C = 100.0;
  /// Weight of the slope-deviation bound phi.
  double p = 0.0;
  double epsilon = kDefaultEpsilon;
  /// Lower bound on selected value differences. Must stay 0.
  double rho = 0.0;
  /// Cardinality cap on the selected criteria.
  std::optional<int> max_selected;
  /// Uniform subinterval count applied to every criterion.
  std::optional<int> gamma;
  /// Per-criterion subinterval counts, applied after `gamma`.
  std::map<CriterionId, int> gamma_by_criterion;

  /// Throws InputError on negative or non-finite weights, epsilon <= 0,
  /// rho != 0, max_selected < 1 or a subinterval count < 1.
  void validate() const;
};

/// The table re-split according to the subinterval overrides in `params`.
PerformanceTable apply_breakpoints(const PerformanceTable& table, const SolveParams& params);

/// Over- and under-estimation slack of one reference alternative.
struct AlternativeError {
  double over = 0.0;
  double under = 0.0;
};

/// Classic ordinal regression LP: every criterion active, minimize the
/// total slack needed to honour the statements.
struct UtaModel {
  milp::Problem problem;
  /// du[j][s]: value difference of criterion j on subinterval s.
  std::vector<std::vector<int>> du;
  /// Table indices of the reference alternatives.
  std::vector<std::size_t> reference;
  std::vector<int> sigma_plus;
  std::vector<int> sigma_minus;
};

UtaModel build_uta(const PerformanceTable& table, std::span<const PreferenceStatement> statements,
                   double epsilon = kDefaultEpsilon);

struct UtaResult {
  /// False when the statements contain a strict cycle (no slack helps).
  bool feasible = false;
  /// Optimal total slack; +inf when infeasible.
  double f_star = 0.0;
  ValueFunctionModel vfm;
  std::map<AlternativeId, AlternativeError> errors;
};

UtaResult solve_uta(const PerformanceTable& table, std::span<const PreferenceStatement> statements,
                    double epsilon = kDefaultEpsilon, const milp::SolverOptions& options = {});

struct ConsistencyResult {
  bool consistent = true;
  double f_star = 0.0;
};

ConsistencyResult check_consistency(const PerformanceTable& table, std::span<const PreferenceStatement> statements,
                                    double epsilon = kDefaultEpsilon, const milp::SolverOptions& options = {});

enum class SelectionMode {
  /// Statements must be reproduced exactly; no slack variables.
  consistent,
  /// Slack variables with weight C absorb contradictions.
  inconsistent,
};

std::string to_string(SelectionMode mode);

/// Criteria-selection MILP together with the variable layout needed to read
/// a solution back.
struct SelectionModel {
  SelectionMode mode = SelectionMode::consistent;
  PerformanceTable table;
  std::vector<PreferenceStatement> statements;
  SolveParams params;
  milp::Problem problem;
  std::vector<std::vector<int>> du;
  std::vector<std::vector<int>> z;
  std::vector<int> delta;
  int phi = -1;
  std::vector<std::size_t> reference;
  /// Empty in consistent mode.
  std::vector<int> sigma_plus;
  std::vector<int> sigma_minus;
};

/// Throws InputError when there are no statements.
SelectionModel build_selection_inconsistent(const PerformanceTable& table,
                                            std::span<const PreferenceStatement> statements,
                                            const SolveParams& params);
SelectionModel build_selection_consistent(const PerformanceTable& table,
                                          std::span<const PreferenceStatement> statements,
                                          const SolveParams& params);
SelectionModel build_selection(const PerformanceTable& table, std::span<const PreferenceStatement> statements,
                               const SolveParams& params, SelectionMode mode);

struct SelectionResult {
  /// Unselected criteria have zeroed value differences.
  ValueFunctionModel vfm;
  std::vector<CriterionId> selected;
  /// Largest adjacent slope difference over the selected criteria.
  double phi = 0.0;
  double empirical_error = 0.0;
  /// C * empirical_error + p * phi + number selected.
  double objective = 0.0;
  std::map<AlternativeId, AlternativeError> per_alternative_errors;
  /// Audit trail: raw z and value-difference columns of every criterion.
  std::vector<std::vector<double>> z_values;
  std::vector<std::vector<double>> raw_deltas;
  long nodes_explored = 0;
};

/// Solves the model, then re-solves with the selection fixed and the
/// objective held at its optimum to find the smallest phi. Throws
/// InfeasibleError when the model has no solution.
SelectionResult solve_selection(const SelectionModel& model, const milp::SolverOptions& options = {});

/// Same objective as the selection model but over a fixed criteria subset
/// (table indices), written directly without the product linearization.
/// Empty when the subset admits no solution.
std::optional<SelectionResult> solve_fixed_selection(const PerformanceTable& table,
                                                     std::span<const PreferenceStatement> statements,
                                                     const SolveParams& params, SelectionMode mode,
                                                     std::span<const std::size_t> subset,
                                                     const milp::SolverOptions& options = {});

struct RepresentativeResult {
  ValueFunctionModel vfm;
  /// Smallest difference over the strict statements.
  double margin = 0.0;
};

/// Value function over all criteria that separates the strict statements
/// as much as possible. With `epsilon_as_variable` the common margin is
/// maximized; otherwise the margin is fixed at `epsilon` and the sum of the
/// strict differences is maximized. Throws InputError without strict
/// statements and InfeasibleError when no compatible function exists.
RepresentativeResult fit_representative(const PerformanceTable& table,
                                        std::span<const PreferenceStatement> statements, bool epsilon_as_variable,
                                        double epsilon = kDefaultEpsilon, const milp::SolverOptions& options = {});

/// Model size in the customary accounting for these models: one delta, the
/// value differences and one weight term Z_j per criterion; four linking
/// conditions per z, one slope condition per adjacent pair and one row per
/// statement.
struct ModelSize {
  std::size_t variables = 0;
  std::size_t binaries = 0;
  std::size_t constraints = 0;
};

ModelSize model_size(const SelectionModel& model);

}  // namespace prefsel
