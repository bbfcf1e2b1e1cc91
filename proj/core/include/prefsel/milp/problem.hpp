#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace prefsel::milp {

enum class VarKind { continuous, binary };
enum class Sense { less_equal, equal, greater_equal };
enum class ObjectiveSense { minimize, maximize };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  VarKind kind = VarKind::continuous;
};

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::vector<Term> terms;
  Sense sense = Sense::less_equal;
  double rhs = 0.0;
  /// Free-form family label ("SC", "LC", ...) used for model accounting.
  std::string group;
};

/// A bounded mixed-binary linear program. Every variable carries finite
/// lower and upper bounds.
class Problem {
 public:
  int add_variable(std::string name, double lower, double upper, VarKind kind = VarKind::continuous);
  int add_binary(std::string name) { return add_variable(std::move(name), 0.0, 1.0, VarKind::binary); }

  /// Duplicate variables in `terms` are merged; zero coefficients dropped.
  void add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string group = {});
  void set_objective(std::vector<Term> terms, ObjectiveSense sense);
  void set_bounds(int var, double lower, double upper);

  std::span<const Variable> variables() const noexcept { return variables_; }
  const Variable& variable(int var) const { return variables_.at(static_cast<std::size_t>(var)); }
  std::span<const Constraint> constraints() const noexcept { return constraints_; }
  std::span<const Term> objective() const noexcept { return objective_; }
  ObjectiveSense objective_sense() const noexcept { return objective_sense_; }

  std::size_t num_variables() const noexcept { return variables_.size(); }
  std::size_t num_constraints() const noexcept { return constraints_.size(); }
  std::size_t num_binaries() const;
  std::size_t count_group(std::string_view group) const;

  std::optional<int> find_variable(const std::string& name) const;
  /// Throws InputError for unknown names.
  int variable_index(const std::string& name) const;

  /// Copy with binaries turned into continuous [0,1] variables.
  Problem relaxed() const;

  /// Throws InputError on infinite or crossed bounds, binaries with bounds
  /// outside [0,1], and out-of-range variable indices.
  void validate() const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::vector<Term> objective_;
  ObjectiveSense objective_sense_ = ObjectiveSense::minimize;
  std::unordered_map<std::string, int> by_name_;
};

enum class Status { optimal, infeasible, unbounded };

std::string to_string(Status status);

struct Solution {
  Status status = Status::infeasible;
  std::vector<double> values;
  double objective_value = 0.0;
  long nodes_explored = 0;
  long pivots = 0;

  bool optimal() const noexcept { return status == Status::optimal; }
  double value(int var) const { return values.at(static_cast<std::size_t>(var)); }
};

struct Tolerances {
  double feasibility = 1e-7;
  double integrality = 1e-6;
  double objective = 1e-6;
};

struct SolverOptions {
  Tolerances tolerances;
  long max_nodes = 1'000'000;
  long max_pivots_per_lp = 200'000;
  /// Consecutive non-improving pivots before switching to Bland's rule.
  int stall_threshold = 64;
};

/// Reads PREFSEL_MAX_NODES (if set) into the node budget.
SolverOptions options_from_environment(SolverOptions base = {});

struct Violation {
  enum class Kind { constraint, bound, integrality };
  Kind kind = Kind::constraint;
  /// Constraint index for constraint violations, variable index otherwise.
  std::size_t index = 0;
  double amount = 0.0;
  std::string description;
};

/// Every constraint, bound, and integrality violation beyond tolerance.
/// Empty for infeasible solutions (nothing is claimed).
std::vector<Violation> verify_solution(const Problem& problem, const Solution& solution,
                                       const Tolerances& tol = {});

double objective_value(const Problem& problem, std::span<const double> values);
double activity(const Constraint& constraint, std::span<const double> values);

/// Writes the problem in CPLEX LP text format.
void write_lp(const Problem& problem, std::ostream& out);

}  // namespace prefsel::milp
