#pragma once

#include <vector>

#include "prefsel/milp/problem.hpp"

namespace prefsel::milp::detail {

/// Bounded-variable dual simplex on a dense tableau.
///
/// Each row i becomes sum_j a_ij x_j - s_i = 0 with the row bounds moved onto
/// the slack s_i. Because every structural variable is boxed, a basis is
/// dual feasible as soon as each nonbasic structural sits on the bound that
/// matches the sign of its reduced cost. Changing structural bounds therefore
/// never destroys dual feasibility, and the last optimal basis is a valid
/// warm start for the next solve.
class DualSimplex {
 public:
  DualSimplex(const Problem& problem, const SolverOptions& options);

  /// Overrides the bounds of structural variable `var` for later solves.
  void set_bounds(int var, double lower, double upper);
  double lower(int var) const { return lo_[static_cast<std::size_t>(var)]; }
  double upper(int var) const { return hi_[static_cast<std::size_t>(var)]; }

  /// Solves from the current basis. Returns optimal or infeasible.
  Status solve();

  /// Values of the structural variables in the last solve.
  std::vector<double> primal_values() const;
  /// Objective value in the sense of the original problem.
  double objective() const;
  long total_pivots() const noexcept { return total_pivots_; }

 private:
  void cold_start();
  void refactor();
  void recompute_reduced_costs();
  void recompute_basic_values();
  bool place_nonbasic();
  int choose_leaving_row() const;
  int choose_entering_column(int row, bool below) const;
  void pivot(int row, int col, bool leaving_to_upper);
  double max_residual() const;
  double internal_objective() const;

  std::size_t rows_ = 0;
  std::size_t structurals_ = 0;
  std::size_t columns_ = 0;
  std::vector<std::vector<Term>> matrix_rows_;
  std::vector<double> lo_, hi_, cost_;
  double objective_sign_ = 1.0;

  std::vector<double> tableau_;
  std::vector<double> reduced_;
  std::vector<double> x_;
  std::vector<int> basis_;
  std::vector<int> row_of_;
  std::vector<char> at_upper_;

  SolverOptions options_;
  bool bland_ = false;
  long pivots_since_refactor_ = 0;
  long total_pivots_ = 0;
};

}  // namespace prefsel::milp::detail
