#pragma once

#include <span>
#include <vector>

#include "prefsel/performance_table.hpp"

namespace prefsel {

/// Selection flag and characteristic vector (value differences per
/// subinterval) of one criterion.
struct MarginalFunction {
  bool selected = false;
  std::vector<double> deltas;

  /// Sum of the value differences, i.e. u_j at the top of the scale.
  double weight() const;
};

/// Additive value function restricted to the selected criteria:
/// u(a) = sum_j selected_j * <deltas_j, A_j(a)>.
class ValueFunctionModel {
 public:
  ValueFunctionModel() = default;
  ValueFunctionModel(std::vector<MarginalFunction> marginals, double epsilon_used);

  /// All-zero deltas, nothing selected, dimensions taken from the table.
  static ValueFunctionModel zero(const PerformanceTable& table);
  /// Every criterion selected with uniform deltas summing to 1 overall.
  static ValueFunctionModel uniform(const PerformanceTable& table);

  std::span<const MarginalFunction> marginals() const noexcept { return marginals_; }
  const MarginalFunction& marginal(std::size_t j) const { return marginals_.at(j); }
  std::size_t size() const noexcept { return marginals_.size(); }
  double epsilon_used() const noexcept { return epsilon_used_; }

  std::size_t num_selected() const;
  /// True when no criterion is selected with positive weight.
  bool empty() const;
  /// Sum over selected criteria of their weights.
  double total_weight() const;

  /// Throws InputError unless the model matches the table's criteria and
  /// subinterval counts.
  void check_dimensions(const PerformanceTable& table) const;
  /// Throws InputError on negative deltas, a normalization defect larger
  /// than `tol`, or a selected criterion with weight below `tol`.
  void validate(double tol = 1e-6) const;

 private:
  std::vector<MarginalFunction> marginals_;
  double epsilon_used_ = 0.0;
};

double evaluate(const ValueFunctionModel& vfm, const PerformanceTable& table, std::size_t alternative);
double evaluate(const ValueFunctionModel& vfm, const PerformanceTable& table, const AlternativeId& id);
std::vector<double> evaluate_all(const ValueFunctionModel& vfm, const PerformanceTable& table);

}  // namespace prefsel
