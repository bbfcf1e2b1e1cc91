#include "prefsel/value_function.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "prefsel/error.hpp"

namespace prefsel {

double MarginalFunction::weight() const { return std::accumulate(deltas.begin(), deltas.end(), 0.0); }

ValueFunctionModel::ValueFunctionModel(std::vector<MarginalFunction> marginals, double epsilon_used)
    : marginals_(std::move(marginals)), epsilon_used_(epsilon_used) {}

ValueFunctionModel ValueFunctionModel::zero(const PerformanceTable& table) {
  std::vector<MarginalFunction> marginals;
  for (const auto& c : table.criteria())
    marginals.push_back({false, std::vector<double>(static_cast<std::size_t>(c.subintervals), 0.0)});
  return ValueFunctionModel(std::move(marginals), 0.0);
}

ValueFunctionModel ValueFunctionModel::uniform(const PerformanceTable& table) {
  const double total = static_cast<double>(table.total_subintervals());
  std::vector<MarginalFunction> marginals;
  for (const auto& c : table.criteria())
    marginals.push_back({true, std::vector<double>(static_cast<std::size_t>(c.subintervals), 1.0 / total)});
  return ValueFunctionModel(std::move(marginals), 0.0);
}

std::size_t ValueFunctionModel::num_selected() const {
  std::size_t k = 0;
  for (const auto& m : marginals_) k += m.selected ? 1 : 0;
  return k;
}

bool ValueFunctionModel::empty() const {
  for (const auto& m : marginals_)
    if (m.selected && m.weight() > 0.0) return false;
  return true;
}

double ValueFunctionModel::total_weight() const {
  double w = 0.0;
  for (const auto& m : marginals_)
    if (m.selected) w += m.weight();
  return w;
}

void ValueFunctionModel::check_dimensions(const PerformanceTable& table) const {
  if (marginals_.size() != table.num_criteria())
    throw InputError(fmt::format("value function has {} marginals, table has {} criteria", marginals_.size(),
                                 table.num_criteria()));
  for (std::size_t j = 0; j < marginals_.size(); ++j) {
    const auto expected = static_cast<std::size_t>(table.criterion(j).subintervals);
    if (marginals_[j].deltas.size() != expected)
      throw InputError(fmt::format("criterion {}: value function has {} subintervals, table has {}",
                                   table.criterion(j).id.str(), marginals_[j].deltas.size(), expected));
  }
}

void ValueFunctionModel::validate(double tol) const {
  for (std::size_t j = 0; j < marginals_.size(); ++j) {
    const auto& m = marginals_[j];
    for (double d : m.deltas)
      if (!(d >= -tol)) throw InputError(fmt::format("marginal {}: negative value difference {}", j, d));
    if (m.selected && m.weight() < tol)
      throw InputError(fmt::format("marginal {} is selected but carries no weight (degenerate)", j));
  }
  const double total = total_weight();
  if (std::abs(total - 1.0) > tol)
    throw InputError(fmt::format("value function is not normalized: selected weights sum to {}", total));
}

double evaluate(const ValueFunctionModel& vfm, const PerformanceTable& table, std::size_t alternative) {
  vfm.check_dimensions(table);
  double u = 0.0;
  for (std::size_t j = 0; j < table.num_criteria(); ++j) {
    const auto& m = vfm.marginal(j);
    if (!m.selected) continue;
    u += table.interpolation(alternative, j).dot(m.deltas);
  }
  return u;
}

double evaluate(const ValueFunctionModel& vfm, const PerformanceTable& table, const AlternativeId& id) {
  return evaluate(vfm, table, table.alternative_index(id));
}

std::vector<double> evaluate_all(const ValueFunctionModel& vfm, const PerformanceTable& table) {
  std::vector<double> out(table.num_alternatives());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = evaluate(vfm, table, i);
  return out;
}

}  // namespace prefsel
