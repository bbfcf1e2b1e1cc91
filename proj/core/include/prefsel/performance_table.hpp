#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "prefsel/criterion.hpp"
#include "prefsel/ids.hpp"

namespace prefsel {

/// Alternatives x criteria score matrix. Scores are stored benefit-oriented:
/// cost criteria are reflected before they reach the table.
class PerformanceTable {
 public:
  PerformanceTable() = default;

  /// Validates criteria, id uniqueness, matrix shape and that every score
  /// lies in its criterion scale (within kScaleTolerance; clamped).
  PerformanceTable(std::vector<CriterionSpec> criteria, std::vector<AlternativeId> alternatives,
                   std::vector<std::vector<double>> scores);

  std::size_t num_criteria() const noexcept { return criteria_.size(); }
  std::size_t num_alternatives() const noexcept { return alternatives_.size(); }

  std::span<const CriterionSpec> criteria() const noexcept { return criteria_; }
  const CriterionSpec& criterion(std::size_t j) const { return criteria_.at(j); }
  std::span<const AlternativeId> alternatives() const noexcept { return alternatives_; }
  const AlternativeId& alternative(std::size_t i) const { return alternatives_.at(i); }

  double score(std::size_t i, std::size_t j) const { return scores_.at(i).at(j); }
  std::span<const double> row(std::size_t i) const { return scores_.at(i); }

  std::optional<std::size_t> find_alternative(const AlternativeId& id) const;
  std::optional<std::size_t> find_criterion(const CriterionId& id) const;
  /// Throws InputError for unknown ids.
  std::size_t alternative_index(const AlternativeId& id) const;
  std::size_t criterion_index(const CriterionId& id) const;

  /// Interpolation coefficients of alternative i on criterion j.
  InterpolationVector interpolation(std::size_t i, std::size_t j) const;

  /// Copy with every criterion split into `gamma` subintervals.
  PerformanceTable with_subintervals(int gamma) const;
  /// Copy with the listed criteria re-split; others keep their count.
  PerformanceTable with_subintervals(const std::map<CriterionId, int>& per_criterion) const;

  /// Sum over criteria of the subinterval counts.
  std::size_t total_subintervals() const;

  friend bool operator==(const PerformanceTable&, const PerformanceTable&);

 private:
  std::vector<CriterionSpec> criteria_;
  std::vector<AlternativeId> alternatives_;
  std::vector<std::vector<double>> scores_;
};

enum class Relation { strict, indifferent };

/// One holistic judgment: `better` is strictly preferred to, or indifferent
/// with, `other`.
struct PreferenceStatement {
  AlternativeId better;
  AlternativeId other;
  Relation relation = Relation::strict;

  friend bool operator==(const PreferenceStatement&, const PreferenceStatement&) = default;
};

/// Throws InputError when a statement names an unknown alternative or a
/// strict statement relates an alternative to itself.
void validate_statements(const PerformanceTable& table, std::span<const PreferenceStatement> statements);

/// Indices (into the table) of the reference alternatives, in first-seen order.
std::vector<std::size_t> reference_set(const PerformanceTable& table,
                                       std::span<const PreferenceStatement> statements);

std::string to_string(const PreferenceStatement& statement);

}  // namespace prefsel
