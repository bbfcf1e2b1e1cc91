#include "prefsel/performance_table.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <fmt/format.h>

#include "prefsel/error.hpp"

namespace prefsel {

PerformanceTable::PerformanceTable(std::vector<CriterionSpec> criteria,
                                   std::vector<AlternativeId> alternatives,
                                   std::vector<std::vector<double>> scores)
    : criteria_(std::move(criteria)), alternatives_(std::move(alternatives)), scores_(std::move(scores)) {
  if (criteria_.empty()) throw InputError("performance table has no criteria");
  if (alternatives_.empty()) throw InputError("performance table has no alternatives");

  std::unordered_set<CriterionId> criterion_ids;
  for (const auto& c : criteria_) {
    c.validate();
    if (!criterion_ids.insert(c.id).second)
      throw InputError(fmt::format("duplicate criterion id {}", c.id.str()));
  }
  std::unordered_set<AlternativeId> alternative_ids;
  for (const auto& a : alternatives_) {
    if (a.empty()) throw InputError("alternative with empty id");
    if (!alternative_ids.insert(a).second)
      throw InputError(fmt::format("duplicate alternative id {}", a.str()));
  }

  if (scores_.size() != alternatives_.size())
    throw InputError(fmt::format("score matrix has {} rows for {} alternatives", scores_.size(),
                                 alternatives_.size()));
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    if (scores_[i].size() != criteria_.size())
      throw InputError(fmt::format("alternative {}: {} scores for {} criteria", alternatives_[i].str(),
                                   scores_[i].size(), criteria_.size()));
    for (std::size_t j = 0; j < criteria_.size(); ++j) {
      const auto& c = criteria_[j];
      double& v = scores_[i][j];
      if (!std::isfinite(v) || v < c.scale_low - kScaleTolerance || v > c.scale_high + kScaleTolerance)
        throw DomainError(fmt::format("score of {} on {} is {}, outside scale [{}, {}]",
                                      alternatives_[i].str(), c.id.str(), v, c.scale_low, c.scale_high));
      v = std::clamp(v, c.scale_low, c.scale_high);
    }
  }
}

std::optional<std::size_t> PerformanceTable::find_alternative(const AlternativeId& id) const {
  auto it = std::find(alternatives_.begin(), alternatives_.end(), id);
  if (it == alternatives_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - alternatives_.begin());
}

std::optional<std::size_t> PerformanceTable::find_criterion(const CriterionId& id) const {
  auto it = std::find_if(criteria_.begin(), criteria_.end(), [&](const auto& c) { return c.id == id; });
  if (it == criteria_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - criteria_.begin());
}

std::size_t PerformanceTable::alternative_index(const AlternativeId& id) const {
  if (auto i = find_alternative(id)) return *i;
  throw InputError(fmt::format("unknown alternative {}", id.str()));
}

std::size_t PerformanceTable::criterion_index(const CriterionId& id) const {
  if (auto j = find_criterion(id)) return *j;
  throw InputError(fmt::format("unknown criterion {}", id.str()));
}

InterpolationVector PerformanceTable::interpolation(std::size_t i, std::size_t j) const {
  return interpolation_vector(criterion(j), score(i, j));
}

PerformanceTable PerformanceTable::with_subintervals(int gamma) const {
  PerformanceTable copy = *this;
  for (auto& c : copy.criteria_) c.subintervals = gamma;
  for (const auto& c : copy.criteria_) c.validate();
  return copy;
}

PerformanceTable PerformanceTable::with_subintervals(const std::map<CriterionId, int>& per_criterion) const {
  PerformanceTable copy = *this;
  for (const auto& [id, gamma] : per_criterion) {
    auto& c = copy.criteria_.at(criterion_index(id));
    c.subintervals = gamma;
    c.validate();
  }
  return copy;
}

std::size_t PerformanceTable::total_subintervals() const {
  std::size_t total = 0;
  for (const auto& c : criteria_) total += static_cast<std::size_t>(c.subintervals);
  return total;
}

bool operator==(const PerformanceTable& a, const PerformanceTable& b) {
  if (a.alternatives_ != b.alternatives_ || a.scores_ != b.scores_) return false;
  if (a.criteria_.size() != b.criteria_.size()) return false;
  for (std::size_t j = 0; j < a.criteria_.size(); ++j) {
    const auto& x = a.criteria_[j];
    const auto& y = b.criteria_[j];
    if (x.id != y.id || x.name != y.name || x.scale_low != y.scale_low || x.scale_high != y.scale_high ||
        x.subintervals != y.subintervals || x.direction != y.direction)
      return false;
  }
  return true;
}

void validate_statements(const PerformanceTable& table, std::span<const PreferenceStatement> statements) {
  for (std::size_t k = 0; k < statements.size(); ++k) {
    const auto& s = statements[k];
    if (!table.find_alternative(s.better))
      throw InputError(fmt::format("statement {} ({}): unknown alternative {}", k + 1, to_string(s), s.better.str()));
    if (!table.find_alternative(s.other))
      throw InputError(fmt::format("statement {} ({}): unknown alternative {}", k + 1, to_string(s), s.other.str()));
    if (s.relation == Relation::strict && s.better == s.other)
      throw InputError(fmt::format("statement {} ({}): an alternative cannot be strictly preferred to itself",
                                   k + 1, to_string(s)));
  }
}

std::vector<std::size_t> reference_set(const PerformanceTable& table,
                                       std::span<const PreferenceStatement> statements) {
  std::vector<std::size_t> out;
  auto add = [&](const AlternativeId& id) {
    const std::size_t i = table.alternative_index(id);
    if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
  };
  for (const auto& s : statements) {
    add(s.better);
    add(s.other);
  }
  return out;
}

std::string to_string(const PreferenceStatement& statement) {
  return fmt::format("{} {} {}", statement.better.str(), statement.relation == Relation::strict ? ">" : "~",
                     statement.other.str());
}

}  // namespace prefsel
