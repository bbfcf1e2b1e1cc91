#include "prefsel/criterion.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "prefsel/error.hpp"

namespace prefsel {

void CriterionSpec::validate() const {
  if (id.empty()) throw InputError("criterion with empty id");
  if (!std::isfinite(scale_low) || !std::isfinite(scale_high))
    throw InputError(fmt::format("criterion {}: scale bounds must be finite", id.str()));
  if (!(scale_low < scale_high))
    throw InputError(fmt::format(
        "criterion {}: degenerate scale [{}, {}]; its marginal value function would be "
        "identically zero",
        id.str(), scale_low, scale_high));
  if (subintervals < 1)
    throw InputError(
        fmt::format("criterion {}: number of subintervals must be >= 1, got {}", id.str(), subintervals));
}

std::vector<double> breakpoints(const CriterionSpec& criterion) {
  const int gamma = criterion.subintervals;
  const double width = criterion.scale_high - criterion.scale_low;
  std::vector<double> points(static_cast<std::size_t>(gamma) + 1);
  for (int t = 0; t <= gamma; ++t)
    points[t] = criterion.scale_low + width * static_cast<double>(t) / gamma;
  points.back() = criterion.scale_high;
  return points;
}

double InterpolationVector::dot(std::span<const double> deltas) const {
  double sum = 0.0;
  const std::size_t n = std::min(deltas.size(), coefficients.size());
  for (std::size_t s = 0; s < n; ++s) sum += coefficients[s] * deltas[s];
  return sum;
}

InterpolationVector interpolation_vector(const CriterionSpec& criterion, double score) {
  if (!(score >= criterion.scale_low - kScaleTolerance && score <= criterion.scale_high + kScaleTolerance))
    throw DomainError(fmt::format("criterion {}: score {} outside scale [{}, {}]", criterion.id.str(),
                                  score, criterion.scale_low, criterion.scale_high));
  score = std::clamp(score, criterion.scale_low, criterion.scale_high);

  const auto points = breakpoints(criterion);
  InterpolationVector out;
  out.coefficients.assign(static_cast<std::size_t>(criterion.subintervals), 0.0);
  for (std::size_t p = 1; p < points.size(); ++p) {
    if (score > points[p]) {
      out.coefficients[p - 1] = 1.0;
    } else if (score >= points[p - 1]) {
      out.coefficients[p - 1] = (score - points[p - 1]) / (points[p] - points[p - 1]);
    }
  }
  return out;
}

double ingest_cost_criterion(const CriterionSpec& criterion, double score) {
  return criterion.scale_low + criterion.scale_high - score;
}

double marginal_value(const CriterionSpec& criterion, std::span<const double> deltas, double score) {
  return interpolation_vector(criterion, score).dot(deltas);
}

std::vector<BreakpointValue> marginal_points(const CriterionSpec& criterion,
                                             std::span<const double> deltas) {
  const auto points = breakpoints(criterion);
  std::vector<BreakpointValue> out;
  out.reserve(points.size());
  double cumulative = 0.0;
  out.push_back({points[0], 0.0});
  for (std::size_t t = 1; t < points.size(); ++t) {
    if (t - 1 < deltas.size()) cumulative += deltas[t - 1];
    out.push_back({points[t], cumulative});
  }
  return out;
}

std::string to_string(Direction direction) {
  return direction == Direction::benefit ? "benefit" : "cost";
}

}  // namespace prefsel
