#pragma once

#include <span>
#include <string>
#include <vector>

#include "prefsel/ids.hpp"

namespace prefsel {

enum class Direction { benefit, cost };

/// Absolute tolerance used when checking a score against its scale bounds.
inline constexpr double kScaleTolerance = 1e-9;

/// A criterion with a closed evaluation scale split into equal subintervals.
struct CriterionSpec {
  CriterionId id;
  std::string name;
  double scale_low = 0.0;
  double scale_high = 1.0;
  int subintervals = 1;
  Direction direction = Direction::benefit;

  /// Throws InputError when the scale is empty or reversed, or when
  /// subintervals < 1.
  void validate() const;
};

/// Characteristic points g^0 .. g^gamma, evenly spaced over the scale.
std::vector<double> breakpoints(const CriterionSpec& criterion);

/// Coefficients of a score on each subinterval: a prefix of ones, at most
/// one fractional entry, then zeros. The dot product with a vector of value
/// differences is the marginal value of the score.
struct InterpolationVector {
  std::vector<double> coefficients;

  std::size_t size() const noexcept { return coefficients.size(); }
  double operator[](std::size_t i) const { return coefficients[i]; }
  double dot(std::span<const double> deltas) const;
};

/// Throws DomainError when the score lies outside the scale by more than
/// kScaleTolerance. Scores within tolerance are clamped.
InterpolationVector interpolation_vector(const CriterionSpec& criterion, double score);

/// Reflects a cost-type score onto the benefit orientation of the same scale.
double ingest_cost_criterion(const CriterionSpec& criterion, double score);

/// Marginal value of `score` for the piecewise-linear function defined by
/// `deltas` (one value difference per subinterval).
double marginal_value(const CriterionSpec& criterion, std::span<const double> deltas, double score);

struct BreakpointValue {
  double score;
  double value;
};

/// The (g^t, u(g^t)) pairs of a marginal value function, t = 0..gamma.
std::vector<BreakpointValue> marginal_points(const CriterionSpec& criterion,
                                             std::span<const double> deltas);

std::string to_string(Direction direction);

}  // namespace prefsel
