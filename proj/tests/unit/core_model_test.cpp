#include <random>

#include <gtest/gtest.h>

#include "prefsel/criterion.hpp"
#include "prefsel/error.hpp"
#include "prefsel/performance_table.hpp"
#include "prefsel/value_function.hpp"
#include "support/oracles.hpp"

namespace prefsel {
namespace {

CriterionSpec make_criterion(double lo, double hi, int gamma, Direction dir = Direction::benefit) {
  return CriterionSpec{CriterionId("g"), "g", lo, hi, gamma, dir};
}

void expect_points(const std::vector<double>& got, const std::vector<double>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-15) << i;
}

TEST(Breakpoints, EqualDivision) {
  expect_points(breakpoints(make_criterion(0, 1, 5)), {0, 0.2, 0.4, 0.6, 0.8, 1.0});
  expect_points(breakpoints(make_criterion(0, 1, 1)), {0, 1});
  expect_points(breakpoints(make_criterion(2, 6, 4)), {2, 3, 4, 5, 6});
}

TEST(CriterionSpec, RejectsDegenerateScaleAndBadSubintervals) {
  EXPECT_THROW(make_criterion(1, 1, 3).validate(), InputError);
  EXPECT_THROW(make_criterion(2, 1, 3).validate(), InputError);
  EXPECT_THROW(make_criterion(0, 1, 0).validate(), InputError);
  EXPECT_NO_THROW(make_criterion(0, 1, 1).validate());
}

TEST(InterpolationVector, Endpoints) {
  const auto c = make_criterion(0, 1, 5);
  EXPECT_EQ(interpolation_vector(c, 0.0).coefficients, std::vector<double>(5, 0.0));
  EXPECT_EQ(interpolation_vector(c, 1.0).coefficients, std::vector<double>(5, 1.0));
}

TEST(InterpolationVector, FractionalEntry) {
  const auto c = make_criterion(0, 1, 5);
  const auto v = interpolation_vector(c, 0.3);
  const std::vector<double> want{1, 0.5, 0, 0, 0};
  ASSERT_EQ(v.size(), 5U);
  for (std::size_t s = 0; s < 5; ++s) EXPECT_NEAR(v[s], want[s], 1e-12);

  const std::vector<double> deltas{0.05, 0.3, 0.1, 0.2, 0.15};
  EXPECT_NEAR(v.dot(deltas), testing::interval_interpolation(c, deltas, 0.3), 1e-12);
}

TEST(InterpolationVector, OutOfScaleNamesCriterion) {
  auto c = make_criterion(0, 1, 5);
  c.id = CriterionId("g7");
  try {
    interpolation_vector(c, 1.5);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("g7"), std::string::npos);
  }
  EXPECT_NO_THROW(interpolation_vector(c, 1.0 + 5e-10));
  EXPECT_NO_THROW(interpolation_vector(c, -5e-10));
}

TEST(InterpolationVector, PrefixFractionZeroPattern) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> gammas(1, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const double lo = -3.0 + 6.0 * unit(rng);
    const auto c = make_criterion(lo, lo + 0.1 + 5.0 * unit(rng), gammas(rng));
    const double score = c.scale_low + (c.scale_high - c.scale_low) * unit(rng);
    const auto v = interpolation_vector(c, score);
    std::size_t s = 0;
    while (s < v.size() && v[s] == 1.0) ++s;
    if (s < v.size() && v[s] > 0.0) {
      EXPECT_LT(v[s], 1.0);
      ++s;
    }
    for (; s < v.size(); ++s) EXPECT_EQ(v[s], 0.0) << "trial " << trial;
  }
}

TEST(IngestCost, Reflection) {
  EXPECT_DOUBLE_EQ(ingest_cost_criterion(make_criterion(0, 1, 5, Direction::cost), 0.3), 0.7);
  EXPECT_DOUBLE_EQ(ingest_cost_criterion(make_criterion(0, 1, 5, Direction::cost), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(ingest_cost_criterion(make_criterion(2, 6, 5, Direction::cost), 5.0), 3.0);
}

PerformanceTable random_table(std::mt19937& rng, int n, int m, int gamma) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<CriterionSpec> criteria;
  for (int j = 0; j < m; ++j) {
    const double lo = -1.0 + 2.0 * unit(rng);
    criteria.push_back({CriterionId("g" + std::to_string(j + 1)), "", lo, lo + 0.5 + unit(rng), gamma,
                        Direction::benefit});
  }
  std::vector<AlternativeId> ids;
  std::vector<std::vector<double>> scores(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ids.emplace_back("a" + std::to_string(i + 1));
    for (const auto& c : criteria) scores[i].push_back(c.scale_low + (c.scale_high - c.scale_low) * unit(rng));
  }
  return PerformanceTable(criteria, ids, scores);
}

ValueFunctionModel random_vfm(std::mt19937& rng, const PerformanceTable& table) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<MarginalFunction> marginals;
  double total = 0.0;
  for (const auto& c : table.criteria()) {
    MarginalFunction m{true, {}};
    for (int s = 0; s < c.subintervals; ++s) {
      m.deltas.push_back(unit(rng));
      total += m.deltas.back();
    }
    marginals.push_back(m);
  }
  for (auto& m : marginals)
    for (double& d : m.deltas) d /= total;
  return ValueFunctionModel(marginals, 0.0);
}

TEST(Evaluate, InnerProductMatchesIntervalInterpolation) {
  std::mt19937 rng(11);
  int points = 0;
  while (points < 1000) {
    const auto table = random_table(rng, 10, 4, 1 + static_cast<int>(rng() % 7));
    const auto vfm = random_vfm(rng, table);
    for (std::size_t i = 0; i < table.num_alternatives(); ++i, ++points) {
      double oracle = 0.0;
      for (std::size_t j = 0; j < table.num_criteria(); ++j)
        oracle += testing::interval_interpolation(table.criterion(j), vfm.marginal(j).deltas, table.score(i, j));
      EXPECT_NEAR(evaluate(vfm, table, i), oracle, 1e-12);
    }
  }
}

TEST(Evaluate, MonotoneInEachScore) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto table = random_table(rng, 1, 3, 5);
    const auto vfm = random_vfm(rng, table);
    const std::size_t j = rng() % 3;
    const auto& c = table.criterion(j);
    auto scores = std::vector<std::vector<double>>{{table.row(0).begin(), table.row(0).end()}};
    const double base = evaluate(vfm, table, 0);
    scores[0][j] = scores[0][j] + (c.scale_high - scores[0][j]) * unit(rng);
    PerformanceTable bumped({table.criteria().begin(), table.criteria().end()},
                            {table.alternatives().begin(), table.alternatives().end()}, scores);
    EXPECT_GE(evaluate(vfm, bumped, 0), base - 1e-15);
  }
}

TEST(Evaluate, ZeroModelAndUniformSingleCriterion) {
  const CriterionSpec c{CriterionId("g1"), "", 2.0, 6.0, 4, Direction::benefit};
  PerformanceTable table({c}, {AlternativeId("a"), AlternativeId("b")}, {{3.5}, {6.0}});
  EXPECT_EQ(evaluate(ValueFunctionModel::zero(table), table, AlternativeId("a")), 0.0);
  const auto uniform = ValueFunctionModel::uniform(table);
  EXPECT_NEAR(evaluate(uniform, table, AlternativeId("a")), (3.5 - 2.0) / 4.0, 1e-12);
  EXPECT_NEAR(evaluate(uniform, table, AlternativeId("b")), 1.0, 1e-12);
}

TEST(Evaluate, Errors) {
  const CriterionSpec c{CriterionId("g1"), "", 0.0, 1.0, 2, Direction::benefit};
  PerformanceTable table({c}, {AlternativeId("a")}, {{0.5}});
  EXPECT_THROW(evaluate(ValueFunctionModel::uniform(table), table, AlternativeId("zz")), InputError);
  ValueFunctionModel wrong({{true, {1.0}}}, 0.0);
  EXPECT_THROW(evaluate(wrong, table, AlternativeId("a")), InputError);
}

TEST(ValueFunctionModel, Validation) {
  EXPECT_NO_THROW(ValueFunctionModel({{true, {0.5, 0.5}}, {false, {0.0, 0.0}}}, 0.01).validate());
  EXPECT_THROW(ValueFunctionModel({{true, {0.5, 0.4}}}, 0.01).validate(), InputError);
  EXPECT_THROW(ValueFunctionModel({{true, {1.0, 0.0}}, {true, {0.0, 0.0}}}, 0.01).validate(), InputError);
  EXPECT_THROW(ValueFunctionModel({{true, {1.2, -0.2}}}, 0.01).validate(), InputError);
}

TEST(PerformanceTable, Validation) {
  const CriterionSpec c{CriterionId("g1"), "", 0.0, 1.0, 2, Direction::benefit};
  EXPECT_THROW(PerformanceTable({c}, {AlternativeId("a"), AlternativeId("a")}, {{0.1}, {0.2}}), InputError);
  EXPECT_THROW(PerformanceTable({c, c}, {AlternativeId("a")}, {{0.1, 0.2}}), InputError);
  EXPECT_THROW(PerformanceTable({c}, {AlternativeId("a")}, {{1.5}}), DomainError);
  EXPECT_THROW(PerformanceTable({c}, {}, {}), InputError);
  PerformanceTable ok({c}, {AlternativeId("a")}, {{1.0 + 1e-10}});
  EXPECT_EQ(ok.score(0, 0), 1.0);
}

TEST(PreferenceStatement, Validation) {
  const CriterionSpec c{CriterionId("g1"), "", 0.0, 1.0, 2, Direction::benefit};
  PerformanceTable table({c}, {AlternativeId("a"), AlternativeId("b")}, {{0.1}, {0.2}});
  std::vector<PreferenceStatement> ok{{AlternativeId("a"), AlternativeId("b"), Relation::strict},
                                      {AlternativeId("b"), AlternativeId("b"), Relation::indifferent}};
  EXPECT_NO_THROW(validate_statements(table, ok));
  std::vector<PreferenceStatement> self{{AlternativeId("a"), AlternativeId("a"), Relation::strict}};
  EXPECT_THROW(validate_statements(table, self), InputError);
  std::vector<PreferenceStatement> unknown{{AlternativeId("a"), AlternativeId("q"), Relation::strict}};
  EXPECT_THROW(validate_statements(table, unknown), InputError);
  EXPECT_EQ(reference_set(table, ok), (std::vector<std::size_t>{0, 1}));
}

}  // namespace
}  // namespace prefsel
