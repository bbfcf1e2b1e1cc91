#include <chrono>
#include <cmath>

#include <gtest/gtest.h>

#include "prefsel/disaggregation.hpp"
#include "prefsel/error.hpp"
#include "support/case_study.hpp"

namespace prefsel {
namespace {

using testing::strict;
using testing::supplier_statements;
using testing::supplier_table;

std::vector<std::string> ids(const std::vector<CriterionId>& v) {
  std::vector<std::string> out;
  for (const auto& c : v) out.push_back(c.str());
  return out;
}

PerformanceTable two_alternatives(double a, double b) {
  CriterionSpec c;
  c.id = CriterionId("g");
  return PerformanceTable({c}, {AlternativeId("a"), AlternativeId("b")}, {{a}, {b}});
}

void expect_invariants(const SelectionResult& r, const SolveParams& params) {
  EXPECT_NEAR(r.vfm.total_weight(), 1.0, 1e-6);
  for (std::size_t j = 0; j < r.vfm.size(); ++j) {
    const auto& m = r.vfm.marginal(j);
    if (!m.selected) continue;
    EXPECT_GE(m.weight(), 1e-6) << "degenerate criterion " << j;
    for (std::size_t s = 0; s + 1 < m.deltas.size(); ++s)
      EXPECT_LE(std::abs(m.deltas[s + 1] - m.deltas[s]), r.phi + 1e-7);
    for (std::size_t s = 0; s < m.deltas.size(); ++s) EXPECT_NEAR(r.z_values[j][s], m.deltas[s], 1e-7);
  }
  for (std::size_t j = 0; j < r.vfm.size(); ++j)
    if (!r.vfm.marginal(j).selected)
      for (double z : r.z_values[j]) EXPECT_NEAR(z, 0.0, 1e-7);
  const double k = r.objective - params.p * r.phi - params.C * r.empirical_error;
  EXPECT_NEAR(static_cast<double>(r.selected.size()), k, 1e-9);
}

TEST(SolveParams, Validation) {
  SolveParams p;
  EXPECT_NO_THROW(p.validate());
  p.epsilon = 0.0;
  EXPECT_THROW(p.validate(), InputError);
  p = {};
  p.rho = 0.1;
  EXPECT_THROW(p.validate(), InputError);
  p = {};
  p.C = -1.0;
  EXPECT_THROW(p.validate(), InputError);
  p = {};
  p.max_selected = 0;
  EXPECT_THROW(p.validate(), InputError);
  p = {};
  p.gamma = 0;
  EXPECT_THROW(p.validate(), InputError);
}

TEST(ApplyBreakpoints, UniformThenPerCriterion) {
  SolveParams p;
  p.gamma = 3;
  p.gamma_by_criterion[CriterionId("g2")] = 6;
  const auto t = apply_breakpoints(supplier_table(5), p);
  EXPECT_EQ(t.criterion(0).subintervals, 3);
  EXPECT_EQ(t.criterion(1).subintervals, 6);
}

TEST(Uta, CaseStudyConsistent) {
  const auto start = std::chrono::steady_clock::now();
  const auto r = check_consistency(supplier_table(), supplier_statements());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_TRUE(r.consistent);
  EXPECT_LE(r.f_star, 1e-6);
  EXPECT_LT(seconds, 1.0);
}

TEST(Uta, ReversalMakesInconsistent) {
  auto st = supplier_statements();
  st.push_back(strict(3, 4));
  const auto r = check_consistency(supplier_table(), st);
  EXPECT_FALSE(r.consistent);
  EXPECT_GT(r.f_star, 0.0);
}

TEST(Uta, TwoWayCycleIsUnrepairable) {
  const auto t = two_alternatives(0.2, 0.6);
  const std::vector<PreferenceStatement> st = {{AlternativeId("a"), AlternativeId("b")},
                                               {AlternativeId("b"), AlternativeId("a")}};
  const auto r = solve_uta(t, st, 0.01);
  EXPECT_FALSE(r.feasible);
  EXPECT_TRUE(std::isinf(r.f_star));
  EXPECT_GE(r.f_star, 2 * 0.01);
}

TEST(Uta, DominatedPreferenceNeedsSlack) {
  // a is worse than b; one subinterval forces u = score, so F* = 0.4 + eps.
  const auto t = two_alternatives(0.2, 0.6);
  const std::vector<PreferenceStatement> st = {{AlternativeId("a"), AlternativeId("b")}};
  const auto r = solve_uta(t, st, 0.01);
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.f_star, 0.41, 1e-9);
  const auto& ea = r.errors.at(AlternativeId("a"));
  const auto& eb = r.errors.at(AlternativeId("b"));
  EXPECT_NEAR(ea.over + ea.under + eb.over + eb.under, 0.41, 1e-9);
}

TEST(Uta, DominanceAndEmptyAreConsistent) {
  const auto t = two_alternatives(0.9, 0.1);
  const std::vector<PreferenceStatement> st = {{AlternativeId("a"), AlternativeId("b")}};
  EXPECT_TRUE(check_consistency(t, st).consistent);
  const auto empty = check_consistency(supplier_table(), {});
  EXPECT_TRUE(empty.consistent);
  EXPECT_EQ(empty.f_star, 0.0);
  EXPECT_NEAR(solve_uta(supplier_table(), {}).f_star, 0.0, 1e-12);
}

TEST(Uta, UnknownAlternative) {
  const std::vector<PreferenceStatement> st = {{AlternativeId("a1"), AlternativeId("zz")}};
  EXPECT_THROW(build_uta(supplier_table(), st), InputError);
}

TEST(Selection, ModelSizeCount) {
  const auto m = build_selection_inconsistent(supplier_table(5), supplier_statements(), SolveParams{});
  const auto size = model_size(m);
  EXPECT_EQ(size.variables, 70U);
  EXPECT_EQ(size.binaries, 10U);
  EXPECT_EQ(size.constraints, 248U);
  EXPECT_EQ(m.problem.num_binaries(), 10U);
}

TEST(Selection, RejectsEmptyStatements) {
  EXPECT_THROW(build_selection_consistent(supplier_table(), {}, SolveParams{}), InputError);
}

struct Table4Row {
  double p;
  std::vector<std::string> selected;
  double phi;
};

class Table4 : public ::testing::TestWithParam<Table4Row> {};

TEST_P(Table4, SelectedSetAndPhi) {
  const auto& row = GetParam();
  SolveParams params;
  params.p = row.p;
  const auto model = build_selection_consistent(supplier_table(5), supplier_statements(), params);
  const auto r = solve_selection(model);
  EXPECT_EQ(ids(r.selected), row.selected);
  EXPECT_NEAR(r.phi, row.phi, 5e-4);
  EXPECT_NEAR(r.empirical_error, 0.0, 1e-12);
  expect_invariants(r, params);
  for (const auto& st : supplier_statements())
    EXPECT_GE(evaluate(r.vfm, model.table, st.better) - evaluate(r.vfm, model.table, st.other), 0.01 - 1e-7);
}

INSTANTIATE_TEST_SUITE_P(CaseStudy, Table4,
                         ::testing::Values(Table4Row{10, {"g2", "g9"}, 0.0706},
                                           Table4Row{100, {"g1", "g2", "g9"}, 0.005},
                                           Table4Row{200, {"g2", "g7", "g8", "g9"}, 0.0}),
                         [](const auto& info) { return "p" + std::to_string(static_cast<int>(info.param.p)); });

TEST(Selection, LargeCMatchesConsistentModel) {
  SolveParams params;
  params.C = 1e6;
  params.p = 10;
  const auto loose = solve_selection(build_selection_inconsistent(supplier_table(), supplier_statements(), params));
  const auto hard = solve_selection(build_selection_consistent(supplier_table(), supplier_statements(), params));
  EXPECT_NEAR(loose.empirical_error, 0.0, 1e-7);
  EXPECT_NEAR(loose.objective, hard.objective, 1e-5);
  expect_invariants(loose, params);
}

TEST(Selection, ZeroCSelectsOneCriterion) {
  SolveParams params;
  params.C = 0.0;
  const auto r = solve_selection(build_selection_inconsistent(supplier_table(), supplier_statements(), params));
  EXPECT_EQ(r.selected.size(), 1U);
  EXPECT_NEAR(r.objective, 1.0, 1e-9);
  expect_invariants(r, params);
}

TEST(Selection, CardinalityCapMakesCaseStudyInfeasible) {
  SolveParams params;
  params.max_selected = 1;
  const auto m = build_selection_consistent(supplier_table(), supplier_statements(), params);
  EXPECT_EQ(m.problem.count_group("CARD"), 1U);
  EXPECT_THROW(solve_selection(m), InfeasibleError);
}

TEST(Selection, InconsistentStatementsRaise) {
  auto st = supplier_statements();
  st.push_back(strict(3, 4));
  EXPECT_THROW(solve_selection(build_selection_consistent(supplier_table(), st, SolveParams{})), InfeasibleError);
  EXPECT_THROW(solve_selection(build_selection_inconsistent(supplier_table(), st, SolveParams{})),
               InfeasibleError);
}

TEST(Selection, RepairableInconsistency) {
  const auto t = two_alternatives(0.2, 0.6);
  const std::vector<PreferenceStatement> st = {{AlternativeId("a"), AlternativeId("b")}};
  SolveParams params;
  params.C = 1.0;
  const auto r = solve_selection(build_selection_inconsistent(t, st, params));
  EXPECT_NEAR(r.empirical_error, 0.41, 1e-7);
  EXPECT_NEAR(r.objective, 1.41, 1e-7);
}

TEST(FixedSelection, MatchesMilpOnOptimalSet) {
  SolveParams params;
  params.p = 100;
  const std::vector<std::size_t> subset = {0, 1, 8};
  const auto fixed = solve_fixed_selection(supplier_table(), supplier_statements(), params,
                                           SelectionMode::consistent, subset);
  ASSERT_TRUE(fixed.has_value());
  EXPECT_NEAR(fixed->phi, 0.005, 5e-4);
  EXPECT_EQ(ids(fixed->selected), (std::vector<std::string>{"g1", "g2", "g9"}));
  const std::vector<std::size_t> single = {8};
  EXPECT_FALSE(solve_fixed_selection(supplier_table(), supplier_statements(), params, SelectionMode::consistent,
                                     single)
                   .has_value());
}

TEST(Representative, CaseStudyMargin) {
  const auto r = fit_representative(supplier_table(), supplier_statements(), true);
  EXPECT_NEAR(r.margin, 0.142197, 1e-4);
  EXPECT_NO_THROW(r.vfm.validate());
  const auto table = supplier_table();
  for (const auto& st : supplier_statements())
    EXPECT_GE(evaluate(r.vfm, table, st.better) - evaluate(r.vfm, table, st.other), r.margin - 1e-7);
}

TEST(Representative, FixedMarginMaximizesSum) {
  const auto r = fit_representative(supplier_table(), supplier_statements(), false, 0.01);
  EXPECT_GE(r.margin, 0.01 - 1e-7);
  EXPECT_NEAR(r.vfm.epsilon_used(), 0.01, 0.0);
}

TEST(Representative, OneCriterionGap) {
  const auto t = two_alternatives(0.7, 0.2);
  const std::vector<PreferenceStatement> st = {{AlternativeId("a"), AlternativeId("b")}};
  EXPECT_NEAR(fit_representative(t, st, true).margin, 0.5, 1e-9);
}

TEST(Representative, Rejections) {
  const auto t = two_alternatives(0.7, 0.2);
  const std::vector<PreferenceStatement> tie = {{AlternativeId("a"), AlternativeId("b"), Relation::indifferent}};
  EXPECT_THROW(fit_representative(t, tie, true), InputError);
  const std::vector<PreferenceStatement> wrong = {{AlternativeId("b"), AlternativeId("a")}};
  EXPECT_THROW(fit_representative(t, wrong, true), InfeasibleError);
}

}  // namespace
}  // namespace prefsel
