// Randomized, seeded checks of the selection and enumeration theory.

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "prefsel/analysis.hpp"
#include "prefsel/disaggregation.hpp"
#include "prefsel/error.hpp"
#include "support/case_study.hpp"

namespace prefsel {
namespace {

constexpr double kEps = kDefaultEpsilon;

struct Instance {
  PerformanceTable table;
  std::vector<PreferenceStatement> statements;
  CriteriaSet planted;
};

PerformanceTable random_table(std::mt19937& rng, std::size_t n, std::size_t m, int gamma, bool duplicate_row) {
  std::uniform_int_distribution<int> cell(0, 100);
  std::vector<std::vector<double>> scores(n, std::vector<double>(m));
  for (auto& row : scores)
    for (auto& v : row) v = cell(rng) / 100.0;
  if (duplicate_row && n > 1) scores.back() = scores.front();
  std::vector<CriterionSpec> criteria;
  for (std::size_t j = 0; j < m; ++j) {
    CriterionSpec c;
    c.id = CriterionId("c" + std::to_string(j));
    c.name = c.id.str();
    c.subintervals = gamma;
    criteria.push_back(c);
  }
  std::vector<AlternativeId> alternatives;
  for (std::size_t i = 0; i < n; ++i) alternatives.emplace_back("x" + std::to_string(i));
  return PerformanceTable(std::move(criteria), std::move(alternatives), std::move(scores));
}

CriteriaSet random_subset(std::mt19937& rng, std::size_t m, std::size_t max_size) {
  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), 0);
  std::shuffle(all.begin(), all.end(), rng);
  const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min(max_size, m))(rng);
  CriteriaSet s(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(s.begin(), s.end());
  return s;
}

/// Statements read off a hidden value function over a random criteria
/// subset, so a compatible function always exists.
Instance planted_instance(std::mt19937& rng, std::size_t n, std::size_t m, int gamma, std::size_t max_statements) {
  for (;;) {
    const bool duplicate = std::bernoulli_distribution(0.3)(rng);
    Instance inst{random_table(rng, n, m, gamma, duplicate), {}, random_subset(rng, m, 3)};
    std::uniform_real_distribution<double> piece(0.1, 1.0);
    std::vector<MarginalFunction> marginals(m, MarginalFunction{false, std::vector<double>(gamma, 0.0)});
    double total = 0.0;
    for (std::size_t j : inst.planted) {
      marginals[j].selected = true;
      for (auto& d : marginals[j].deltas) total += (d = piece(rng));
    }
    for (std::size_t j : inst.planted)
      for (auto& d : marginals[j].deltas) d /= total;
    const auto u = evaluate_all(ValueFunctionModel(marginals, kEps), inst.table);

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    if (duplicate)
      inst.statements.push_back({inst.table.alternative(0), inst.table.alternative(n - 1), Relation::indifferent});
    for (auto [a, b] : pairs) {
      if (inst.statements.size() >= max_statements) break;
      if (std::abs(u[a] - u[b]) < 2 * kEps) continue;
      if (u[a] < u[b]) std::swap(a, b);
      inst.statements.push_back({inst.table.alternative(a), inst.table.alternative(b), Relation::strict});
    }
    if (std::any_of(inst.statements.begin(), inst.statements.end(),
                    [](const auto& s) { return s.relation == Relation::strict; }))
      return inst;
  }
}

/// Statements oriented by a random total order: acyclic, so the slack model
/// can always absorb them, but usually not representable.
Instance ordered_instance(std::mt19937& rng, std::size_t n, std::size_t m, int gamma, std::size_t count) {
  Instance inst{random_table(rng, n, m, gamma, false), {}, {}};
  std::vector<std::size_t> rank(n);
  std::iota(rank.begin(), rank.end(), 0);
  std::shuffle(rank.begin(), rank.end(), rng);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  while (inst.statements.size() < count) {
    auto a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (rank[a] < rank[b]) std::swap(a, b);
    if (!seen.emplace(a, b).second) continue;
    inst.statements.push_back({inst.table.alternative(a), inst.table.alternative(b), Relation::strict});
  }
  return inst;
}

std::vector<CriteriaSet> all_subsets(std::size_t m) {
  std::vector<CriteriaSet> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    CriteriaSet s;
    for (std::size_t j = 0; j < m; ++j)
      if (mask >> j & 1U) s.push_back(j);
    out.push_back(std::move(s));
  }
  return out;
}

void expect_non_degenerate(const SelectionResult& r, const PerformanceTable& table) {
  ASSERT_FALSE(r.selected.empty());
  for (std::size_t j = 0; j < table.num_criteria(); ++j) {
    const auto& mf = r.vfm.marginal(j);
    const bool listed = std::find(r.selected.begin(), r.selected.end(), table.criterion(j).id) != r.selected.end();
    EXPECT_EQ(mf.selected, listed);
    if (mf.selected) {
      EXPECT_GE(mf.weight(), 1e-6) << table.criterion(j).id.str();
    } else {
      for (double d : mf.deltas) EXPECT_EQ(d, 0.0);
    }
  }
}

void expect_compatible(const ValueFunctionModel& vfm, const PerformanceTable& table,
                       std::span<const PreferenceStatement> statements) {
  for (const auto& st : statements) {
    const double a = evaluate(vfm, table, st.better);
    const double b = evaluate(vfm, table, st.other);
    if (st.relation == Relation::strict)
      EXPECT_GE(a, b + kEps - 1e-7) << to_string(st);
    else
      EXPECT_LE(std::abs(a - b), 1e-7) << to_string(st);
  }
}

bool supports(const Instance& inst, const CriteriaSet& s) {
  return is_supporting(inst.table, inst.statements, s, kEps);
}

TEST(MonotoneSupport, SupersetsOfSupportingSetsSupport) {
  std::mt19937 rng(1);
  int checks = 0;
  while (checks < 200) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(2, 7)(rng);
    const auto inst = planted_instance(rng, 7, m, std::uniform_int_distribution<int>(1, 3)(rng), 6);
    ASSERT_TRUE(supports(inst, inst.planted));
    for (int k = 0; k < 5; ++k, ++checks) {
      std::set<std::size_t> grown(inst.planted.begin(), inst.planted.end());
      for (std::size_t j = 0; j < m; ++j)
        if (std::bernoulli_distribution(0.5)(rng)) grown.insert(j);
      const CriteriaSet t(grown.begin(), grown.end());
      EXPECT_TRUE(supports(inst, t)) << "superset of size " << t.size();
    }
  }
}

TEST(Equivalence, MilpMatchesBestFixedSubset) {
  std::mt19937 rng(2);
  const double Cs[] = {0.5, 1.0, 5.0};
  const double ps[] = {0.0, 0.5, 2.0};
  int with_error = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(4, 7)(rng);
    const int gamma = std::uniform_int_distribution<int>(1, 3)(rng);
    const auto inst = trial % 2 == 0 ? ordered_instance(rng, n, m, gamma, 5) : planted_instance(rng, n, m, gamma, 6);
    SolveParams params;
    params.C = Cs[trial % 3];
    params.p = ps[(trial / 3) % 3];

    const auto milp = solve_selection(build_selection_inconsistent(inst.table, inst.statements, params));
    expect_non_degenerate(milp, inst.table);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : all_subsets(m)) {
      const auto fixed = solve_fixed_selection(inst.table, inst.statements, params, SelectionMode::inconsistent, s);
      ASSERT_TRUE(fixed) << "slack model is always feasible";
      best = std::min(best, fixed->objective);
    }
    EXPECT_NEAR(milp.objective, best, 1e-6) << "trial " << trial;
    if (milp.empirical_error > 1e-6) ++with_error;
  }
  EXPECT_GT(with_error, 0) << "no instance needed slack";
}

TEST(Equivalence, NoSubsetOfSameSizeFitsBetter) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
    const auto inst = ordered_instance(rng, 6, m, std::uniform_int_distribution<int>(1, 2)(rng), 6);
    SolveParams params;
    params.C = std::uniform_real_distribution<double>(0.2, 20.0)(rng);
    params.p = 0.0;
    const auto r = solve_selection(build_selection_inconsistent(inst.table, inst.statements, params));
    expect_non_degenerate(r, inst.table);
    for (const auto& s : all_subsets(m)) {
      if (s.size() != r.selected.size()) continue;
      const auto fixed = solve_fixed_selection(inst.table, inst.statements, params, SelectionMode::inconsistent, s);
      ASSERT_TRUE(fixed);
      EXPECT_GE(fixed->empirical_error, r.empirical_error - 1e-6);
    }
  }
}

TEST(ConsistentSelection, ResultsAreCompatibleAndNonDegenerate) {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(2, 7)(rng);
    const auto inst = planted_instance(rng, 8, m, std::uniform_int_distribution<int>(1, 3)(rng), 6);
    SolveParams params;
    params.p = std::uniform_real_distribution<double>(0.0, 50.0)(rng);
    const auto r = solve_selection(build_selection_consistent(inst.table, inst.statements, params));
    expect_non_degenerate(r, inst.table);
    expect_compatible(r.vfm, inst.table, inst.statements);
    if (params.p == 0.0) EXPECT_LE(r.selected.size(), inst.planted.size());

    // Ranking built from a compatible function respects every statement.
    const auto ranking = rank(r.vfm, inst.table);
    const auto group_of = [&](const AlternativeId& id) {
      for (std::size_t g = 0; g < ranking.groups.size(); ++g)
        if (std::find(ranking.groups[g].begin(), ranking.groups[g].end(), id) != ranking.groups[g].end()) return g;
      return ranking.groups.size();
    };
    for (const auto& st : inst.statements) {
      if (st.relation == Relation::strict)
        EXPECT_LT(group_of(st.better), group_of(st.other)) << to_string(st);
      else
        EXPECT_EQ(group_of(st.better), group_of(st.other)) << to_string(st);
    }
  }
}

TEST(Enumeration, MatchesBruteForceAndIsMinimal) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    const std::size_t n = std::uniform_int_distribution<std::size_t>(4, 8)(rng);
    const auto inst = planted_instance(rng, n, m, std::uniform_int_distribution<int>(1, 3)(rng), 6);
    SolveParams params;
    const auto found = enumerate_streamlined_supports(inst.table, inst.statements, params);
    const auto oracle = brute_force_supports(inst.table, inst.statements, params, 1);
    const std::set<CriteriaSet> a(found.family.begin(), found.family.end());
    const std::set<CriteriaSet> b(oracle.family.begin(), oracle.family.end());
    EXPECT_EQ(a, b) << "trial " << trial;
    EXPECT_EQ(a.size(), found.family.size()) << "no set is found twice";

    // Discovery is size-ordered.
    for (std::size_t k = 1; k < found.family.size(); ++k)
      EXPECT_LE(found.family[k - 1].size(), found.family[k].size());

    std::size_t total_size = 0;
    for (const auto& s : found.family) {
      total_size += s.size();
      EXPECT_TRUE(supports(inst, s));
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        CriteriaSet smaller = s;
        smaller.erase(smaller.begin() + static_cast<std::ptrdiff_t>(drop));
        EXPECT_FALSE(!smaller.empty() && supports(inst, smaller)) << "set is not minimal";
      }
      const auto fit = solve_fixed_selection(inst.table, inst.statements, params, SelectionMode::consistent, s);
      ASSERT_TRUE(fit);
      expect_non_degenerate(*fit, inst.table);
      expect_compatible(fit->vfm, inst.table, inst.statements);
      for (const auto& other : found.family)
        if (&other != &s)
          EXPECT_FALSE(std::includes(s.begin(), s.end(), other.begin(), other.end())) << "family is not an antichain";
    }

    // Relevance sums to the total set size; core and redundant follow.
    EXPECT_EQ(std::accumulate(found.relevance.begin(), found.relevance.end(), std::size_t{0}), total_size);
    for (std::size_t j = 0; j < m; ++j) {
      const bool in_all = std::all_of(found.family.begin(), found.family.end(),
                                      [&](const auto& s) { return std::binary_search(s.begin(), s.end(), j); });
      const bool in_none = std::none_of(found.family.begin(), found.family.end(),
                                        [&](const auto& s) { return std::binary_search(s.begin(), s.end(), j); });
      EXPECT_EQ(std::binary_search(found.core.begin(), found.core.end(), j), in_all);
      EXPECT_EQ(std::binary_search(found.redundant.begin(), found.redundant.end(), j), in_none);
    }
  }
}

// One extra statement on the case study: each solve either succeeds or
// proves infeasibility, never exhausts the simplex. The first two pairs once
// cycled on fully dual-degenerate node LPs.
TEST(SolverRobustness, CaseStudyExtensionsSolve) {
  const auto table = testing::supplier_table();
  SolveParams params;
  params.p = 10.0;
  std::vector<std::pair<int, int>> pairs = {{1, 9}, {2, 4}};
  std::mt19937 rng(6);
  std::uniform_int_distribution<int> pick(1, 10);
  while (pairs.size() < 22) {
    const int a = pick(rng), b = pick(rng);
    if (a != b) pairs.emplace_back(a, b);
  }
  int solved = 0;
  for (const auto& [a, b] : pairs) {
    auto st = testing::supplier_statements();
    st.push_back(testing::strict(a, b));
    for (auto mode : {SelectionMode::inconsistent, SelectionMode::consistent}) {
      try {
        const auto r = solve_selection(build_selection(table, st, params, mode));
        expect_non_degenerate(r, table);
        if (mode == SelectionMode::consistent) expect_compatible(r.vfm, table, st);
        ++solved;
      } catch (const InfeasibleError&) {
      }
    }
  }
  EXPECT_GT(solved, 0);
}

}  // namespace
}  // namespace prefsel
