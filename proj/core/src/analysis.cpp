#include "prefsel/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "prefsel/error.hpp"

namespace prefsel {

using milp::ObjectiveSense;
using milp::Problem;
using milp::Sense;
using milp::Term;

std::vector<CriterionId> criterion_ids(const PerformanceTable& table, const CriteriaSet& set) {
  std::vector<CriterionId> out;
  for (std::size_t j : set) out.push_back(table.criterion(j).id);
  return out;
}

void summarize(SupportAnalysis& a) {
  const std::size_t m = a.criteria.size();
  a.relevance.assign(m, 0);
  for (const auto& set : a.family)
    for (std::size_t j : set) ++a.relevance[j];
  a.core.clear();
  a.redundant.clear();
  for (std::size_t j = 0; j < m; ++j) {
    if (!a.family.empty() && a.relevance[j] == static_cast<int>(a.family.size())) a.core.push_back(j);
    if (a.relevance[j] == 0) a.redundant.push_back(j);
  }
}

SupportAnalysis enumerate_streamlined_supports(const PerformanceTable& input,
                                               std::span<const PreferenceStatement> statements,
                                               const SolveParams& params, const EnumerationOptions& options) {
  SolveParams sp = params;
  sp.p = 0.0;
  SelectionModel model = build_selection_consistent(input, statements, sp);
  const std::size_t m = model.delta.size();

  SupportAnalysis out;
  for (const auto& c : model.table.criteria()) out.criteria.push_back(c.id);
  out.gamma_used = params.gamma.value_or(m > 0 ? model.table.criterion(0).subintervals : 0);
  out.epsilon_used = params.epsilon;

  const std::size_t max_cuts = options.max_cuts.value_or(10 * (std::size_t{1} << std::min<std::size_t>(m, 40)));
  while (true) {
    const auto s = milp::solve_milp(model.problem, options.solver);
    if (!s.optimal()) break;
    CriteriaSet set;
    for (std::size_t j = 0; j < m; ++j)
      if (s.value(model.delta[j]) > 0.5) set.push_back(j);
    if (out.family.size() >= max_cuts)
      throw ResourceError(fmt::format("support enumeration exceeded its budget of {} cuts", max_cuts));
    std::vector<Term> cut;
    for (std::size_t j : set) cut.push_back({model.delta[j], 1.0});
    model.problem.add_constraint(std::move(cut), Sense::less_equal, static_cast<double>(set.size()) - 1.0, "CUT");

    double phi = 0.0;
    if (options.compute_phi) {
      const auto fixed = solve_fixed_selection(input, statements, sp, SelectionMode::consistent, set, options.solver);
      phi = fixed ? fixed->phi : std::numeric_limits<double>::quiet_NaN();
    }
    out.family.push_back(set);
    out.phi.push_back(phi);
    if (options.on_set) options.on_set(out.family.back(), out.family.size() - 1);
  }
  if (out.family.empty())
    throw InfeasibleError("preference statements are inconsistent: no supporting criteria set exists");
  summarize(out);
  return out;
}

bool is_supporting(const PerformanceTable& table, std::span<const PreferenceStatement> statements,
                   const CriteriaSet& subset, double epsilon, const milp::SolverOptions& options) {
  if (subset.empty()) return false;
  Problem p;
  std::vector<std::vector<int>> cols(table.num_criteria());
  std::vector<Term> total;
  for (std::size_t j : subset)
    for (int s = 0; s < table.criterion(j).subintervals; ++s) {
      cols[j].push_back(p.add_variable(fmt::format("du_{}_{}", j, s), 0.0, 1.0));
      total.push_back({cols[j].back(), 1.0});
    }
  p.add_constraint(std::move(total), Sense::equal, 1.0);
  for (const auto& st : statements) {
    const std::size_t a = table.alternative_index(st.better);
    const std::size_t b = table.alternative_index(st.other);
    std::vector<Term> row;
    for (std::size_t j : subset) {
      const auto ca = table.interpolation(a, j);
      const auto cb = table.interpolation(b, j);
      for (std::size_t s = 0; s < cols[j].size(); ++s) row.push_back({cols[j][s], ca[s] - cb[s]});
    }
    if (st.relation == Relation::strict)
      p.add_constraint(std::move(row), Sense::greater_equal, epsilon);
    else
      p.add_constraint(std::move(row), Sense::equal, 0.0);
  }
  p.set_objective({}, ObjectiveSense::minimize);
  return milp::solve_lp(p, options).optimal();
}

BruteForceSupports brute_force_supports(const PerformanceTable& input,
                                        std::span<const PreferenceStatement> statements, const SolveParams& params,
                                        unsigned threads, const milp::SolverOptions& options) {
  params.validate();
  const PerformanceTable table = apply_breakpoints(input, params);
  validate_statements(table, statements);
  const std::size_t m = table.num_criteria();
  if (m > kBruteForceMaxCriteria)
    throw InputError(fmt::format("brute force over {} criteria exceeds the limit of {}", m, kBruteForceMaxCriteria));

  const std::size_t count = std::size_t{1} << m;
  std::vector<char> feasible(count, 0);
  std::atomic<std::size_t> next{1};
  auto work = [&] {
    for (std::size_t mask = next++; mask < count; mask = next++) {
      CriteriaSet set;
      for (std::size_t j = 0; j < m; ++j)
        if (mask >> j & 1U) set.push_back(j);
      feasible[mask] = is_supporting(table, statements, set, params.epsilon, options) ? 1 : 0;
    }
  };
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  // below[mask]: some proper nonempty subset of mask is feasible.
  std::vector<char> below(count, 0);
  for (std::size_t mask = 1; mask < count; ++mask)
    for (std::size_t j = 0; j < m && !below[mask]; ++j) {
      if (!(mask >> j & 1U)) continue;
      const std::size_t sub = mask & ~(std::size_t{1} << j);
      if (sub != 0 && (feasible[sub] || below[sub])) below[mask] = 1;
    }

  BruteForceSupports out;
  out.feasible.assign(feasible.begin(), feasible.end());
  for (std::size_t mask = 1; mask < count; ++mask) {
    if (!feasible[mask] || below[mask]) continue;
    CriteriaSet set;
    for (std::size_t j = 0; j < m; ++j)
      if (mask >> j & 1U) set.push_back(j);
    out.family.push_back(std::move(set));
  }
  std::sort(out.family.begin(), out.family.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

RelevanceReport relevance_report(const SupportAnalysis& analysis) {
  if (analysis.family.empty()) throw InputError("relevance needs at least one supporting criteria set");
  SupportAnalysis a = analysis;
  summarize(a);
  RelevanceReport r;
  r.criteria = a.criteria;
  r.relevance = a.relevance;
  r.core = a.core;
  r.redundant = a.redundant;
  r.best_score = -1;
  for (std::size_t k = 0; k < a.family.size(); ++k) {
    int score = 0;
    for (std::size_t j : a.family[k]) score += a.relevance[j];
    if (score > r.best_score) {
      r.best_score = score;
      r.best_members.clear();
    }
    if (score == r.best_score) r.best_members.push_back(k);
  }
  return r;
}

Ranking rank(const ValueFunctionModel& vfm, const PerformanceTable& table) {
  Ranking r;
  const auto scores = evaluate_all(vfm, table);
  std::vector<std::size_t> order(table.num_alternatives());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double leader = 0.0;
  for (std::size_t i : order) {
    if (r.groups.empty() || leader - scores[i] > kTieTolerance) {
      r.groups.emplace_back();
      leader = scores[i];
    }
    r.groups.back().push_back(table.alternative(i));
  }
  r.alternatives.assign(table.alternatives().begin(), table.alternatives().end());
  r.scores = scores;
  return r;
}

std::string to_string(const Ranking& ranking) {
  std::string out;
  for (std::size_t g = 0; g < ranking.groups.size(); ++g) {
    if (g > 0) out += " > ";
    for (std::size_t k = 0; k < ranking.groups[g].size(); ++k) {
      if (k > 0) out += " ~ ";
      out += ranking.groups[g][k].str();
    }
  }
  return out;
}

}  // namespace prefsel
