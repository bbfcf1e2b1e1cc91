#include "prefsel/disaggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "prefsel/error.hpp"

namespace prefsel {

using milp::ObjectiveSense;
using milp::Problem;
using milp::Sense;
using milp::Term;

void SolveParams::validate() const {
  if (!std::isfinite(C) || C < 0.0) throw InputError(fmt::format("C must be a non-negative number, got {}", C));
  if (!std::isfinite(p) || p < 0.0) throw InputError(fmt::format("p must be a non-negative number, got {}", p));
  if (!std::isfinite(epsilon) || epsilon <= 0.0)
    throw InputError(fmt::format("epsilon must be positive, got {}", epsilon));
  if (rho != 0.0) throw InputError("rho is fixed at 0");
  if (max_selected && *max_selected < 1)
    throw InputError(fmt::format("max_selected must be at least 1, got {}", *max_selected));
  if (gamma && *gamma < 1) throw InputError(fmt::format("gamma must be at least 1, got {}", *gamma));
  for (const auto& [id, g] : gamma_by_criterion)
    if (g < 1) throw InputError(fmt::format("gamma for {} must be at least 1, got {}", id.str(), g));
}

PerformanceTable apply_breakpoints(const PerformanceTable& table, const SolveParams& params) {
  PerformanceTable out = params.gamma ? table.with_subintervals(*params.gamma) : table;
  if (!params.gamma_by_criterion.empty()) out = out.with_subintervals(params.gamma_by_criterion);
  return out;
}

std::string to_string(SelectionMode mode) {
  return mode == SelectionMode::consistent ? "consistent" : "inconsistent";
}

namespace {

constexpr double kSelectedThreshold = 0.5;
constexpr double kWeightFloor = 1e-9;

// Slack bound: for fixed u the cheapest repair never needs more than this.
double sigma_bound(std::size_t n_reference, std::size_t n_statements, double epsilon) {
  return static_cast<double>(n_reference) * (1.0 + static_cast<double>(n_statements) * epsilon);
}

std::vector<int> add_columns(Problem& problem, const std::string& prefix, const CriterionSpec& c) {
  std::vector<int> cols;
  for (int s = 0; s < c.subintervals; ++s)
    cols.push_back(problem.add_variable(fmt::format("{}_{}_{}", prefix, c.id.str(), s + 1), 0.0, 1.0));
  return cols;
}

void add_sigma(Problem& problem, const PerformanceTable& table, const std::vector<std::size_t>& reference,
               std::size_t n_statements, double epsilon, std::vector<int>& sp, std::vector<int>& sm) {
  const double bound = sigma_bound(reference.size(), n_statements, epsilon);
  for (std::size_t i : reference) {
    sp.push_back(problem.add_variable("sp_" + table.alternative(i).str(), 0.0, bound));
    sm.push_back(problem.add_variable("sm_" + table.alternative(i).str(), 0.0, bound));
  }
}

// One row per statement on sum_j <cols_j, A_j(a)> (+ slack terms). Criteria
// with no columns are left out. A `margin` column replaces the constant
// epsilon on strict rows.
void add_statement_rows(Problem& problem, const PerformanceTable& table,
                        std::span<const PreferenceStatement> statements, const std::vector<std::vector<int>>& cols,
                        const std::vector<std::size_t>& reference, const std::vector<int>& sp,
                        const std::vector<int>& sm, double epsilon, int margin = -1) {
  auto position = [&](std::size_t i) {
    return static_cast<std::size_t>(std::find(reference.begin(), reference.end(), i) - reference.begin());
  };
  for (const auto& st : statements) {
    const std::size_t a = table.alternative_index(st.better);
    const std::size_t b = table.alternative_index(st.other);
    std::vector<Term> terms;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].empty()) continue;
      const auto ca = table.interpolation(a, j);
      const auto cb = table.interpolation(b, j);
      for (std::size_t s = 0; s < cols[j].size(); ++s) terms.push_back({cols[j][s], ca[s] - cb[s]});
    }
    if (!sp.empty()) {
      const std::size_t pa = position(a);
      const std::size_t pb = position(b);
      terms.push_back({sp[pa], 1.0});
      terms.push_back({sm[pa], -1.0});
      terms.push_back({sp[pb], -1.0});
      terms.push_back({sm[pb], 1.0});
    }
    if (st.relation == Relation::indifferent) {
      problem.add_constraint(std::move(terms), Sense::equal, 0.0, "EAR");
    } else if (margin >= 0) {
      terms.push_back({margin, -1.0});
      problem.add_constraint(std::move(terms), Sense::greater_equal, 0.0, "EAR");
    } else {
      problem.add_constraint(std::move(terms), Sense::greater_equal, epsilon, "EAR");
    }
  }
}

void add_normalization(Problem& problem, const std::vector<std::vector<int>>& cols) {
  std::vector<Term> terms;
  for (const auto& c : cols)
    for (int v : c) terms.push_back({v, 1.0});
  problem.add_constraint(std::move(terms), Sense::equal, 1.0, "NC");
}

void add_slope_rows(Problem& problem, const std::vector<std::vector<int>>& cols, int phi) {
  for (const auto& c : cols)
    for (std::size_t s = 0; s + 1 < c.size(); ++s) {
      problem.add_constraint({{c[s + 1], 1.0}, {c[s], -1.0}, {phi, -1.0}}, Sense::less_equal, 0.0, "SC");
      problem.add_constraint({{c[s], 1.0}, {c[s + 1], -1.0}, {phi, -1.0}}, Sense::less_equal, 0.0, "SC");
    }
}

std::vector<double> column_values(const std::vector<int>& cols, const std::vector<double>& x) {
  std::vector<double> out;
  for (int v : cols) out.push_back(x[static_cast<std::size_t>(v)]);
  return out;
}

std::map<AlternativeId, AlternativeError> slack_values(const PerformanceTable& table,
                                                       const std::vector<std::size_t>& reference,
                                                       const std::vector<int>& sp, const std::vector<int>& sm,
                                                       const std::vector<double>& x, double& total) {
  std::map<AlternativeId, AlternativeError> out;
  total = 0.0;
  for (std::size_t r = 0; r < sp.size(); ++r) {
    AlternativeError e{x[static_cast<std::size_t>(sp[r])], x[static_cast<std::size_t>(sm[r])]};
    total += e.over + e.under;
    out[table.alternative(reference[r])] = e;
  }
  return out;
}

struct Readout {
  const PerformanceTable* table = nullptr;
  const std::vector<std::size_t>* reference = nullptr;
  const std::vector<int>* sp = nullptr;
  const std::vector<int>* sm = nullptr;
  std::vector<std::vector<int>> du;
  std::vector<std::vector<int>> z;
  std::vector<bool> selected;
  SolveParams params;
  SelectionMode mode = SelectionMode::consistent;
};

SelectionResult read_solution(const Readout& r, const std::vector<double>& x, long nodes) {
  const auto& table = *r.table;
  SelectionResult out;
  out.nodes_explored = nodes;
  std::vector<MarginalFunction> marginals;
  double phi = 0.0;
  for (std::size_t j = 0; j < table.num_criteria(); ++j) {
    const auto gamma = static_cast<std::size_t>(table.criterion(j).subintervals);
    auto raw = r.du[j].empty() ? std::vector<double>(gamma, 0.0) : column_values(r.du[j], x);
    out.raw_deltas.push_back(raw);
    out.z_values.push_back(r.z.empty() ? (r.selected[j] ? raw : std::vector<double>(gamma, 0.0))
                                       : column_values(r.z[j], x));
    MarginalFunction m;
    m.selected = r.selected[j];
    m.deltas.assign(gamma, 0.0);
    if (m.selected) {
      out.selected.push_back(table.criterion(j).id);
      for (std::size_t s = 0; s < gamma; ++s) m.deltas[s] = std::max(0.0, raw[s]);
      for (std::size_t s = 0; s + 1 < gamma; ++s) phi = std::max(phi, std::abs(m.deltas[s + 1] - m.deltas[s]));
    }
    marginals.push_back(std::move(m));
  }
  out.vfm = ValueFunctionModel(std::move(marginals), r.params.epsilon);
  out.phi = phi;
  out.per_alternative_errors = slack_values(table, *r.reference, *r.sp, *r.sm, x, out.empirical_error);
  const double c_term = r.mode == SelectionMode::inconsistent ? r.params.C * out.empirical_error : 0.0;
  out.objective = c_term + r.params.p * out.phi + static_cast<double>(out.selected.size());
  return out;
}

// Keeps the continuous part of the objective at its optimum and minimizes
// phi. Returns the new point, or the old one if the re-solve fails.
std::vector<double> least_phi(Problem problem, const std::vector<double>& x, int phi,
                              const milp::SolverOptions& options) {
  std::vector<Term> continuous;
  double value = 0.0;
  for (const auto& t : problem.objective()) {
    if (problem.variable(t.var).kind == milp::VarKind::binary) continue;
    continuous.push_back(t);
    value += t.coef * x[static_cast<std::size_t>(t.var)];
  }
  for (std::size_t j = 0; j < problem.num_variables(); ++j) {
    const int v = static_cast<int>(j);
    if (problem.variable(v).kind != milp::VarKind::binary) continue;
    const double fixed = x[j] > kSelectedThreshold ? 1.0 : 0.0;
    problem.set_bounds(v, fixed, fixed);
  }
  if (!continuous.empty())
    problem.add_constraint(continuous, Sense::less_equal, value + 1e-7 * (1.0 + std::abs(value)), "CANON");
  problem.set_objective({{phi, 1.0}}, ObjectiveSense::minimize);
  const auto s = milp::solve_milp(problem, options);
  return s.optimal() ? s.values : x;
}

// All criteria take part; those left with no weight are reported as not
// selected so the model stays non-degenerate.
MarginalFunction active_marginal(std::vector<double> deltas) {
  MarginalFunction f{false, std::move(deltas)};
  for (double& d : f.deltas) d = std::max(0.0, d);
  f.selected = f.weight() > kWeightFloor;
  if (!f.selected) std::fill(f.deltas.begin(), f.deltas.end(), 0.0);
  return f;
}

void require_statements(std::span<const PreferenceStatement> statements) {
  if (statements.empty()) throw InputError("selection models need at least one preference statement");
}

}  // namespace

UtaModel build_uta(const PerformanceTable& table, std::span<const PreferenceStatement> statements, double epsilon) {
  if (!(epsilon > 0.0)) throw InputError(fmt::format("epsilon must be positive, got {}", epsilon));
  validate_statements(table, statements);
  UtaModel m;
  for (const auto& c : table.criteria()) m.du.push_back(add_columns(m.problem, "du", c));
  m.reference = reference_set(table, statements);
  add_sigma(m.problem, table, m.reference, statements.size(), epsilon, m.sigma_plus, m.sigma_minus);
  add_normalization(m.problem, m.du);
  add_statement_rows(m.problem, table, statements, m.du, m.reference, m.sigma_plus, m.sigma_minus, epsilon);
  std::vector<Term> objective;
  for (std::size_t r = 0; r < m.sigma_plus.size(); ++r) {
    objective.push_back({m.sigma_plus[r], 1.0});
    objective.push_back({m.sigma_minus[r], 1.0});
  }
  m.problem.set_objective(std::move(objective), ObjectiveSense::minimize);
  return m;
}

UtaResult solve_uta(const PerformanceTable& table, std::span<const PreferenceStatement> statements, double epsilon,
                    const milp::SolverOptions& options) {
  const UtaModel m = build_uta(table, statements, epsilon);
  const auto s = milp::solve_lp(m.problem, options);
  UtaResult out;
  if (!s.optimal()) {
    out.feasible = false;
    out.f_star = std::numeric_limits<double>::infinity();
    out.vfm = ValueFunctionModel::zero(table);
    return out;
  }
  out.feasible = true;
  std::vector<MarginalFunction> marginals;
  for (const auto& cols : m.du) {
    marginals.push_back(active_marginal(column_values(cols, s.values)));
  }
  out.vfm = ValueFunctionModel(std::move(marginals), epsilon);
  out.errors = slack_values(table, m.reference, m.sigma_plus, m.sigma_minus, s.values, out.f_star);
  return out;
}

ConsistencyResult check_consistency(const PerformanceTable& table, std::span<const PreferenceStatement> statements,
                                    double epsilon, const milp::SolverOptions& options) {
  if (statements.empty()) return {true, 0.0};
  const auto r = solve_uta(table, statements, epsilon, options);
  return {r.feasible && r.f_star <= kConsistencyTolerance, r.f_star};
}

SelectionModel build_selection(const PerformanceTable& table, std::span<const PreferenceStatement> statements,
                               const SolveParams& params, SelectionMode mode) {
  params.validate();
  require_statements(statements);
  SelectionModel m;
  m.mode = mode;
  m.table = apply_breakpoints(table, params);
  m.statements.assign(statements.begin(), statements.end());
  m.params = params;
  validate_statements(m.table, statements);

  Problem& p = m.problem;
  for (const auto& c : m.table.criteria()) m.du.push_back(add_columns(p, "du", c));
  for (const auto& c : m.table.criteria()) m.z.push_back(add_columns(p, "z", c));
  for (const auto& c : m.table.criteria()) m.delta.push_back(p.add_binary("delta_" + c.id.str()));
  m.phi = p.add_variable("phi", 0.0, 1.0);
  m.reference = reference_set(m.table, statements);
  if (mode == SelectionMode::inconsistent)
    add_sigma(p, m.table, m.reference, statements.size(), params.epsilon, m.sigma_plus, m.sigma_minus);

  add_normalization(p, m.z);
  add_slope_rows(p, m.du, m.phi);
  add_statement_rows(p, m.table, statements, m.z, m.reference, m.sigma_plus, m.sigma_minus, params.epsilon);
  for (std::size_t j = 0; j < m.z.size(); ++j) {
    const int d = m.delta[j];
    for (std::size_t s = 0; s < m.z[j].size(); ++s) {
      const int z = m.z[j][s];
      const int u = m.du[j][s];
      p.add_constraint({{z, 1.0}, {u, -1.0}}, Sense::less_equal, 0.0, "LC");
      p.add_constraint({{z, 1.0}, {u, -1.0}, {d, -1.0}}, Sense::greater_equal, -1.0, "LC");
      p.add_constraint({{z, 1.0}, {d, -1.0}}, Sense::less_equal, 0.0, "LC");
    }
  }
  if (params.max_selected) {
    std::vector<Term> terms;
    for (int d : m.delta) terms.push_back({d, 1.0});
    p.add_constraint(std::move(terms), Sense::less_equal, *params.max_selected, "CARD");
  }

  std::vector<Term> objective;
  for (std::size_t r = 0; r < m.sigma_plus.size(); ++r) {
    objective.push_back({m.sigma_plus[r], params.C});
    objective.push_back({m.sigma_minus[r], params.C});
  }
  objective.push_back({m.phi, params.p});
  for (int d : m.delta) objective.push_back({d, 1.0});
  p.set_objective(std::move(objective), ObjectiveSense::minimize);
  return m;
}

SelectionModel build_selection_inconsistent(const PerformanceTable& table,
                                            std::span<const PreferenceStatement> statements,
                                            const SolveParams& params) {
  return build_selection(table, statements, params, SelectionMode::inconsistent);
}

SelectionModel build_selection_consistent(const PerformanceTable& table,
                                          std::span<const PreferenceStatement> statements,
                                          const SolveParams& params) {
  return build_selection(table, statements, params, SelectionMode::consistent);
}

SelectionResult solve_selection(const SelectionModel& model, const milp::SolverOptions& options) {
  const auto s = milp::solve_milp(model.problem, options);
  if (!s.optimal()) {
    if (model.mode == SelectionMode::consistent)
      throw InfeasibleError("preference statements are inconsistent: no criteria subset supports them");
    throw InfeasibleError("preference statements contain a strict cycle that no slack can repair");
  }
  const auto x = least_phi(model.problem, s.values, model.phi, options);
  Readout r;
  r.table = &model.table;
  r.reference = &model.reference;
  r.sp = &model.sigma_plus;
  r.sm = &model.sigma_minus;
  r.du = model.du;
  r.z = model.z;
  for (int d : model.delta) r.selected.push_back(x[static_cast<std::size_t>(d)] > kSelectedThreshold);
  r.params = model.params;
  r.mode = model.mode;
  return read_solution(r, x, s.nodes_explored);
}

std::optional<SelectionResult> solve_fixed_selection(const PerformanceTable& input,
                                                     std::span<const PreferenceStatement> statements,
                                                     const SolveParams& params, SelectionMode mode,
                                                     std::span<const std::size_t> subset,
                                                     const milp::SolverOptions& options) {
  params.validate();
  const PerformanceTable table = apply_breakpoints(input, params);
  validate_statements(table, statements);
  Readout r;
  r.table = &table;
  r.params = params;
  r.mode = mode;
  r.selected.assign(table.num_criteria(), false);
  for (std::size_t j : subset) {
    if (j >= table.num_criteria()) throw InputError(fmt::format("criterion index {} out of range", j));
    r.selected[j] = true;
  }
  Problem p;
  r.du.resize(table.num_criteria());
  for (std::size_t j = 0; j < table.num_criteria(); ++j)
    if (r.selected[j]) r.du[j] = add_columns(p, "du", table.criterion(j));
  const int phi = p.add_variable("phi", 0.0, 1.0);
  const auto reference = reference_set(table, statements);
  std::vector<int> sp, sm;
  if (mode == SelectionMode::inconsistent) add_sigma(p, table, reference, statements.size(), params.epsilon, sp, sm);
  r.reference = &reference;
  r.sp = &sp;
  r.sm = &sm;
  add_normalization(p, r.du);
  add_slope_rows(p, r.du, phi);
  add_statement_rows(p, table, statements, r.du, reference, sp, sm, params.epsilon);

  std::vector<Term> objective;
  for (std::size_t k = 0; k < sp.size(); ++k) {
    objective.push_back({sp[k], params.C});
    objective.push_back({sm[k], params.C});
  }
  objective.push_back({phi, objective.empty() ? 1.0 : params.p});
  p.set_objective(std::move(objective), ObjectiveSense::minimize);
  const auto s = milp::solve_lp(p, options);
  if (!s.optimal()) return std::nullopt;
  const auto x = sp.empty() ? s.values : least_phi(p, s.values, phi, options);
  return read_solution(r, x, 1);
}

RepresentativeResult fit_representative(const PerformanceTable& table,
                                        std::span<const PreferenceStatement> statements, bool epsilon_as_variable,
                                        double epsilon, const milp::SolverOptions& options) {
  validate_statements(table, statements);
  const auto strict = std::count_if(statements.begin(), statements.end(),
                                    [](const auto& s) { return s.relation == Relation::strict; });
  if (strict == 0) throw InputError("a representative value function needs at least one strict statement");
  if (!epsilon_as_variable && !(epsilon > 0.0))
    throw InputError(fmt::format("epsilon must be positive, got {}", epsilon));

  Problem p;
  std::vector<std::vector<int>> du;
  for (const auto& c : table.criteria()) du.push_back(add_columns(p, "du", c));
  const int margin = epsilon_as_variable ? p.add_variable("epsilon", 0.0, 1.0) : -1;
  add_normalization(p, du);
  add_statement_rows(p, table, statements, du, {}, {}, {}, epsilon, margin);

  std::vector<Term> objective;
  if (epsilon_as_variable) {
    objective.push_back({margin, 1.0});
  } else {
    for (const auto& st : statements) {
      if (st.relation != Relation::strict) continue;
      const std::size_t a = table.alternative_index(st.better);
      const std::size_t b = table.alternative_index(st.other);
      for (std::size_t j = 0; j < du.size(); ++j) {
        const auto ca = table.interpolation(a, j);
        const auto cb = table.interpolation(b, j);
        for (std::size_t s = 0; s < du[j].size(); ++s) objective.push_back({du[j][s], ca[s] - cb[s]});
      }
    }
  }
  p.set_objective(std::move(objective), ObjectiveSense::maximize);
  const auto s = milp::solve_lp(p, options);
  if (!s.optimal() || (epsilon_as_variable && s.value(margin) <= milp::Tolerances{}.feasibility))
    throw InfeasibleError("no value function over all criteria is compatible with the statements");

  std::vector<MarginalFunction> marginals;
  for (const auto& cols : du) {
    marginals.push_back(active_marginal(column_values(cols, s.values)));
  }
  RepresentativeResult out;
  out.vfm = ValueFunctionModel(std::move(marginals), epsilon_as_variable ? s.value(margin) : epsilon);
  out.margin = std::numeric_limits<double>::infinity();
  for (const auto& st : statements)
    if (st.relation == Relation::strict)
      out.margin = std::min(out.margin, evaluate(out.vfm, table, st.better) - evaluate(out.vfm, table, st.other));
  return out;
}

ModelSize model_size(const SelectionModel& model) {
  ModelSize size;
  std::size_t z_count = 0;
  for (const auto& z : model.z) z_count += z.size();
  std::size_t du_count = 0;
  for (const auto& du : model.du) du_count += du.size();
  size.binaries = model.delta.size();
  size.variables = model.delta.size() + du_count + model.z.size();
  // The lower link rho*delta <= z is a bound (rho = 0) but counts as a row.
  size.constraints = model.problem.count_group("LC") + z_count + model.problem.count_group("SC") / 2 +
                     model.problem.count_group("EAR");
  return size;
}

}  // namespace prefsel
