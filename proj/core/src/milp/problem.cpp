#include "prefsel/milp/problem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

#include <fmt/format.h>

#include "prefsel/error.hpp"

namespace prefsel::milp {

int Problem::add_variable(std::string name, double lower, double upper, VarKind kind) {
  const int index = static_cast<int>(variables_.size());
  if (name.empty()) name = fmt::format("x{}", index);
  if (!by_name_.emplace(name, index).second) throw InputError(fmt::format("duplicate variable name {}", name));
  variables_.push_back({std::move(name), lower, upper, kind});
  return index;
}

namespace {

std::vector<Term> merge_terms(std::vector<Term> terms) {
  std::map<int, double> merged;
  for (const auto& t : terms) merged[t.var] += t.coef;
  std::vector<Term> out;
  out.reserve(merged.size());
  for (const auto& [var, coef] : merged)
    if (coef != 0.0) out.push_back({var, coef});
  return out;
}

}  // namespace

void Problem::add_constraint(std::vector<Term> terms, Sense sense, double rhs, std::string group) {
  constraints_.push_back({merge_terms(std::move(terms)), sense, rhs, std::move(group)});
}

void Problem::set_objective(std::vector<Term> terms, ObjectiveSense sense) {
  objective_ = merge_terms(std::move(terms));
  objective_sense_ = sense;
}

void Problem::set_bounds(int var, double lower, double upper) {
  auto& v = variables_.at(static_cast<std::size_t>(var));
  v.lower = lower;
  v.upper = upper;
}

std::size_t Problem::num_binaries() const {
  return static_cast<std::size_t>(
      std::count_if(variables_.begin(), variables_.end(), [](const auto& v) { return v.kind == VarKind::binary; }));
}

std::size_t Problem::count_group(std::string_view group) const {
  return static_cast<std::size_t>(
      std::count_if(constraints_.begin(), constraints_.end(), [&](const auto& c) { return c.group == group; }));
}

std::optional<int> Problem::find_variable(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

int Problem::variable_index(const std::string& name) const {
  if (auto v = find_variable(name)) return *v;
  throw InputError(fmt::format("unknown variable {}", name));
}

Problem Problem::relaxed() const {
  Problem copy = *this;
  for (auto& v : copy.variables_) v.kind = VarKind::continuous;
  return copy;
}

void Problem::validate() const {
  for (const auto& v : variables_) {
    if (!std::isfinite(v.lower) || !std::isfinite(v.upper))
      throw InputError(fmt::format("variable {} must have finite bounds", v.name));
    if (v.lower > v.upper)
      throw InputError(fmt::format("variable {} has crossed bounds [{}, {}]", v.name, v.lower, v.upper));
    if (v.kind == VarKind::binary && (v.lower < 0.0 || v.upper > 1.0))
      throw InputError(fmt::format("binary variable {} has bounds outside [0,1]", v.name));
  }
  const auto n = static_cast<int>(variables_.size());
  auto check_terms = [&](std::span<const Term> terms, const std::string& where) {
    for (const auto& t : terms) {
      if (t.var < 0 || t.var >= n) throw InputError(fmt::format("{} references unknown variable {}", where, t.var));
      if (!std::isfinite(t.coef)) throw InputError(fmt::format("{} has a non-finite coefficient", where));
    }
  };
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    check_terms(constraints_[i].terms, fmt::format("constraint {}", i));
    if (!std::isfinite(constraints_[i].rhs)) throw InputError(fmt::format("constraint {} has a non-finite rhs", i));
  }
  check_terms(objective_, "objective");
}

std::string to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
  }
  return "unknown";
}

SolverOptions options_from_environment(SolverOptions base) {
  if (const char* env = std::getenv("PREFSEL_MAX_NODES")) {
    char* end = nullptr;
    const long nodes = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || nodes <= 0)
      throw InputError(fmt::format("PREFSEL_MAX_NODES must be a positive integer, got '{}'", env));
    base.max_nodes = nodes;
  }
  return base;
}

double objective_value(const Problem& problem, std::span<const double> values) {
  double sum = 0.0;
  for (const auto& t : problem.objective()) sum += t.coef * values[static_cast<std::size_t>(t.var)];
  return sum;
}

double activity(const Constraint& constraint, std::span<const double> values) {
  double sum = 0.0;
  for (const auto& t : constraint.terms) sum += t.coef * values[static_cast<std::size_t>(t.var)];
  return sum;
}

std::vector<Violation> verify_solution(const Problem& problem, const Solution& solution, const Tolerances& tol) {
  std::vector<Violation> out;
  if (solution.status != Status::optimal) return out;
  if (solution.values.size() != problem.num_variables()) {
    out.push_back({Violation::Kind::bound, 0, static_cast<double>(problem.num_variables()),
                   fmt::format("assignment has {} values for {} variables", solution.values.size(),
                               problem.num_variables())});
    return out;
  }
  const auto constraints = problem.constraints();
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& c = constraints[i];
    const double lhs = activity(c, solution.values);
    double excess = 0.0;
    switch (c.sense) {
      case Sense::less_equal: excess = lhs - c.rhs; break;
      case Sense::greater_equal: excess = c.rhs - lhs; break;
      case Sense::equal: excess = std::abs(lhs - c.rhs); break;
    }
    if (excess > tol.feasibility)
      out.push_back({Violation::Kind::constraint, i, excess,
                     fmt::format("constraint {}{} violated by {:.3g}", i, c.group.empty() ? "" : " [" + c.group + "]",
                                 excess)});
  }
  const auto vars = problem.variables();
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const double x = solution.values[j];
    const double excess = std::max(vars[j].lower - x, x - vars[j].upper);
    if (excess > tol.feasibility)
      out.push_back({Violation::Kind::bound, j, excess,
                     fmt::format("variable {} outside [{}, {}] by {:.3g}", vars[j].name, vars[j].lower,
                                 vars[j].upper, excess)});
    if (vars[j].kind == VarKind::binary) {
      const double frac = std::min(std::abs(x), std::abs(1.0 - x));
      if (frac > tol.integrality)
        out.push_back({Violation::Kind::integrality, j, frac,
                       fmt::format("binary variable {} = {} is fractional", vars[j].name, x)});
    }
  }
  return out;
}

namespace {

std::string lp_name(const std::string& name) {
  std::string out = name;
  for (char& ch : out)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.')) ch = '_';
  if (!out.empty() && (std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.')) out.insert(0, "v");
  return out;
}

void write_terms(std::ostream& out, const Problem& problem, std::span<const Term> terms) {
  if (terms.empty()) {
    out << " 0 " << lp_name(problem.variable(0).name);
    return;
  }
  bool first = true;
  for (const auto& t : terms) {
    const double c = t.coef;
    out << (c < 0 ? " - " : (first ? " " : " + ")) << fmt::format("{:.17g}", std::abs(c)) << ' '
        << lp_name(problem.variable(t.var).name);
    first = false;
  }
}

}  // namespace

void write_lp(const Problem& problem, std::ostream& out) {
  out << "\\ written by prefsel\n";
  out << (problem.objective_sense() == ObjectiveSense::minimize ? "Minimize\n" : "Maximize\n");
  out << " obj:";
  if (problem.num_variables() > 0) write_terms(out, problem, problem.objective());
  out << "\nSubject To\n";
  const auto constraints = problem.constraints();
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& c = constraints[i];
    out << ' ' << (c.group.empty() ? "c" : lp_name(c.group) + "_") << i << ':';
    write_terms(out, problem, c.terms);
    const char* op = c.sense == Sense::less_equal ? "<=" : c.sense == Sense::equal ? "=" : ">=";
    out << ' ' << op << ' ' << fmt::format("{:.17g}", c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : problem.variables())
    out << ' ' << fmt::format("{:.17g}", v.lower) << " <= " << lp_name(v.name) << " <= "
        << fmt::format("{:.17g}", v.upper) << '\n';
  bool any_binary = false;
  for (const auto& v : problem.variables()) {
    if (v.kind != VarKind::binary) continue;
    if (!any_binary) out << "Binaries\n";
    any_binary = true;
    out << ' ' << lp_name(v.name) << '\n';
  }
  out << "End\n";
}

}  // namespace prefsel::milp
