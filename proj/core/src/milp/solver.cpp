#include "prefsel/milp/solver.hpp"

#include <cmath>
#include <limits>
#include <queue>

#include <fmt/format.h>

#include "dual_simplex.hpp"
#include "prefsel/error.hpp"

namespace prefsel::milp {

Solution solve_lp(const Problem& problem, const SolverOptions& options) {
  problem.validate();
  detail::DualSimplex simplex(problem, options);
  Solution out;
  out.status = simplex.solve();
  out.pivots = simplex.total_pivots();
  if (out.status == Status::optimal) {
    out.values = simplex.primal_values();
    out.objective_value = objective_value(problem, out.values);
  }
  return out;
}

namespace {

struct Node {
  std::vector<std::pair<int, double>> fixings;
  double bound = -std::numeric_limits<double>::infinity();
  int depth = 0;
  long seq = 0;
};

struct NodeOrder {
  // priority_queue pops the "largest"; the best node is the smallest bound,
  // then the deepest, then the earliest created.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq > b.seq;
  }
};

bool has_integral_objective(const Problem& problem) {
  for (const auto& t : problem.objective()) {
    if (problem.variable(t.var).kind != VarKind::binary) return false;
    if (t.coef != std::round(t.coef)) return false;
  }
  return true;
}

}  // namespace

Solution solve_milp(const Problem& problem, const SolverOptions& options) {
  problem.validate();
  std::vector<int> binaries;
  for (std::size_t j = 0; j < problem.num_variables(); ++j)
    if (problem.variable(static_cast<int>(j)).kind == VarKind::binary) binaries.push_back(static_cast<int>(j));
  if (binaries.empty()) {
    Solution s = solve_lp(problem, options);
    s.nodes_explored = 1;
    return s;
  }

  const double sign = problem.objective_sense() == ObjectiveSense::minimize ? 1.0 : -1.0;
  const bool integral = has_integral_objective(problem);
  const double obj_tol = options.tolerances.objective;
  const double int_tol = options.tolerances.integrality;

  detail::DualSimplex simplex(problem, options);
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_seq = 0;
  open.push(Node{{}, -std::numeric_limits<double>::infinity(), 0, next_seq++});

  double incumbent = std::numeric_limits<double>::infinity();
  std::vector<double> best;
  long nodes = 0;

  while (!open.empty()) {
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent - obj_tol) continue;
    if (nodes >= options.max_nodes)
      throw ResourceError(fmt::format("branch-and-bound node budget of {} exhausted", options.max_nodes));
    ++nodes;

    for (int b : binaries) simplex.set_bounds(b, problem.variable(b).lower, problem.variable(b).upper);
    for (const auto& [var, value] : node.fixings) simplex.set_bounds(var, value, value);
    if (simplex.solve() != Status::optimal) continue;

    const double value = sign * simplex.objective();
    const double bound = integral ? std::ceil(value - obj_tol) : value;
    if (bound >= incumbent - obj_tol) continue;

    auto x = simplex.primal_values();
    int branch = -1;
    double most = int_tol;
    for (int b : binaries) {
      const double v = x[static_cast<std::size_t>(b)];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > most) {
        most = frac;
        branch = b;
      }
    }
    if (branch < 0) {
      incumbent = value;
      best = std::move(x);
      continue;
    }
    for (double side : {1.0, 0.0}) {
      Node child{node.fixings, bound, node.depth + 1, next_seq++};
      child.fixings.emplace_back(branch, side);
      open.push(std::move(child));
    }
  }

  Solution out;
  out.nodes_explored = nodes;
  out.pivots = simplex.total_pivots();
  if (best.empty()) {
    out.status = Status::infeasible;
    return out;
  }
  out.status = Status::optimal;
  out.values = std::move(best);
  out.objective_value = objective_value(problem, out.values);
  return out;
}

}  // namespace prefsel::milp
