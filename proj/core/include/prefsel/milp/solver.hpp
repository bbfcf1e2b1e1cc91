#pragma once

#include "prefsel/milp/problem.hpp"

namespace prefsel::milp {

/// Optimal basic solution of the LP relaxation (binaries relaxed to [0,1]).
/// Deterministic for a fixed problem. Throws NumericalError when the pivot
/// budget runs out.
Solution solve_lp(const Problem& problem, const SolverOptions& options = {});

/// Globally optimal solution by best-bound branch-and-bound over the binary
/// variables: branch on the most fractional binary (lowest index on ties),
/// 1-branch first. Throws ResourceError when the node budget runs out.
Solution solve_milp(const Problem& problem, const SolverOptions& options = {});

/// Pluggable solver behind the same contract as solve_milp.
class Solver {
 public:
  virtual ~Solver() = default;
  virtual Solution solve(const Problem& problem) const = 0;
};

class BuiltinSolver final : public Solver {
 public:
  explicit BuiltinSolver(SolverOptions options = {}) : options_(options) {}
  Solution solve(const Problem& problem) const override { return solve_milp(problem, options_); }
  const SolverOptions& options() const noexcept { return options_; }

 private:
  SolverOptions options_;
};

}  // namespace prefsel::milp
