#include "dual_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "prefsel/error.hpp"

namespace prefsel::milp::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kRelativePivotTol = 1e-7;
constexpr double kDropTol = 1e-14;
constexpr double kResidualTol = 1e-9;
constexpr long kRefactorInterval = 400;

}  // namespace

DualSimplex::DualSimplex(const Problem& problem, const SolverOptions& options) : options_(options) {
  rows_ = problem.num_constraints();
  structurals_ = problem.num_variables();
  columns_ = structurals_ + rows_;

  lo_.resize(columns_);
  hi_.resize(columns_);
  cost_.assign(columns_, 0.0);
  for (std::size_t j = 0; j < structurals_; ++j) {
    lo_[j] = problem.variable(static_cast<int>(j)).lower;
    hi_[j] = problem.variable(static_cast<int>(j)).upper;
  }
  objective_sign_ = problem.objective_sense() == ObjectiveSense::minimize ? 1.0 : -1.0;
  for (const auto& t : problem.objective()) cost_[static_cast<std::size_t>(t.var)] += objective_sign_ * t.coef;

  matrix_rows_.reserve(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto& c = problem.constraints()[i];
    matrix_rows_.push_back(c.terms);
    const std::size_t s = structurals_ + i;
    switch (c.sense) {
      case Sense::less_equal: lo_[s] = -kInf; hi_[s] = c.rhs; break;
      case Sense::greater_equal: lo_[s] = c.rhs; hi_[s] = kInf; break;
      case Sense::equal: lo_[s] = c.rhs; hi_[s] = c.rhs; break;
    }
  }
  cold_start();
}

void DualSimplex::set_bounds(int var, double lower, double upper) {
  lo_[static_cast<std::size_t>(var)] = lower;
  hi_[static_cast<std::size_t>(var)] = upper;
}

void DualSimplex::cold_start() {
  tableau_.assign(rows_ * columns_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double* row = &tableau_[i * columns_];
    for (const auto& t : matrix_rows_[i]) row[static_cast<std::size_t>(t.var)] = -t.coef;
    row[structurals_ + i] = 1.0;
  }
  basis_.resize(rows_);
  row_of_.assign(columns_, -1);
  for (std::size_t i = 0; i < rows_; ++i) {
    basis_[i] = static_cast<int>(structurals_ + i);
    row_of_[structurals_ + i] = static_cast<int>(i);
  }
  at_upper_.assign(columns_, 0);
  x_.assign(columns_, 0.0);
  recompute_reduced_costs();
  pivots_since_refactor_ = 0;
}

void DualSimplex::recompute_reduced_costs() {
  reduced_ = cost_;
  for (std::size_t i = 0; i < rows_; ++i) {
    const double cb = cost_[static_cast<std::size_t>(basis_[i])];
    if (cb == 0.0) continue;
    const double* row = &tableau_[i * columns_];
    for (std::size_t j = 0; j < columns_; ++j)
      if (row[j] != 0.0) reduced_[j] -= cb * row[j];
  }
  for (int b : basis_) reduced_[static_cast<std::size_t>(b)] = 0.0;
}

// Puts every nonbasic column on the bound its reduced cost asks for.
// Returns false when a one-sided column has a reduced cost of the wrong sign.
bool DualSimplex::place_nonbasic() {
  bool dual_feasible = true;
  for (std::size_t j = 0; j < columns_; ++j) {
    if (row_of_[j] >= 0) continue;
    const double d = reduced_[j];
    const bool has_lo = std::isfinite(lo_[j]);
    const bool has_hi = std::isfinite(hi_[j]);
    if (has_lo && has_hi) {
      if (lo_[j] == hi_[j]) {
        at_upper_[j] = 0;
      } else if (d < -kDualTol) {
        at_upper_[j] = 1;
      } else if (d > kDualTol) {
        at_upper_[j] = 0;
      }
      x_[j] = at_upper_[j] ? hi_[j] : lo_[j];
    } else if (has_lo) {
      at_upper_[j] = 0;
      x_[j] = lo_[j];
      if (d < -kDualTol) dual_feasible = false;
    } else if (has_hi) {
      at_upper_[j] = 1;
      x_[j] = hi_[j];
      if (d > kDualTol) dual_feasible = false;
    } else {
      at_upper_[j] = 0;
      x_[j] = 0.0;
      if (std::abs(d) > kDualTol) dual_feasible = false;
    }
  }
  return dual_feasible;
}

void DualSimplex::recompute_basic_values() {
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < columns_; ++j)
    if (row_of_[j] < 0 && x_[j] != 0.0) active.push_back(j);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* row = &tableau_[i * columns_];
    double v = 0.0;
    for (std::size_t j : active) v -= row[j] * x_[j];
    x_[static_cast<std::size_t>(basis_[i])] = v;
  }
}

void DualSimplex::refactor() {
  std::vector<double> m(rows_ * columns_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double* row = &m[i * columns_];
    for (const auto& t : matrix_rows_[i]) row[static_cast<std::size_t>(t.var)] = t.coef;
    row[structurals_ + i] = -1.0;
  }
  std::vector<char> assigned(rows_, 0);
  std::vector<int> new_basis(rows_, -1);
  for (std::size_t k = 0; k < rows_; ++k) {
    const auto c = static_cast<std::size_t>(basis_[k]);
    std::size_t best = rows_;
    double best_abs = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (assigned[i]) continue;
      const double a = std::abs(m[i * columns_ + c]);
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best == rows_ || best_abs < 1e-11) {
      // Singular basis: fall back to the slack basis, which is always valid.
      cold_start();
      return;
    }
    assigned[best] = 1;
    new_basis[best] = static_cast<int>(c);
    double* prow = &m[best * columns_];
    const double inv = 1.0 / prow[c];
    std::vector<std::size_t> nz;
    for (std::size_t j = 0; j < columns_; ++j) {
      if (prow[j] == 0.0) continue;
      prow[j] *= inv;
      nz.push_back(j);
    }
    prow[c] = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == best) continue;
      double* row = &m[i * columns_];
      const double f = row[c];
      if (f == 0.0) continue;
      for (std::size_t j : nz) {
        row[j] -= f * prow[j];
        if (std::abs(row[j]) < kDropTol) row[j] = 0.0;
      }
      row[c] = 0.0;
    }
  }
  tableau_ = std::move(m);
  basis_ = std::move(new_basis);
  std::fill(row_of_.begin(), row_of_.end(), -1);
  for (std::size_t i = 0; i < rows_; ++i) row_of_[static_cast<std::size_t>(basis_[i])] = static_cast<int>(i);
  recompute_reduced_costs();
  pivots_since_refactor_ = 0;
}

int DualSimplex::choose_leaving_row() const {
  int chosen = -1;
  double worst = kPrimalTol;
  int chosen_col = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto b = static_cast<std::size_t>(basis_[i]);
    const double infeas = std::max(lo_[b] - x_[b], x_[b] - hi_[b]);
    if (!(infeas > kPrimalTol)) continue;
    if (bland_) {
      if (basis_[i] < chosen_col) {
        chosen_col = basis_[i];
        chosen = static_cast<int>(i);
      }
    } else if (infeas > worst) {
      worst = infeas;
      chosen = static_cast<int>(i);
    }
  }
  return chosen;
}

int DualSimplex::choose_entering_column(int row, bool below) const {
  const double* t = &tableau_[static_cast<std::size_t>(row) * columns_];
  // Moving x_j in its feasible direction must push the leaving variable
  // towards the violated bound.
  const auto eligible = [&](std::size_t j) {
    if (row_of_[j] >= 0 || lo_[j] == hi_[j]) return false;
    const double a = t[j];
    if (std::abs(a) <= kPivotTol) return false;
    const bool up = !at_upper_[j];
    return below ? (up ? a < 0 : a > 0) : (up ? a > 0 : a < 0);
  };
  double max_abs = 0.0;
  for (std::size_t j = 0; j < columns_; ++j)
    if (eligible(j)) max_abs = std::max(max_abs, std::abs(t[j]));
  if (max_abs == 0.0) return -1;
  // Pivots much smaller than the row's largest entry are numerically unsafe.
  const double floor_abs = std::max(kPivotTol, kRelativePivotTol * max_abs);

  // Harris pass 1: the largest step that keeps every reduced cost within
  // the dual tolerance of feasibility.
  double bound = kInf;
  for (std::size_t j = 0; j < columns_; ++j) {
    if (!eligible(j) || std::abs(t[j]) < floor_abs) continue;
    bound = std::min(bound, (std::abs(reduced_[j]) + kDualTol) / std::abs(t[j]));
  }
  if (!std::isfinite(bound)) return -1;

  // Pass 2: among columns within that step, the largest pivot. Under the
  // anti-cycling rule the lowest index wins instead.
  int chosen = -1;
  double best_abs = 0.0;
  for (std::size_t j = 0; j < columns_; ++j) {
    if (!eligible(j) || std::abs(t[j]) < floor_abs) continue;
    const double a = std::abs(t[j]);
    if (std::abs(reduced_[j]) / a > bound) continue;
    if (bland_) return static_cast<int>(j);
    if (a > best_abs) {
      best_abs = a;
      chosen = static_cast<int>(j);
    }
  }
  return chosen;
}

void DualSimplex::pivot(int row, int col, bool leaving_to_upper) {
  const auto r = static_cast<std::size_t>(row);
  const auto q = static_cast<std::size_t>(col);
  const auto leave = static_cast<std::size_t>(basis_[r]);
  double* prow = &tableau_[r * columns_];
  const double alpha = prow[q];
  const double target = leaving_to_upper ? hi_[leave] : lo_[leave];

  const double step = (x_[leave] - target) / alpha;
  x_[q] += step;
  for (std::size_t i = 0; i < rows_; ++i) {
    const double a = tableau_[i * columns_ + q];
    if (a != 0.0) x_[static_cast<std::size_t>(basis_[i])] -= a * step;
  }
  x_[leave] = target;

  const double inv = 1.0 / alpha;
  std::vector<std::size_t> nz;
  nz.reserve(64);
  for (std::size_t j = 0; j < columns_; ++j) {
    if (prow[j] == 0.0) continue;
    prow[j] *= inv;
    if (std::abs(prow[j]) < kDropTol) {
      prow[j] = 0.0;
      continue;
    }
    nz.push_back(j);
  }
  prow[q] = 1.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i == r) continue;
    double* trow = &tableau_[i * columns_];
    const double f = trow[q];
    if (f == 0.0) continue;
    for (std::size_t j : nz) {
      trow[j] -= f * prow[j];
      if (std::abs(trow[j]) < kDropTol) trow[j] = 0.0;
    }
    trow[q] = 0.0;
  }
  const double dq = reduced_[q];
  if (dq != 0.0)
    for (std::size_t j : nz) reduced_[j] -= dq * prow[j];
  reduced_[q] = 0.0;

  basis_[r] = col;
  row_of_[q] = row;
  row_of_[leave] = -1;
  at_upper_[leave] = leaving_to_upper ? 1 : 0;
  at_upper_[q] = 0;
  ++pivots_since_refactor_;
  ++total_pivots_;
}

double DualSimplex::max_residual() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double lhs = 0.0;
    for (const auto& t : matrix_rows_[i]) lhs += t.coef * x_[static_cast<std::size_t>(t.var)];
    worst = std::max(worst, std::abs(lhs - x_[structurals_ + i]));
  }
  return worst;
}

double DualSimplex::internal_objective() const {
  double v = 0.0;
  for (std::size_t j = 0; j < structurals_; ++j) v += cost_[j] * x_[j];
  return v;
}

Status DualSimplex::solve() {
  long pivots_this_solve = 0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    if (!place_nonbasic()) {
      cold_start();
      place_nonbasic();
    }
    recompute_basic_values();
    bland_ = false;
    int stall = 0;
    double last_objective = internal_objective();
    bool fresh = pivots_since_refactor_ == 0;

    for (;;) {
      if (pivots_this_solve >= options_.max_pivots_per_lp)
        throw NumericalError(fmt::format("simplex pivot budget of {} exhausted", options_.max_pivots_per_lp));
      if (pivots_since_refactor_ >= kRefactorInterval) {
        refactor();
        if (!place_nonbasic()) {
          cold_start();
          place_nonbasic();
        }
        recompute_basic_values();
        fresh = true;
      }
      const int r = choose_leaving_row();
      if (r < 0) break;
      const auto leaving = static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)]);
      const bool below = x_[leaving] < lo_[leaving];
      const int q = choose_entering_column(r, below);
      if (q < 0) {
        if (!fresh) {
          refactor();
          if (!place_nonbasic()) {
            cold_start();
            place_nonbasic();
          }
          recompute_basic_values();
          fresh = true;
          continue;
        }
        return Status::infeasible;
      }
      pivot(r, q, !below);
      fresh = false;
      ++pivots_this_solve;

      const double obj = internal_objective();
      if (obj > last_objective + 1e-12 * (1.0 + std::abs(last_objective))) {
        stall = 0;
      } else if (++stall > options_.stall_threshold) {
        bland_ = true;
      }
      last_objective = obj;
    }

    recompute_basic_values();
    recompute_reduced_costs();
    const bool dual_ok = place_nonbasic();
    recompute_basic_values();
    if (dual_ok && max_residual() <= kResidualTol && choose_leaving_row() < 0) return Status::optimal;
    refactor();
  }
  throw NumericalError("simplex failed to certify an optimal basis after refactorization");
}

std::vector<double> DualSimplex::primal_values() const {
  return {x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(structurals_)};
}

double DualSimplex::objective() const { return objective_sign_ * internal_objective(); }

}  // namespace prefsel::milp::detail
