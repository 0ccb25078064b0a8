#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "nscon/linalg.hpp"

namespace nscon {

enum class Rel { Le, Ge, Eq };

struct LpConstraint {
  Vec coef;
  Rel rel = Rel::Le;
  double rhs = 0.0;
};

/// Small dense LP: min obj . x subject to constraints and per-variable
/// bounds lower[i] <= x[i] <= upper[i] (upper may be +inf, lower must be
/// finite). Two-phase simplex with Bland's rule, so the pivot sequence is
/// deterministic and cannot cycle.
struct LpProblem {
  int nvars = 0;
  std::vector<LpConstraint> constraints;
  Vec lower;  // size nvars
  Vec upper;  // size nvars, +inf allowed

  explicit LpProblem(int n)
      : nvars(n), lower(n, 0.0), upper(n, std::numeric_limits<double>::infinity()) {}

  void add(Vec coef, Rel rel, double rhs) { constraints.push_back({std::move(coef), rel, rhs}); }
};

struct LpSolution {
  Vec x;
  double objective = 0.0;
};

/// Feasible point, or nullopt. Residual tolerance is absolute on the
/// phase-one infeasibility sum.
std::optional<Vec> lp_find_feasible(const LpProblem& p, double tol = 1e-9);

/// Optimum of min obj.x, or nullopt when infeasible. The feasible set must
/// be bounded in the objective direction (all uses here are).
std::optional<LpSolution> lp_minimize(const LpProblem& p, const Vec& obj, double tol = 1e-9);

/// Strictly feasible witness for a margin-relaxed inequality system on a
/// box, or nullopt. Constraints are interpreted exactly as given.
std::optional<Vec> lp_feasible(const std::vector<LpConstraint>& constraints, const Vec& lower,
                               const Vec& upper, double tol = 1e-9);

}  // namespace nscon
