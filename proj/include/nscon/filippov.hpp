#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "nscon/lp.hpp"
#include "nscon/piecewise.hpp"
#include "nscon/scenario.hpp"

namespace nscon {

/// One scalar nonlinearity fed by a linear functional of the state:
/// contributes weight * fn(c . x) to output component `target`.
struct StructureRow {
  PiecewiseScalarFn fn;
  Vec c;
  int target = 0;
  double weight = 1.0;
};

/// h(x) assembled from rows, with an optional outer per-node map for the
/// combined protocol: h_i(x) = outer_i( sum over rows targeting i ).
/// Every c annihilates the all-ones vector (relative-state coupling).
struct LinearArgumentStructure {
  int n = 0;
  std::vector<StructureRow> rows;
  std::vector<std::optional<PiecewiseScalarFn>> outer;  // nullopt = identity

  /// x' = f(-L x): one row per node, c = -(row i of L).
  static LinearArgumentStructure node_protocol(const Digraph& g,
                                               std::vector<PiecewiseScalarFn> fns);
  /// x'_i = sum_j a_ij g_ij(x_j - x_i): one row per directed edge.
  static LinearArgumentStructure edge_protocol(const Scenario& s);
  /// Picks the exact representation for a scenario; the combined case gets
  /// edge rows plus the node map as outer function.
  static LinearArgumentStructure for_scenario(const Scenario& s);

  /// h(x) by direct pointwise evaluation (point-value semantics).
  Vec eval(const Vec& x) const;
};

/// Finite vertex set whose convex hull represents F[h](x). Redundant or
/// interior points may be retained; membership queries do not care.
struct FilippovPolytope {
  int dim = 0;
  std::vector<Vec> vertices;
};

/// Sign per discontinuity-active row: +1 approaches the breakpoint from
/// above, -1 from below.
struct SignPattern {
  std::vector<std::int8_t> signs;  // aligned with the active-row list
};

/// Rows whose argument sits within tol of one of their breakpoints
/// (rows with c = 0 never activate: their argument cannot move).
std::vector<int> active_rows(const LinearArgumentStructure& s, const Vec& x, double tol);

/// True iff some direction d with |d|_inf <= 1 satisfies
/// sign_k * (c_k . d) >= margin for every active row; decided by LP.
/// Patterns whose approach cone has empty interior are rejected, which is
/// exactly the measure-zero exclusion in the set-valued map.
bool pattern_feasible(const LinearArgumentStructure& s, const std::vector<int>& active,
                      const SignPattern& pattern, double margin = 1e-6);

/// Exact vertex enumeration over feasible sign patterns. Exact whenever the
/// active functions have constant one-sided limits near the breakpoint (all
/// instances here); otherwise it is the closure of directional limits.
/// Throws BudgetExceeded (n > 12 or more than 16 active rows) or
/// NestedDiscontinuity (outer and inner map active at once).
FilippovPolytope filippov_set(const LinearArgumentStructure& s, const Vec& x,
                              double tol = 1e-9);

/// point in conv(vertices), via phase-one LP with absolute tolerance.
bool hull_contains(const FilippovPolytope& p, const Vec& point, double tol = 1e-9);

/// { eta : eta * ones in conv(vertices) } as [lo, hi]; nullopt when the hull
/// misses the consensus line entirely.
std::optional<std::pair<double, double>> sliding_range(const FilippovPolytope& p);

}  // namespace nscon
