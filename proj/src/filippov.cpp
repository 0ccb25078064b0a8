#include "nscon/filippov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nscon/errors.hpp"

namespace nscon {

namespace {

bool is_zero_vec(const Vec& v) { return norm_inf(v) == 0.0; }

double row_argument(const StructureRow& r, const Vec& x) { return dot(r.c, x); }

// Feasibility of an approach cone: exists d in the unit box with
// sign_k * (c_k . d) >= margin for every listed functional.
bool cone_feasible(const std::vector<const Vec*>& cs, const std::vector<int>& signs, int n,
                   double margin) {
  std::vector<LpConstraint> cons;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    Vec coef = *cs[k];
    for (double& v : coef) v *= signs[k];
    cons.push_back({std::move(coef), Rel::Ge, margin});
  }
  return lp_feasible(cons, Vec(n, -1.0), Vec(n, 1.0)).has_value();
}

}  // namespace

LinearArgumentStructure LinearArgumentStructure::node_protocol(
    const Digraph& g, std::vector<PiecewiseScalarFn> fns) {
  if (static_cast<int>(fns.size()) != g.size())
    throw ConfigError("need one node function per node");
  LinearArgumentStructure s;
  s.n = g.size();
  const Mat l = build_laplacian(g);
  for (int i = 0; i < s.n; ++i) {
    Vec c = l.row(i);
    for (double& v : c) v = -v;
    s.rows.push_back({std::move(fns[i]), std::move(c), i, 1.0});
  }
  s.outer.assign(s.n, std::nullopt);
  return s;
}

LinearArgumentStructure LinearArgumentStructure::edge_protocol(const Scenario& scn) {
  LinearArgumentStructure s;
  s.n = scn.size();
  for (int i = 0; i < s.n; ++i) {
    for (int j = 0; j < s.n; ++j) {
      const double w = scn.graph.weight(i, j);
      if (!(w > 0.0)) continue;
      Vec c(s.n, 0.0);
      c[j] = 1.0;
      c[i] = -1.0;
      s.rows.push_back({scn.edge_fn(i, j), std::move(c), i, w});
    }
  }
  s.outer.assign(s.n, std::nullopt);
  return s;
}

LinearArgumentStructure LinearArgumentStructure::for_scenario(const Scenario& scn) {
  if (scn.all_edge_fns_identity())
    return node_protocol(scn.graph, scn.node_fns);
  LinearArgumentStructure s = edge_protocol(scn);
  if (scn.all_node_fns_identity()) return s;
  for (int i = 0; i < s.n; ++i)
    if (!scn.node_fns[i].is_identity()) s.outer[i] = scn.node_fns[i];
  return s;
}

Vec LinearArgumentStructure::eval(const Vec& x) const {
  Vec sums(n, 0.0);
  for (const auto& r : rows) sums[r.target] += r.weight * r.fn.eval(row_argument(r, x));
  for (int i = 0; i < n; ++i)
    if (outer[i]) sums[i] = outer[i]->eval(sums[i]);
  return sums;
}

std::vector<int> active_rows(const LinearArgumentStructure& s, const Vec& x, double tol) {
  if (!(tol > 0.0)) throw ConfigError("activity tolerance must be positive");
  std::vector<int> act;
  for (std::size_t k = 0; k < s.rows.size(); ++k) {
    const auto& r = s.rows[k];
    if (is_zero_vec(r.c)) continue;  // frozen argument, pointwise value applies
    if (r.fn.breakpoint_near(row_argument(r, x), tol) >= 0) act.push_back(static_cast<int>(k));
  }
  return act;
}

bool pattern_feasible(const LinearArgumentStructure& s, const std::vector<int>& active,
                      const SignPattern& pattern, double margin) {
  if (pattern.signs.size() != active.size())
    throw ConfigError("pattern must cover exactly the active rows");
  std::vector<const Vec*> cs;
  std::vector<int> signs;
  for (std::size_t k = 0; k < active.size(); ++k) {
    cs.push_back(&s.rows[active[k]].c);
    signs.push_back(pattern.signs[k] >= 0 ? 1 : -1);
  }
  return cone_feasible(cs, signs, s.n, margin);
}

FilippovPolytope filippov_set(const LinearArgumentStructure& s, const Vec& x, double tol) {
  if (static_cast<int>(x.size()) != s.n) throw ConfigError("state dimension mismatch");
  if (s.n > 12)
    throw BudgetExceeded("exact set computation limited to n <= 12, got n = " +
                         std::to_string(s.n));

  struct RowPlan {
    bool frozen = false;   // c == 0: pointwise value
    bool active = false;
    double fixed = 0.0;    // value when not enumerated
    double left = 0.0;     // one-sided limits when enumerated
    double right = 0.0;
  };
  std::vector<RowPlan> plan(s.rows.size());
  std::vector<int> enumerated;  // indices into s.rows
  std::vector<bool> node_has_active_inner(s.n, false);

  for (std::size_t k = 0; k < s.rows.size(); ++k) {
    const auto& r = s.rows[k];
    const double arg = row_argument(r, x);
    RowPlan& p = plan[k];
    if (is_zero_vec(r.c)) {
      p.frozen = true;
      p.fixed = r.fn.eval(arg);  // constant map: the point value is the value
      continue;
    }
    const int bp = r.fn.breakpoint_near(arg, tol);
    if (bp < 0) {
      p.fixed = r.fn.one_sided_limits(arg).first;
      continue;
    }
    const double b = r.fn.breakpoints()[bp];
    const auto [l, rgt] = r.fn.one_sided_limits(b);
    p.active = true;
    p.left = l;
    p.right = rgt;
    enumerated.push_back(static_cast<int>(k));
    node_has_active_inner[r.target] = true;
  }

  // Outer maps: decide per node how the assembled sum is transformed.
  struct OuterPlan {
    enum class Kind { None, Apply, FixedValue, Virtual } kind = Kind::None;
    double fixed = 0.0;
    double left = 0.0, right = 0.0;  // virtual-row limits
    Vec c;                            // virtual-row approach functional
  };
  std::vector<OuterPlan> outer_plan(s.n);

  for (int i = 0; i < s.n; ++i) {
    if (!s.outer[i]) continue;
    const PiecewiseScalarFn& f = *s.outer[i];
    OuterPlan& op = outer_plan[i];
    op.kind = OuterPlan::Kind::Apply;
    if (node_has_active_inner[i]) continue;  // checked per pattern during assembly

    // Inner sum is fixed at this state; evaluate it and its gradient.
    double u = 0.0;
    Vec grad(s.n, 0.0);
    bool varies = false;
    for (std::size_t k = 0; k < s.rows.size(); ++k) {
      const auto& r = s.rows[k];
      if (r.target != i) continue;
      const double arg = row_argument(r, x);
      if (plan[k].frozen) {
        u += r.weight * plan[k].fixed;
        continue;
      }
      varies = true;
      u += r.weight * plan[k].fixed;
      const double slope = r.fn.derivative(arg);
      for (int j = 0; j < s.n; ++j) grad[j] += r.weight * slope * r.c[j];
    }
    if (!varies) {
      op.kind = OuterPlan::Kind::FixedValue;
      op.fixed = f.eval(u);  // argument frozen: pointwise semantics
      continue;
    }
    const int bp = f.breakpoint_near(u, tol);
    if (bp < 0) {
      op.kind = OuterPlan::Kind::Apply;  // continuous at u, applied with limit semantics
      continue;
    }
    const double b = f.breakpoints()[bp];
    const auto [l, r] = f.one_sided_limits(b);
    if (l == r) {
      op.kind = OuterPlan::Kind::FixedValue;  // kink: value is determined
      op.fixed = l;
      continue;
    }
    if (is_zero_vec(grad) || norm_inf(grad) < 1e-12)
      throw NestedDiscontinuity(
          "outer map active at node " + std::to_string(i + 1) +
          " but the inner sum has a vanishing gradient; approach directions are not "
          "linear-functional-determined");
    op.kind = OuterPlan::Kind::Virtual;
    op.left = l;
    op.right = r;
    op.c = grad;
  }

  std::vector<int> virtual_nodes;
  for (int i = 0; i < s.n; ++i)
    if (outer_plan[i].kind == OuterPlan::Kind::Virtual) virtual_nodes.push_back(i);

  const std::size_t slots = enumerated.size() + virtual_nodes.size();
  if (slots > 16)
    throw BudgetExceeded("exact set computation limited to 16 active rows, got " +
                         std::to_string(slots));

  // Pattern enumeration: a slot per active row, then one per virtual node.
  std::vector<const Vec*> slot_c;
  for (int k : enumerated) slot_c.push_back(&s.rows[k].c);
  for (int i : virtual_nodes) slot_c.push_back(&outer_plan[i].c);

  FilippovPolytope poly;
  poly.dim = s.n;

  std::vector<int> signs(slots, 0);
  const std::size_t npat = std::size_t{1} << slots;
  for (std::size_t mask = 0; mask < npat; ++mask) {
    for (std::size_t k = 0; k < slots; ++k) signs[k] = (mask >> k) & 1 ? 1 : -1;
    if (slots > 0 && !cone_feasible(slot_c, signs, s.n, 1e-6)) continue;

    Vec sums(s.n, 0.0);
    for (std::size_t k = 0; k < s.rows.size(); ++k) {
      const auto& r = s.rows[k];
      double value;
      if (plan[k].active) {
        const auto pos = std::find(enumerated.begin(), enumerated.end(), static_cast<int>(k));
        const std::size_t slot = pos - enumerated.begin();
        value = signs[slot] > 0 ? plan[k].right : plan[k].left;
      } else {
        value = plan[k].fixed;
      }
      sums[r.target] += r.weight * value;
    }

    Vec vertex(s.n, 0.0);
    for (int i = 0; i < s.n; ++i) {
      switch (outer_plan[i].kind) {
        case OuterPlan::Kind::None:
          vertex[i] = sums[i];
          break;
        case OuterPlan::Kind::FixedValue:
          vertex[i] = outer_plan[i].fixed;
          break;
        case OuterPlan::Kind::Apply: {
          // Only reachable with inner rows active; the outer map must stay
          // continuous at the assembled sum or the composition is nested.
          const PiecewiseScalarFn& f = *s.outer[i];
          const int bp = f.breakpoint_near(sums[i], tol);
          if (bp >= 0 && f.jump_at(bp) > 0.0)
            throw NestedDiscontinuity(
                "outer and inner maps are both discontinuity-active at node " +
                std::to_string(i + 1));
          vertex[i] = bp >= 0 ? f.one_sided_limits(f.breakpoints()[bp]).first
                              : f.one_sided_limits(sums[i]).first;
          break;
        }
        case OuterPlan::Kind::Virtual: {
          const auto pos = std::find(virtual_nodes.begin(), virtual_nodes.end(), i);
          const std::size_t slot = enumerated.size() + (pos - virtual_nodes.begin());
          vertex[i] = signs[slot] > 0 ? outer_plan[i].right : outer_plan[i].left;
          break;
        }
      }
    }
    poly.vertices.push_back(std::move(vertex));
  }

  std::sort(poly.vertices.begin(), poly.vertices.end());
  poly.vertices.erase(std::unique(poly.vertices.begin(), poly.vertices.end()),
                      poly.vertices.end());
  if (poly.vertices.empty())
    throw NestedDiscontinuity("no feasible approach pattern at this state");
  return poly;
}

bool hull_contains(const FilippovPolytope& p, const Vec& point, double tol) {
  if (static_cast<int>(point.size()) != p.dim) throw ConfigError("point dimension mismatch");
  const int m = static_cast<int>(p.vertices.size());
  const int n = p.dim;

  // Elastic L1 projection: minimize the coordinate residual of representing
  // the point as a convex combination. Signed slacks are essential -- the
  // tolerance must forgive small violations on either side, which a plain
  // phase-one feasibility probe cannot express.
  LpProblem lp(m + 2 * n);  // lambda, then u (positive slack), v (negative slack)
  for (int i = 0; i < n; ++i) {
    Vec coef(m + 2 * n, 0.0);
    for (int v = 0; v < m; ++v) coef[v] = p.vertices[v][i];
    coef[m + i] = 1.0;
    coef[m + n + i] = -1.0;
    lp.add(std::move(coef), Rel::Eq, point[i]);
  }
  {
    Vec coef(m + 2 * n, 0.0);
    for (int v = 0; v < m; ++v) coef[v] = 1.0;
    lp.add(std::move(coef), Rel::Eq, 1.0);
  }
  Vec obj(m + 2 * n, 0.0);
  for (int i = 0; i < 2 * n; ++i) obj[m + i] = 1.0;
  const auto sol = lp_minimize(lp, obj);
  return sol && sol->objective <= tol * (1.0 + norm1(point));
}

std::optional<std::pair<double, double>> sliding_range(const FilippovPolytope& p) {
  const int m = static_cast<int>(p.vertices.size());
  double bound = 1.0;
  for (const Vec& v : p.vertices) bound = std::max(bound, norm_inf(v));
  bound += 1.0;

  // vars: lambda (m, capped implicitly by the sum constraint), eta+ and eta-
  LpProblem lp(m + 2);
  lp.upper[m] = bound;
  lp.upper[m + 1] = bound;
  for (int i = 0; i < p.dim; ++i) {
    Vec coef(m + 2, 0.0);
    for (int v = 0; v < m; ++v) coef[v] = p.vertices[v][i];
    coef[m] = -1.0;
    coef[m + 1] = 1.0;
    lp.add(std::move(coef), Rel::Eq, 0.0);
  }
  {
    Vec coef(m + 2, 0.0);
    for (int v = 0; v < m; ++v) coef[v] = 1.0;
    lp.add(std::move(coef), Rel::Eq, 1.0);
  }

  Vec obj(m + 2, 0.0);
  obj[m] = 1.0;
  obj[m + 1] = -1.0;
  const auto lo = lp_minimize(lp, obj);
  if (!lo) return std::nullopt;
  for (double& v : obj) v = -v;
  const auto hi = lp_minimize(lp, obj);
  return std::make_pair(lo->objective, -hi->objective);
}

}  // namespace nscon
