#pragma once

// Deterministic random instances shared by the unit and acceptance suites.
// Everything is driven by a caller-owned mt19937 so runs are reproducible.

#include <algorithm>
#include <cassert>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "nscon/analysis.hpp"
#include "nscon/filippov.hpp"
#include "nscon/graph.hpp"
#include "nscon/scenario.hpp"

namespace testgen {

using namespace nscon;

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Sign-preserving pool. Jumps at the origin are kept symmetric so the
// boundary layer of the smoothed scheme has its zero exactly on the surface
// (asymmetric jump pairs are exercised by the edge-protocol suite instead).
inline PiecewiseScalarFn random_sign_preserving(std::mt19937& rng, bool continuous_at_0) {
  const int pick = uniform_int(rng, 0, continuous_at_0 ? 3 : 4);
  switch (pick) {
    case 0:
      return PiecewiseScalarFn::identity(uniform(rng, 0.5, 2.0));
    case 1: {
      const double c = uniform(rng, 0.5, 2.0);
      return PiecewiseScalarFn::sat(-c, c);
    }
    case 2:
      return PiecewiseScalarFn::log_quantizer(uniform(rng, 0.5, 2.0), 0.5, 3);
    case 3: {
      // steeper than linear near zero, gentle tails
      Segment pw = Segment::power(uniform(rng, 0.5, 2.0), uniform(rng, 0.6, 1.0));
      return PiecewiseScalarFn({}, {pw}, {});
    }
    default:
      // scale capped so the boundary-layer slope stays inside the RK4
      // stability region at the default (h, epsilon)
      return PiecewiseScalarFn::sign(uniform(rng, 0.5, 1.2));
  }
}

struct Theorem1Instance {
  Scenario scn;
  int condition = 0;  // 1, 2 or 3
};

// Rooted digraphs built from a random permutation: position 0 (and 1, for
// the two-root case) are the intended roots, every other node hangs below an
// earlier node, and optional extra edges only ever point "downward", which
// cannot enlarge the root set.
inline Theorem1Instance make_theorem1_instance(std::mt19937& rng, int condition) {
  const int n = uniform_int(rng, 2, 5);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  Digraph g(n);
  const bool two_roots = (condition == 3) && n >= 2;
  if (two_roots) {
    g.add_edge(order[0], order[1], uniform(rng, 1.0, 2.0));
    g.add_edge(order[1], order[0], uniform(rng, 1.0, 2.0));
  }
  for (int k = two_roots ? 2 : 1; k < n; ++k) {
    const int parent = order[uniform_int(rng, 0, k - 1)];
    g.add_edge(parent, order[k], uniform(rng, 1.0, 2.0));
  }
  // extra downward edges
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (two_roots && b <= 1) continue;
      if (uniform(rng, 0.0, 1.0) < 0.25 && !(g.weight(order[b], order[a]) > 0.0))
        g.add_edge(order[a], order[b], uniform(rng, 1.0, 2.0));
    }

  Scenario scn(std::move(g));
  for (int i = 0; i < n; ++i) scn.node_fns[i] = random_sign_preserving(rng, false);

  const GraphFacts facts = compute_facts(scn.graph);
  if (condition == 1) {
    if (facts.roots.empty()) throw std::logic_error("generator: expected a root");
    scn.node_fns[facts.roots.front()] = random_sign_preserving(rng, true);
  } else if (condition == 2) {
    if (facts.roots.size() != 1) throw std::logic_error("generator: expected a single root");
    scn.node_fns[facts.roots.front()] = PiecewiseScalarFn::sign(uniform(rng, 0.5, 1.2));
  } else {
    if (facts.roots.size() != 2) throw std::logic_error("generator: expected two roots");
    for (int r : facts.roots) scn.node_fns[r] = PiecewiseScalarFn::sign(uniform(rng, 0.5, 1.2));
  }

  for (int i = 0; i < n; ++i) scn.x0[i] = uniform(rng, -1.0, 1.0);
  scn.horizon = 20.0;
  scn.integrator = IntegratorConfig{};  // defaults: smoothed, h 1e-3, eps 1e-2
  return {std::move(scn), condition};
}

// Connected undirected graphs with jump-paired edge maps. The pairing keeps
// g_ij(0-) == -g_ji(0+) on every edge; the antisymmetric subcase uses the
// same scaled sign map on both directions.
inline Scenario make_theorem2_instance(std::mt19937& rng, bool antisymmetric) {
  const int n = uniform_int(rng, 2, 4);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  Digraph g(n);
  std::vector<std::pair<int, int>> pairs;
  for (int k = 1; k < n; ++k) {
    const int a = order[uniform_int(rng, 0, k - 1)];
    const int b = order[k];
    pairs.push_back({a, b});
  }
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const bool present =
          std::find(pairs.begin(), pairs.end(), std::make_pair(a, b)) != pairs.end() ||
          std::find(pairs.begin(), pairs.end(), std::make_pair(b, a)) != pairs.end();
      if (!present && uniform(rng, 0.0, 1.0) < 0.3) pairs.push_back({a, b});
    }
  for (auto [a, b] : pairs) {
    const double w = uniform(rng, 1.0, 2.0);
    g.add_edge(a, b, w);
    g.add_edge(b, a, w);
  }

  Scenario scn(std::move(g));
  for (auto [a, b] : pairs) {
    const double lam = uniform(rng, 0.5, 1.5);
    if (antisymmetric) {
      scn.edge_fns.insert_or_assign({b, a}, PiecewiseScalarFn::sign(lam));
      scn.edge_fns.insert_or_assign({a, b}, PiecewiseScalarFn::sign(lam));
    } else {
      const double ratio = uniform(rng, 0.87, 1.15);
      const double lo = lam, hi = lam * ratio;
      // g on edge a->b jumps (-lo, hi); the partner must jump (-hi, lo)
      scn.edge_fns.insert_or_assign({b, a}, PiecewiseScalarFn::jump(-lo, hi));
      scn.edge_fns.insert_or_assign({a, b}, PiecewiseScalarFn::jump(-hi, lo));
    }
  }
  for (int i = 0; i < n; ++i) scn.x0[i] = uniform(rng, -1.0, 1.0);
  scn.horizon = 8.0;
  scn.integrator.scheme = Scheme::Smoothed;
  scn.integrator.epsilon = 1.5e-4;
  scn.integrator.h = 1e-5;
  return scn;
}

struct FilippovInstance {
  Scenario scn;
  Vec x;
};

// Small instances for the exact-set vs direction-sampling comparison.
// Functions carry at most two breakpoints.
inline FilippovInstance make_filippov_instance(std::mt19937& rng, int k) {
  const int n = uniform_int(rng, 2, 3);
  Digraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && uniform(rng, 0.0, 1.0) < 0.8) g.add_edge(j, i, uniform(rng, 1.0, 2.0));
  bool any = false;
  for (int i = 0; i < n && !any; ++i)
    for (int j = 0; j < n; ++j) any = any || g.weight(i, j) > 0.0;
  if (!any) g.add_edge(0, 1, 1.0);

  auto random_fn = [&rng]() -> PiecewiseScalarFn {
    switch (uniform_int(rng, 0, 4)) {
      case 0:
        return PiecewiseScalarFn::sign(uniform(rng, 0.5, 2.0));
      case 1: {
        double a = uniform(rng, -2.0, 2.0), b = uniform(rng, -2.0, 2.0);
        return PiecewiseScalarFn::jump(std::min(a, b), std::max(a, b));
      }
      case 2:
        return PiecewiseScalarFn::identity(uniform(rng, 0.5, 2.0));
      case 3: {
        const double c = uniform(rng, 0.5, 2.0);
        return PiecewiseScalarFn::sat(-c, c);
      }
      default: {
        const double beta = uniform(rng, 0.3, 1.0);
        const double u = uniform(rng, -2.0, -0.5);
        const double w = uniform(rng, 0.5, 2.0);
        const double v = uniform(rng, u, w);
        return PiecewiseScalarFn({-beta, beta},
                                 {Segment::constant(u), Segment::constant(v),
                                  Segment::constant(w)},
                                 {0.5 * (u + v), 0.5 * (v + w)});
      }
    }
  };

  Scenario scn(std::move(g));
  const bool node_case = (k % 2) == 0;
  if (node_case) {
    for (int i = 0; i < n; ++i) scn.node_fns[i] = random_fn();
  } else {
    for (const auto& e : scn.graph.edges())
      scn.edge_fns.insert_or_assign({e.to, e.from}, random_fn());
  }

  Vec x(n);
  if (k % 4 < 2) {
    const double alpha = uniform(rng, -1.0, 1.0);
    x.assign(n, alpha);
  } else {
    for (int i = 0; i < n; ++i) x[i] = uniform(rng, -1.5, 1.5);
    if (k % 4 == 3) {
      // land one argument exactly on one of its map's breakpoints, so the
      // enumeration also gets exercised away from the origin
      const auto s = LinearArgumentStructure::for_scenario(scn);
      for (const auto& row : s.rows) {
        if (row.fn.breakpoints().empty() || norm_inf(row.c) == 0.0) continue;
        const double b =
            row.fn.breakpoints()[static_cast<std::size_t>(k) % row.fn.breakpoints().size()];
        const double shift = (b - dot(row.c, x)) / dot(row.c, row.c);
        for (int i = 0; i < n; ++i) x[i] += row.c[i] * shift;
        break;
      }
    }
  }
  return {std::move(scn), std::move(x)};
}

// Direct nested evaluation of the protocol map; deliberately independent of
// the structure/enumeration machinery it is used to cross-check.
inline Vec oracle_protocol_value(const Scenario& s, const Vec& x) {
  const int n = s.size();
  Vec out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double u = 0.0;
    for (int j = 0; j < n; ++j) {
      const double w = s.graph.weight(i, j);
      if (w > 0.0) u += w * s.edge_fn(i, j).eval(x[j] - x[i]);
    }
    out[i] = s.node_fns[i].eval(u);
  }
  return out;
}

}  // namespace testgen
