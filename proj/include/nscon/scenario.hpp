#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "nscon/graph.hpp"
#include "nscon/piecewise.hpp"

namespace nscon {

enum class Scheme { Smoothed, EventEuler };

struct IntegratorConfig {
  Scheme scheme = Scheme::Smoothed;
  double h = 1e-3;               // fixed step
  double epsilon = 1e-2;         // boundary-layer width (Smoothed)
  double boundary_tol = 1e-8;    // event landing tolerance (EventEuler)
  double chatter_cap = 50.0;     // max crossings per row per unit time before sliding
  double consensus_tol = 1e-4;
  double consensus_window = 0.0;  // 0 means 10% of the horizon
  double sliding_selection = 0.5;  // position within the sliding range, 0 = lo, 1 = hi
  unsigned seed = 0;               // sampling-based verification paths only

  void validate() const;  // throws ConfigError
};

/// A complete problem instance: who talks to whom, through which
/// nonlinearities, from where, for how long.
struct Scenario {
  Digraph graph;
  std::vector<PiecewiseScalarFn> node_fns;              // size n
  std::map<std::pair<int, int>, PiecewiseScalarFn> edge_fns;  // (receiver i, sender j) -> g_ij
  Vec x0;
  double horizon = 10.0;
  IntegratorConfig integrator;

  explicit Scenario(Digraph g);

  int size() const { return graph.size(); }
  /// g_ij for the edge j -> i; identity when not explicitly set.
  const PiecewiseScalarFn& edge_fn(int i, int j) const;
  bool all_edge_fns_identity() const;
  bool all_node_fns_identity() const;

  /// Throws ConfigError when shapes or edge keys are inconsistent.
  void validate() const;

  bool operator==(const Scenario& other) const;
};

}  // namespace nscon
