#include "nscon/scenario.hpp"

#include <string>

#include "nscon/errors.hpp"

namespace nscon {

namespace {
const PiecewiseScalarFn& identity_fn() {
  static const PiecewiseScalarFn id = PiecewiseScalarFn::identity();
  return id;
}
}  // namespace

void IntegratorConfig::validate() const {
  if (!(h > 0.0)) throw ConfigError("step h must be positive");
  if (scheme == Scheme::Smoothed && !(epsilon > 0.0))
    throw ConfigError("smoothing epsilon must be positive");
  if (scheme == Scheme::EventEuler && !(boundary_tol > 0.0))
    throw ConfigError("boundary_tol must be positive");
  if (!(consensus_tol > 0.0)) throw ConfigError("consensus_tol must be positive");
  if (consensus_window < 0.0) throw ConfigError("consensus_window must be nonnegative");
  if (sliding_selection < 0.0 || sliding_selection > 1.0)
    throw ConfigError("sliding_selection must lie in [0, 1]");
  if (chatter_cap <= 0.0) throw ConfigError("chatter_cap must be positive");
}

Scenario::Scenario(Digraph g)
    : graph(std::move(g)), node_fns(graph.size(), PiecewiseScalarFn::identity()) {
  x0.assign(graph.size(), 0.0);
}

const PiecewiseScalarFn& Scenario::edge_fn(int i, int j) const {
  const auto it = edge_fns.find({i, j});
  return it == edge_fns.end() ? identity_fn() : it->second;
}

bool Scenario::all_edge_fns_identity() const {
  for (const auto& [key, fn] : edge_fns)
    if (!fn.is_identity()) return false;
  return true;
}

bool Scenario::all_node_fns_identity() const {
  for (const auto& fn : node_fns)
    if (!fn.is_identity()) return false;
  return true;
}

void Scenario::validate() const {
  const int n = graph.size();
  if (static_cast<int>(node_fns.size()) != n)
    throw ConfigError("need one node function per node");
  if (static_cast<int>(x0.size()) != n)
    throw ConfigError("x0 dimension does not match the graph");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  for (const auto& [key, fn] : edge_fns) {
    const auto [i, j] = key;
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw ConfigError("edge function index out of range");
    if (!(graph.weight(i, j) > 0.0))
      throw ConfigError("edge function given for absent edge " + std::to_string(j + 1) +
                        " -> " + std::to_string(i + 1));
  }
  integrator.validate();
}

bool Scenario::operator==(const Scenario& other) const {
  const IntegratorConfig& a = integrator;
  const IntegratorConfig& b = other.integrator;
  return graph == other.graph && node_fns == other.node_fns && edge_fns == other.edge_fns &&
         x0 == other.x0 && horizon == other.horizon && a.scheme == b.scheme && a.h == b.h &&
         a.epsilon == b.epsilon && a.boundary_tol == b.boundary_tol &&
         a.chatter_cap == b.chatter_cap && a.consensus_tol == b.consensus_tol &&
         a.consensus_window == b.consensus_window &&
         a.sliding_selection == b.sliding_selection && a.seed == b.seed;
}

}  // namespace nscon
