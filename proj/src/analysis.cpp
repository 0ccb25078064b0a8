#include "nscon/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "nscon/errors.hpp"
#include "nscon/filippov.hpp"

namespace nscon {

const char* to_string(TheoremCondition c) {
  switch (c) {
    case TheoremCondition::None:
      return "none";
    case TheoremCondition::CondI:
      return "i";
    case TheoremCondition::CondII:
      return "ii";
    case TheoremCondition::CondIII:
      return "iii";
  }
  return "?";
}

const char* to_string(Prediction p) {
  switch (p) {
    case Prediction::ConsensusGuaranteed:
      return "ConsensusGuaranteed";
    case Prediction::ErrorConvergenceGuaranteed:
      return "ErrorConvergenceGuaranteed";
    case Prediction::SlidingPossible:
      return "SlidingPossible";
    case Prediction::NoGuarantee:
      return "NoGuarantee";
  }
  return "?";
}

namespace {

// Conditions (i)-(iii) shared by the node-protocol and combined results.
TheoremCondition root_condition(const GraphFacts& facts,
                                const std::vector<FnPredicates>& preds) {
  const auto& roots = facts.roots;
  if (roots.empty()) return TheoremCondition::None;
  for (int r : roots)
    if (preds[r].continuous_at_origin) return TheoremCondition::CondI;
  if (roots.size() == 1) return TheoremCondition::CondII;
  if (roots.size() == 2 && preds[roots[0]].symmetric_jump_at_origin &&
      preds[roots[1]].symmetric_jump_at_origin)
    return TheoremCondition::CondIII;
  return TheoremCondition::None;
}

}  // namespace

AnalysisReport analyze(const Scenario& s) {
  s.validate();
  AnalysisReport rep;
  const int n = s.size();
  const GraphFacts facts = compute_facts(s.graph);
  rep.roots = facts.roots;

  std::vector<FnPredicates> node_preds;
  for (int i = 0; i < n; ++i) node_preds.push_back(check_predicates(s.node_fns[i]));
  for (int i = 0; i < n; ++i) {
    rep.node_sign_preserving.push_back(node_preds[i].sign_preserving);
    if (node_preds[i].continuous_at_origin) rep.continuity_set.push_back(i);
  }

  bool edges_sign_ok = true;
  bool edges_continuous = true;
  for (const auto& e : s.graph.edges()) {
    const PiecewiseScalarFn& g = s.edge_fn(e.to, e.from);
    const FnPredicates p = check_predicates(g);
    rep.edge_sign_preserving.push_back(p.sign_preserving);
    edges_sign_ok = edges_sign_ok && p.sign_preserving;
    edges_continuous = edges_continuous && g.continuous_everywhere();
  }
  bool nodes_sign_ok = true;
  for (int i = 0; i < n; ++i) nodes_sign_ok = nodes_sign_ok && node_preds[i].sign_preserving;
  rep.assumption1_ok = nodes_sign_ok && edges_sign_ok;

  // Jump pairing across edges: g_ij(0-) == -g_ji(0+) for every edge j -> i,
  // with unconfigured reverse maps defaulting to the identity.
  rep.assumption2_ok = true;
  for (const auto& e : s.graph.edges()) {
    const int i = e.to, j = e.from;
    const auto lim_ij = s.edge_fn(i, j).one_sided_limits(0.0);
    const auto lim_ji = s.edge_fn(j, i).one_sided_limits(0.0);
    if (std::abs(lim_ij.first + lim_ji.second) > 1e-12) rep.assumption2_ok = false;
  }

  const bool node_pure = s.all_edge_fns_identity();
  const bool edge_pure = s.all_node_fns_identity();

  if (node_pure && nodes_sign_ok)
    rep.theorem1 = root_condition(facts, node_preds);

  rep.theorem2 = edge_pure && facts.is_undirected && facts.weakly_connected &&
                 edges_sign_ok && rep.assumption2_ok;

  rep.theorem3 = edge_pure && facts.has_spanning_tree && edges_continuous && edges_sign_ok;

  if (edges_continuous && nodes_sign_ok && edges_sign_ok)
    rep.theorem4 = root_condition(facts, node_preds);

  bool nodes_nondecreasing = true;
  for (const auto& p : node_preds)
    nodes_nondecreasing = nodes_nondecreasing && p.nondecreasing;
  rep.theorem5 = node_pure && facts.strongly_connected && nodes_sign_ok &&
                 nodes_nondecreasing;

  if (facts.strongly_connected) rep.ph_split = ph_decompose(s.graph);

  // Reported prediction. "Sliding possible" is a warning, not a theorem, and
  // it outranks the error-dynamics certificate: the error converging to zero
  // does not rule out a drifting consensus, which is the caveat worth
  // surfacing (theorem5 stays visible as its own field).
  const bool guaranteed = rep.theorem1 != TheoremCondition::None || rep.theorem2 ||
                          rep.theorem3 || rep.theorem4 != TheoremCondition::None;
  if (guaranteed) {
    rep.prediction = Prediction::ConsensusGuaranteed;
    return rep;
  }

  // A node can inject sliding when its own map, or any edge map feeding it,
  // jumps at the origin.
  auto discontinuous_at_origin = [&](int i) {
    if (!node_preds[i].continuous_at_origin) return true;
    for (int j : s.graph.in_neighbors(i)) {
      const auto lim = s.edge_fn(i, j).one_sided_limits(0.0);
      if (!(lim.first == 0.0 && lim.second == 0.0)) return true;
    }
    return false;
  };
  bool roots_all_discontinuous = !facts.roots.empty();
  for (int r : facts.roots)
    if (!discontinuous_at_origin(r)) roots_all_discontinuous = false;

  if (roots_all_discontinuous) {
    try {
      const auto structure = LinearArgumentStructure::for_scenario(s);
      const auto poly = filippov_set(structure, Vec(n, 0.0));
      const auto range = sliding_range(poly);
      if (range && (range->first < -1e-12 || range->second > 1e-12)) {
        rep.prediction = Prediction::SlidingPossible;
        rep.sliding_eta = range;
        return rep;
      }
    } catch (const BudgetExceeded&) {
      // fall through: no claim either way
    } catch (const NestedDiscontinuity&) {
    }
  }
  rep.prediction = rep.theorem5 ? Prediction::ErrorConvergenceGuaranteed
                                : Prediction::NoGuarantee;
  return rep;
}

PortHamiltonianSplit ph_decompose(const Digraph& g) {
  const Vec sigma = perron_left_vector(g);  // throws NotStronglyConnected
  const Mat l = build_laplacian(g);
  const int n = g.size();

  Mat sl(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sl(i, j) = sigma[i] * l(i, j);

  PortHamiltonianSplit out;
  out.skew = Mat(n, n);
  out.symmetric = Mat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.skew(i, j) = 0.5 * (sl(i, j) - sl(j, i));
      out.symmetric(i, j) = 0.5 * (sl(i, j) + sl(j, i));
    }
  const Vec eig = symmetric_eigenvalues(out.symmetric);
  out.min_eigenvalue = eig.empty() ? 0.0 : eig.front();
  out.psd_ok = out.min_eigenvalue >= -1e-9;
  return out;
}

}  // namespace nscon
