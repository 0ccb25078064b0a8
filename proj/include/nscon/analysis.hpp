#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "nscon/graph.hpp"
#include "nscon/piecewise.hpp"
#include "nscon/scenario.hpp"

namespace nscon {

enum class TheoremCondition { None, CondI, CondII, CondIII };
enum class Prediction {
  ConsensusGuaranteed,
  ErrorConvergenceGuaranteed,
  SlidingPossible,
  NoGuarantee,
};

const char* to_string(TheoremCondition c);
const char* to_string(Prediction p);

struct PortHamiltonianSplit {
  Mat skew;       // J
  Mat symmetric;  // R
  bool psd_ok = false;
  double min_eigenvalue = 0.0;
};

/// Which sufficient conditions hold for a scenario and what they imply.
struct AnalysisReport {
  std::vector<bool> node_sign_preserving;   // Assumption-1 verdict per f_i
  std::vector<bool> edge_sign_preserving;   // per edge, order of Scenario::edge list
  bool assumption1_ok = false;              // all of the above
  std::vector<int> roots;                   // index set of roots
  std::vector<int> continuity_set;          // nodes with f_i continuous at 0
  TheoremCondition theorem1 = TheoremCondition::None;  // node protocol
  bool theorem2 = false;                    // undirected connected edge protocol
  bool theorem3 = false;                    // continuous edge maps + spanning tree
  TheoremCondition theorem4 = TheoremCondition::None;  // combined, continuous g
  bool theorem5 = false;                    // error dynamics certificate
  bool assumption2_ok = false;              // jump pairing across every edge
  Prediction prediction = Prediction::NoGuarantee;
  std::optional<std::pair<double, double>> sliding_eta;  // range backing SlidingPossible
  std::optional<PortHamiltonianSplit> ph_split;  // present iff strongly connected
};

/// Pure and deterministic: same scenario, same report.
AnalysisReport analyze(const Scenario& s);

/// Sigma L = J + R with Sigma = diag(left Perron vector); the symmetric part
/// is expected positive semidefinite. Throws NotStronglyConnected.
PortHamiltonianSplit ph_decompose(const Digraph& g);

}  // namespace nscon
