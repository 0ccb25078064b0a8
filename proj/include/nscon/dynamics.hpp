#pragma once

#include <optional>
#include <vector>

#include "nscon/scenario.hpp"

namespace nscon {

enum class ConsensusClass { Consensus, SlidingConsensus, NonConsensus, Undetermined };

struct Classification {
  ConsensusClass kind = ConsensusClass::Undetermined;
  double value = 0.0;  // common value (Consensus) or final mean (Sliding)
  double rate = 0.0;   // mean-state slope over the window (Sliding)
};

const char* to_string(ConsensusClass c);

/// Sampled solution with the monitor channels the convergence arguments use:
/// V = max_i x_i, W = -min_i x_i, diameter = V + W, sum = ones . x.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> v_channel;
  std::vector<double> w_channel;
  std::vector<double> diameter;
  std::vector<double> sum;
  Scheme scheme = Scheme::Smoothed;
  Classification classification;

  double final_diameter() const { return diameter.empty() ? 0.0 : diameter.back(); }
};

/// Error coordinates z = -L x with the weighted-potential channel
/// V1 = sigma . F(z), F_i the primitive of f_i.
struct ErrorTrajectory {
  std::vector<double> times;
  std::vector<Vec> states;        // z samples
  std::vector<double> norm1;      // |z|_1
  std::vector<double> v1_channel; // sigma . F(z)
  Vec sigma;
};

/// Integrates the inclusion with the configured scheme.
///   Smoothed: every jump is replaced by a linear boundary layer of width
///   2*epsilon and the resulting ODE is integrated with classical RK4.
///   EventEuler: forward Euler with crossing detection (bisection landing
///   within boundary_tol past the surface), chatter-triggered projected
///   sliding steps, and an explicit selection rule on the consensus manifold.
/// Throws ConfigError or Divergence.
Trajectory simulate(const Scenario& s);

/// Integrates z' = -L f(z) from z0 = -L x0 (so z0 lies in im L).
/// Requires a strongly connected graph and identity edge maps.
ErrorTrajectory simulate_error(const Scenario& s);

/// Window-based outcome call; also applied by simulate() itself. When the
/// config leaves consensus_window at 0, a tenth of the recorded horizon is
/// used.
Classification classify(const Trajectory& traj, const IntegratorConfig& cfg);

}  // namespace nscon
