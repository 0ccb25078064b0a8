#include "nscon/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "nscon/errors.hpp"
#include "nscon/filippov.hpp"

namespace nscon {

const char* to_string(ConsensusClass c) {
  switch (c) {
    case ConsensusClass::Consensus:
      return "Consensus";
    case ConsensusClass::SlidingConsensus:
      return "SlidingConsensus";
    case ConsensusClass::NonConsensus:
      return "NonConsensus";
    case ConsensusClass::Undetermined:
      return "Undetermined";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Smoothed scheme: boundary-layer regularization + classical RK4.
// ---------------------------------------------------------------------------

// Boundary-layer regularization. Every jump is replaced inside the window
// [b-eps, b+eps] (clamped at midpoints between neighboring breakpoints) by a
// piecewise-linear transition between the one-sided limits. When the jump
// interval contains zero -- the surface admits the stationary selection --
// the transition is pinned to zero at the breakpoint itself, so a trajectory
// attracted from one side parks on the surface instead of being swept
// through it by the interpolation. Kinks are left exact, and point values
// never enter the flow.
class Mollified {
 public:
  Mollified() = default;
  Mollified(const PiecewiseScalarFn& f, double eps) : f_(&f) {
    const auto& bps = f.breakpoints();
    for (std::size_t k = 0; k < bps.size(); ++k) {
      if (f.jump_at(static_cast<int>(k)) == 0.0) continue;
      const double b = bps[k];
      double lo = b - eps;
      double hi = b + eps;
      if (k > 0) lo = std::max(lo, 0.5 * (bps[k - 1] + b));
      if (k + 1 < bps.size()) hi = std::min(hi, 0.5 * (b + bps[k + 1]));
      const auto [left, right] = f.one_sided_limits(b);
      Window w{lo, hi, b, left, right, false};
      w.through_zero = std::min(left, right) <= 0.0 && 0.0 <= std::max(left, right);
      windows_.push_back(w);
    }
  }

  double eval(double y) const {
    for (const Window& w : windows_) {
      if (y < w.lo) break;
      if (y <= w.hi) {
        if (w.through_zero) {
          if (y <= w.b) {
            const double t = (y - w.lo) / (w.b - w.lo);
            return w.vlo + t * (0.0 - w.vlo);
          }
          const double t = (y - w.b) / (w.hi - w.b);
          return t * w.vhi;
        }
        const double t = (y - w.lo) / (w.hi - w.lo);
        return w.vlo + t * (w.vhi - w.vlo);
      }
    }
    return f_->one_sided_limits(y).first;
  }

 private:
  struct Window {
    double lo, hi, b, vlo, vhi;
    bool through_zero;
  };
  const PiecewiseScalarFn* f_ = nullptr;
  std::vector<Window> windows_;  // sorted, disjoint
};

struct SmoothedSystem {
  int n = 0;
  std::vector<Mollified> node_m;
  std::vector<char> has_input;      // in-degree > 0
  Vec frozen_value;                 // f_i(0) for isolated inputs
  struct EdgeTerm {
    int i, j;
    double w;
    Mollified g;
  };
  std::vector<EdgeTerm> edges;
  const Scenario* scn = nullptr;

  static SmoothedSystem build(const Scenario& s) {
    SmoothedSystem sys;
    sys.scn = &s;
    sys.n = s.size();
    const double eps = s.integrator.epsilon;
    sys.node_m.reserve(sys.n);
    for (int i = 0; i < sys.n; ++i) sys.node_m.emplace_back(s.node_fns[i], eps);
    sys.has_input.assign(sys.n, 0);
    sys.frozen_value.assign(sys.n, 0.0);
    for (int i = 0; i < sys.n; ++i) {
      for (int j = 0; j < sys.n; ++j) {
        const double w = s.graph.weight(i, j);
        if (!(w > 0.0)) continue;
        sys.has_input[i] = 1;
        sys.edges.push_back({i, j, w, Mollified(s.edge_fn(i, j), eps)});
      }
      if (!sys.has_input[i]) sys.frozen_value[i] = s.node_fns[i].eval(0.0);
    }
    return sys;
  }

  void rhs(const Vec& x, Vec& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const EdgeTerm& e : edges) out[e.i] += e.w * e.g.eval(x[e.j] - x[e.i]);
    for (int i = 0; i < n; ++i)
      out[i] = has_input[i] ? node_m[i].eval(out[i]) : frozen_value[i];
  }
};

// Same boundary-layer idea for the error coordinates: z' = -L f_eps(z).
struct SmoothedErrorSystem {
  int n = 0;
  Mat l;
  std::vector<Mollified> node_m;

  void rhs(const Vec& z, Vec& out) const {
    Vec f(n);
    for (int i = 0; i < n; ++i) f[i] = node_m[i].eval(z[i]);
    const Vec lf = matvec(l, f);
    for (int i = 0; i < n; ++i) out[i] = -lf[i];
  }
};

struct Channels {
  double v, w, diam, sum;
};

Channels channels_of(const Vec& x) {
  double mx = x[0], mn = x[0], s = 0.0;
  for (double xi : x) {
    mx = std::max(mx, xi);
    mn = std::min(mn, xi);
    s += xi;
  }
  return {mx, -mn, mx - mn, s};
}

void record(Trajectory& traj, double t, const Vec& x) {
  const Channels c = channels_of(x);
  traj.times.push_back(t);
  traj.states.push_back(x);
  traj.v_channel.push_back(c.v);
  traj.w_channel.push_back(c.w);
  traj.diameter.push_back(c.diam);
  traj.sum.push_back(c.sum);
}

void check_divergence(const Vec& x, double guard) {
  if (norm_inf(x) > guard)
    throw Divergence("state norm exceeded " + std::to_string(guard) +
                     "; inputs likely violate the sign-preserving assumption");
}

template <typename System>
void integrate_rk4(const System& sys, const Vec& x0, double horizon, double h,
                   double guard, Trajectory& traj) {
  const long steps = static_cast<long>(std::ceil(horizon / h - 1e-12));
  const long stride = std::max<long>(1, steps / 200000);

  Vec x = x0, k1(x0.size()), k2(x0.size()), k3(x0.size()), k4(x0.size()), tmp(x0.size());
  record(traj, 0.0, x);
  double t = 0.0;
  for (long s = 0; s < steps; ++s) {
    const double dt = std::min(h, horizon - t);
    sys.rhs(x, k1);
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    sys.rhs(tmp, k2);
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    sys.rhs(tmp, k3);
    for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + dt * k3[i];
    sys.rhs(tmp, k4);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t += dt;
    check_divergence(x, guard);
    if (s % stride == stride - 1 || s == steps - 1) record(traj, t, x);
  }
}

// ---------------------------------------------------------------------------
// EventEuler scheme: exact evaluation, crossing landings, projected sliding.
// ---------------------------------------------------------------------------

struct ERow {
  const PiecewiseScalarFn* fn;
  Vec c;       // argument functional
  Vec dir;     // contribution direction
  double weight;
  bool frozen;         // c == 0: argument cannot move
  double frozen_value; // the pointwise value in that case
};

struct RowSystem {
  int n = 0;
  std::vector<ERow> rows;

  static RowSystem node(const Scenario& s) {
    RowSystem sys;
    sys.n = s.size();
    const Mat l = build_laplacian(s.graph);
    for (int i = 0; i < sys.n; ++i) {
      Vec c = l.row(i);
      for (double& v : c) v = -v;
      Vec dir(sys.n, 0.0);
      dir[i] = 1.0;
      const bool frozen = norm_inf(c) == 0.0;
      sys.rows.push_back({&s.node_fns[i], std::move(c), std::move(dir), 1.0, frozen,
                          frozen ? s.node_fns[i].eval(0.0) : 0.0});
    }
    return sys;
  }

  static RowSystem edge(const Scenario& s) {
    RowSystem sys;
    sys.n = s.size();
    for (int i = 0; i < sys.n; ++i)
      for (int j = 0; j < sys.n; ++j) {
        const double w = s.graph.weight(i, j);
        if (!(w > 0.0)) continue;
        Vec c(sys.n, 0.0);
        c[j] = 1.0;
        c[i] = -1.0;
        Vec dir(sys.n, 0.0);
        dir[i] = 1.0;
        sys.rows.push_back({&s.edge_fn(i, j), std::move(c), std::move(dir), w, false, 0.0});
      }
    return sys;
  }

  static RowSystem error(const Scenario& s, const Mat& l) {
    RowSystem sys;
    sys.n = s.size();
    for (int i = 0; i < sys.n; ++i) {
      Vec c(sys.n, 0.0);
      c[i] = 1.0;
      Vec dir(sys.n);
      for (int r = 0; r < sys.n; ++r) dir[r] = -l(r, i);
      sys.rows.push_back({&s.node_fns[i], std::move(c), std::move(dir), 1.0, false, 0.0});
    }
    return sys;
  }
};

class EventEulerIntegrator {
 public:
  EventEulerIntegrator(RowSystem sys, const IntegratorConfig& cfg, double horizon,
                       const LinearArgumentStructure* manifold_structure)
      : sys_(std::move(sys)),
        cfg_(cfg),
        horizon_(horizon),
        manifold_structure_(manifold_structure),
        sliding_(sys_.rows.size(), 0),
        flips_(sys_.rows.size()) {}

  void run(const Vec& x0, double guard, Trajectory& traj) {
    Vec x = x0;
    double t = 0.0;
    record(traj, t, x);
    long safety = 0;
    const long max_substeps = static_cast<long>(200.0 * (horizon_ / cfg_.h)) + 100000;

    while (t < horizon_ - 1e-15) {
      if (++safety > max_substeps)
        throw Divergence("event stepping stalled; too many substeps");
      const double dt_max = std::min(cfg_.h, horizon_ - t);

      if (manifold_structure_ && try_manifold_step(x, dt_max)) {
        t += dt_max;
        record(traj, t, x);
        continue;
      }

      Vec v = sliding_velocity(x);
      if (norm_inf(v) == 0.0) {
        t += dt_max;
        record(traj, t, x);
        continue;
      }

      double lam = 1.0;
      const int crossed = earliest_crossing(x, v, dt_max, lam);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += lam * dt_max * v[i];
      t += lam * dt_max;
      check_divergence(x, guard);
      record(traj, t, x);

      if (crossed >= 0) note_flip(crossed, t);
    }
  }

 private:
  // Consensus-manifold sliding: once the states agree to within the
  // consensus tolerance, drift along the configured selection within the
  // sliding range of the exact set at the snapped state. Solutions of the
  // inclusion are not unique there; the selection makes the choice explicit.
  bool try_manifold_step(Vec& x, double dt) {
    const Channels ch = channels_of(x);
    if (ch.diam > cfg_.consensus_tol) {
      manifold_checked_ = false;
      return false;
    }
    if (!manifold_checked_) {
      manifold_checked_ = true;
      manifold_eta_.reset();
      const double mean = ch.sum / static_cast<double>(x.size());
      const Vec snapped(x.size(), mean);
      const FilippovPolytope poly = filippov_set(*manifold_structure_, snapped);
      const auto range = sliding_range(poly);
      if (range)
        manifold_eta_ = range->first + cfg_.sliding_selection * (range->second - range->first);
    }
    if (!manifold_eta_) return false;
    const double mean = ch.sum / static_cast<double>(x.size());
    const double next = mean + dt * *manifold_eta_;
    std::fill(x.begin(), x.end(), next);
    return true;
  }

  double row_value(const ERow& r, const Vec& x) const {
    return r.fn->eval(dot(r.c, x));
  }

  // Velocity with sliding rows replaced by their convex combination; the
  // combination solves for zero normal velocity on every held surface.
  Vec sliding_velocity(Vec const& x) {
    std::vector<int> held;
    for (std::size_t k = 0; k < sys_.rows.size(); ++k) {
      if (!sliding_[k]) continue;
      const auto lim = limits_at_nearest(sys_.rows[k], x);
      if (lim.second - lim.first == 0.0) {
        sliding_[k] = 0;  // drifted off the surface (or a kink): nothing to hold
        continue;
      }
      held.push_back(static_cast<int>(k));
    }

    while (true) {
      Vec v(sys_.n, 0.0);
      for (std::size_t k = 0; k < sys_.rows.size(); ++k) {
        const ERow& r = sys_.rows[k];
        double value;
        if (r.frozen) {
          value = r.frozen_value;
        } else if (sliding_[k]) {
          const auto lim = limits_at_nearest(r, x);
          value = lim.first;  // theta = 0 baseline; corrected below
        } else {
          value = row_value(r, x);
        }
        for (int i = 0; i < sys_.n; ++i) v[i] += r.weight * value * r.dir[i];
      }
      if (held.empty()) return v;

      const int m = static_cast<int>(held.size());
      Mat mat(m, m);
      Vec rhs(m);
      for (int a = 0; a < m; ++a) {
        const ERow& rj = sys_.rows[held[a]];
        rhs[a] = -dot(rj.c, v);
        for (int b = 0; b < m; ++b) {
          const ERow& rk = sys_.rows[held[b]];
          const auto lim = limits_at_nearest(rk, x);
          const double span = lim.second - lim.first;
          double cd = 0.0;
          for (int i = 0; i < sys_.n; ++i) cd += rj.c[i] * rk.dir[i];
          mat(a, b) = rk.weight * span * cd;
        }
      }
      // Ridge-regularized least squares keeps rank-deficient holds
      // deterministic (clusters sliding jointly are rank-deficient).
      Mat nm(m, m);
      Vec nr(m, 0.0);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          double s = 0.0;
          for (int r = 0; r < m; ++r) s += mat(r, a) * mat(r, b);
          nm(a, b) = s + (a == b ? 1e-12 : 0.0);
        }
      for (int a = 0; a < m; ++a) {
        double s = 0.0;
        for (int r = 0; r < m; ++r) s += mat(r, a) * rhs[r];
        nr[a] = s;
      }
      const auto theta = lu_solve(nm, nr);
      if (!theta) {
        for (int k : held) sliding_[k] = 0;
        held.clear();
        continue;
      }
      int worst = -1;
      double worst_violation = 1e-9;
      for (int a = 0; a < m; ++a) {
        const double viol = std::max((*theta)[a] - 1.0, -(*theta)[a]);
        if (viol > worst_violation) {
          worst_violation = viol;
          worst = a;
        }
      }
      if (worst >= 0) {
        sliding_[held[worst]] = 0;  // surface no longer attractive
        held.erase(held.begin() + worst);
        continue;
      }
      for (int a = 0; a < m; ++a) {
        const ERow& rk = sys_.rows[held[a]];
        const auto lim = limits_at_nearest(rk, x);
        const double add = rk.weight * (*theta)[a] * (lim.second - lim.first);
        for (int i = 0; i < sys_.n; ++i) v[i] += add * rk.dir[i];
      }
      return v;
    }
  }

  std::pair<double, double> limits_at_nearest(const ERow& r, const Vec& x) const {
    const double arg = dot(r.c, x);
    int k = r.fn->breakpoint_near(arg, 10.0 * cfg_.boundary_tol);
    if (k < 0) k = r.fn->breakpoint_near(arg, 1e-6);  // generous: sliding drifts a little
    if (k < 0) {
      const double v = r.fn->one_sided_limits(arg).first;
      return {v, v};
    }
    return r.fn->one_sided_limits(r.fn->breakpoints()[k]);
  }

  // Scans for the earliest breakpoint crossing along the proposed step and
  // bisects the step fraction so the landing sits just past the surface,
  // within boundary_tol. Returns the crossed row (or -1) and updates lam.
  int earliest_crossing(const Vec& x, const Vec& v, double dt, double& lam) {
    int best_row = -1;
    double best_lam = 1.0;
    double best_bp = 0.0;
    for (std::size_t k = 0; k < sys_.rows.size(); ++k) {
      const ERow& r = sys_.rows[k];
      if (r.frozen || sliding_[k]) continue;
      const double a0 = dot(r.c, x);
      const double rate = dot(r.c, v) * dt;
      if (rate == 0.0) continue;
      const double a1 = a0 + rate;
      for (double b : r.fn->breakpoints()) {
        if ((a0 - b) == 0.0) continue;       // sitting on the surface: step off it
        if ((a0 - b) * (a1 - b) >= 0.0) continue;  // no sign change
        const double lam_star = (b - a0) / rate;
        if (lam_star < best_lam) {
          best_lam = lam_star;
          best_row = static_cast<int>(k);
          best_bp = b;
        }
      }
    }
    if (best_row < 0) {
      lam = 1.0;
      return -1;
    }

    // Bisect on [lam_star, 1] for a landing strictly past b within tol.
    const ERow& r = sys_.rows[best_row];
    const double a0 = dot(r.c, x);
    const double s0 = a0 - best_bp > 0 ? 1.0 : -1.0;
    double lo = best_lam, hi = 1.0;
    double candidate = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double am = a0 + dot(r.c, v) * dt * mid;
      const double d = am - best_bp;
      if (d * s0 > 0.0) {
        lo = mid;  // not yet across
      } else {
        candidate = mid;
        if (std::abs(d) <= cfg_.boundary_tol) break;
        hi = mid;
      }
    }
    lam = candidate;
    return best_row;
  }

  void note_flip(int row, double t) {
    auto& q = flips_[row];
    q.push_back(t);
    while (!q.empty() && q.front() < t - 1.0) q.pop_front();
    if (static_cast<double>(q.size()) > cfg_.chatter_cap) {
      sliding_[row] = 1;
      q.clear();
    }
  }

  RowSystem sys_;
  IntegratorConfig cfg_;
  double horizon_;
  const LinearArgumentStructure* manifold_structure_;
  std::vector<char> sliding_;
  std::vector<std::deque<double>> flips_;
  bool manifold_checked_ = false;
  std::optional<double> manifold_eta_;
};

double least_squares_slope(const std::vector<double>& t, const std::vector<double>& y,
                           std::size_t from) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double n = static_cast<double>(t.size() - from);
  if (n < 2) return 0.0;
  for (std::size_t i = from; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  const double denom = n * stt - st * st;
  if (denom == 0.0) return 0.0;
  return (n * sty - st * sy) / denom;
}

}  // namespace

Classification classify(const Trajectory& traj, const IntegratorConfig& cfg) {
  Classification out;
  if (traj.times.empty()) throw ConfigError("cannot classify an empty trajectory");
  const double t_end = traj.times.back();
  const double window = cfg.consensus_window > 0.0 ? cfg.consensus_window : 0.1 * t_end;
  std::size_t iw = 0;
  while (iw + 1 < traj.times.size() && traj.times[iw] < t_end - window) ++iw;

  bool diam_ok = true;
  for (std::size_t i = iw; i < traj.diameter.size(); ++i)
    if (!(traj.diameter[i] < cfg.consensus_tol)) diam_ok = false;

  const double n = static_cast<double>(traj.states.front().size());
  std::vector<double> mean(traj.sum.size());
  for (std::size_t i = 0; i < traj.sum.size(); ++i) mean[i] = traj.sum[i] / n;

  if (diam_ok) {
    double lo = mean[iw], hi = mean[iw];
    for (std::size_t i = iw; i < mean.size(); ++i) {
      lo = std::min(lo, mean[i]);
      hi = std::max(hi, mean[i]);
    }
    const double drift = hi - lo;
    if (drift < cfg.consensus_tol) {
      out.kind = ConsensusClass::Consensus;
      out.value = mean.back();
    } else {
      out.kind = ConsensusClass::SlidingConsensus;
      out.value = mean.back();
      out.rate = least_squares_slope(traj.times, mean, iw);
    }
    return out;
  }

  const double start_d = traj.diameter[iw];
  const double end_d = traj.diameter.back();
  const bool stalled = (start_d - end_d) < 0.05 * start_d;
  if (end_d >= 10.0 * cfg.consensus_tol && stalled) {
    out.kind = ConsensusClass::NonConsensus;
    out.value = mean.back();
  } else {
    out.kind = ConsensusClass::Undetermined;
    out.value = mean.back();
  }
  return out;
}

Trajectory simulate(const Scenario& s) {
  s.validate();
  const double guard = 1e3 * (1.0 + norm_inf(s.x0));

  Trajectory traj;
  traj.scheme = s.integrator.scheme;

  if (s.integrator.scheme == Scheme::Smoothed) {
    const SmoothedSystem sys = SmoothedSystem::build(s);
    integrate_rk4(sys, s.x0, s.horizon, s.integrator.h, guard, traj);
  } else {
    RowSystem rows;
    if (s.all_edge_fns_identity()) {
      rows = RowSystem::node(s);
    } else if (s.all_node_fns_identity()) {
      rows = RowSystem::edge(s);
    } else {
      throw ConfigError(
          "EventEuler handles node- or edge-nonlinearity protocols; combined "
          "scenarios need the smoothed scheme");
    }
    const LinearArgumentStructure structure = LinearArgumentStructure::for_scenario(s);
    EventEulerIntegrator integrator(std::move(rows), s.integrator, s.horizon, &structure);
    integrator.run(s.x0, guard, traj);
  }

  traj.classification = classify(traj, s.integrator);
  return traj;
}

ErrorTrajectory simulate_error(const Scenario& s) {
  s.validate();
  if (!s.all_edge_fns_identity())
    throw EdgeFnsPresent("error dynamics are defined for the node-nonlinearity protocol");
  const Vec sigma = perron_left_vector(s.graph);  // throws NotStronglyConnected

  const Mat l = build_laplacian(s.graph);
  const Vec lx0 = matvec(l, s.x0);
  Vec z0(s.size());
  for (int i = 0; i < s.size(); ++i) z0[i] = -lx0[i];

  Trajectory raw;
  const double guard = 1e3 * (1.0 + norm_inf(z0));
  if (s.integrator.scheme == Scheme::Smoothed) {
    SmoothedErrorSystem sys;
    sys.n = s.size();
    sys.l = l;
    for (int i = 0; i < sys.n; ++i) sys.node_m.emplace_back(s.node_fns[i], s.integrator.epsilon);
    integrate_rk4(sys, z0, s.horizon, s.integrator.h, guard, raw);
  } else {
    EventEulerIntegrator integrator(RowSystem::error(s, l), s.integrator, s.horizon, nullptr);
    integrator.run(z0, guard, raw);
  }

  ErrorTrajectory err;
  err.sigma = sigma;
  err.times = std::move(raw.times);
  err.states = std::move(raw.states);
  err.norm1.reserve(err.states.size());
  err.v1_channel.reserve(err.states.size());
  for (const Vec& z : err.states) {
    err.norm1.push_back(norm1(z));
    double v1 = 0.0;
    for (int i = 0; i < s.size(); ++i) v1 += sigma[i] * s.node_fns[i].integral_from_zero(z[i]);
    err.v1_channel.push_back(v1);
  }
  return err;
}

}  // namespace nscon
