// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Every tolerance is pinned here, in code.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "nscon/analysis.hpp"
#include "nscon/dynamics.hpp"
#include "nscon/filippov.hpp"
#include "nscon/scenario_io.hpp"
#include "support/generators.hpp"

using namespace nscon;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
  if (!ok) ++failures;
}

Digraph unit_triangle() {
  Digraph g(3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a != b) g.add_edge(a, b, 1.0);
  return g;
}

Scenario sign_triangle() {
  Scenario s(unit_triangle());
  for (auto& f : s.node_fns) f = PiecewiseScalarFn::sign();
  s.x0 = {0.0, 0.0, 0.0};
  return s;
}

bool vertex_sets_equal(const FilippovPolytope& poly, std::vector<Vec> expected) {
  if (poly.vertices.size() != expected.size()) return false;
  std::vector<Vec> got = poly.vertices;
  std::sort(got.begin(), got.end());
  std::sort(expected.begin(), expected.end());
  return got == expected;
}

// --- criterion 1: exact set and sliding range of the sign triangle --------
void criterion_1() {
  const auto s = LinearArgumentStructure::for_scenario(sign_triangle());
  const auto poly = filippov_set(s, {2.0, 2.0, 2.0});
  const bool verts = vertex_sets_equal(
      poly, {Vec{1, 1, -1}, Vec{1, -1, 1}, Vec{-1, 1, 1}, Vec{-1, -1, 1}, Vec{-1, 1, -1},
             Vec{1, -1, -1}});
  const auto range = sliding_range(poly);
  const bool rng_ok = range && std::abs(range->first + 1.0 / 3.0) <= 1e-9 &&
                      std::abs(range->second - 1.0 / 3.0) <= 1e-9;
  report(1, verts && rng_ok,
         "sign triangle: six exact vertices, sliding range [-1/3, 1/3] (1e-9)");
}

// --- criterion 2: two-root pair, ranges and the event-scheme drift --------
void criterion_2() {
  Scenario sym(Digraph(2));
  sym.graph.add_edge(0, 1, 1.0);
  sym.graph.add_edge(1, 0, 1.0);
  sym.node_fns = {PiecewiseScalarFn::sign(), PiecewiseScalarFn::sign()};
  sym.x0 = {0.0, 1.0};
  const auto range_sym =
      sliding_range(filippov_set(LinearArgumentStructure::for_scenario(sym), {0.0, 0.0}));
  const bool sym_ok =
      range_sym && std::abs(range_sym->first) <= 1e-9 && std::abs(range_sym->second) <= 1e-9;

  Scenario asym = sym;
  asym.node_fns = {PiecewiseScalarFn::jump(-1.0, 2.0), PiecewiseScalarFn::jump(-1.0, 2.0)};
  const auto range_asym =
      sliding_range(filippov_set(LinearArgumentStructure::for_scenario(asym), {0.0, 0.0}));
  const bool asym_ok = range_asym && std::abs(range_asym->first - 0.5) <= 1e-9 &&
                       std::abs(range_asym->second - 0.5) <= 1e-9;

  asym.horizon = 2.0;
  asym.integrator.scheme = Scheme::EventEuler;
  asym.integrator.sliding_selection = 0.5;
  const Trajectory t = simulate(asym);
  const bool slope_ok = t.classification.kind == ConsensusClass::SlidingConsensus &&
                        std::abs(t.classification.rate - 0.5) <= 0.01;

  report(2, sym_ok && asym_ok && slope_ok,
         "two-root pair: ranges [0,0] and [1/2,1/2] (1e-9), event-scheme slope 0.5 +- 0.01");
}

// --- criterion 3: edge protocol admits the all-ones drift ------------------
void criterion_3() {
  Scenario s(unit_triangle());
  for (const auto& e : s.graph.edges())
    s.edge_fns.insert_or_assign({e.to, e.from}, PiecewiseScalarFn::jump(-0.5, 1.5));
  s.x0 = {0.0, 0.0, 0.0};
  const auto poly = filippov_set(LinearArgumentStructure::for_scenario(s), {0.0, 0.0, 0.0});
  report(3, hull_contains(poly, {1.0, 1.0, 1.0}),
         "asymmetric edge jumps: all-ones velocity lies in the exact set");
}

// --- criterion 4: one-sided saturation freezes ------------------------------
void criterion_4() {
  Scenario s(Digraph(2));
  s.graph.add_edge(0, 1, 1.0);
  s.node_fns = {PiecewiseScalarFn::sat(0.0, 1.0), PiecewiseScalarFn::sat(0.0, 1.0)};
  s.x0 = {0.0, 1.0};
  s.horizon = 10.0;
  const Trajectory t = simulate(s);
  const bool frozen =
      std::abs(t.states.back()[0]) <= 1e-9 && std::abs(t.states.back()[1] - 1.0) <= 1e-9;
  report(4, frozen && t.classification.kind == ConsensusClass::NonConsensus,
         "one-sided saturation: state pinned at [0,1] (1e-9), NonConsensus");
}

// --- criterion 5: touching jump intervals track 1 + exp(-t) ----------------
void criterion_5() {
  Scenario s(Digraph(2));
  s.graph.add_edge(0, 1, 1.0);
  const PiecewiseScalarFn f({-1.0, 1.0},
                            {Segment::affine(1.0, 1.0), Segment::affine(1.0, 0.0),
                             Segment::affine(1.0, -1.0)},
                            {-1.0, 1.0});
  s.node_fns = {f, f};
  s.x0 = {0.0, 2.0};
  s.horizon = 10.0;
  s.integrator.epsilon = 1e-3;
  s.integrator.h = 1e-4;
  const Trajectory t = simulate(s);
  double worst = 0.0;
  for (std::size_t k = 0; k < t.times.size(); ++k)
    worst = std::max(worst, std::abs(t.states[k][1] - (1.0 + std::exp(-t.times[k]))));
  const bool final_ok =
      std::abs(t.states.back()[0]) <= 1e-2 && std::abs(t.states.back()[1] - 1.0) <= 1e-2;
  report(5, worst < 5e-3 && final_ok,
         "touching jumps: x2 tracks 1+exp(-t) within 5e-3, final within 1e-2 of [0,1]");
}

// --- criteria 6 and 10: randomized rooted suites ----------------------------
std::vector<testgen::Theorem1Instance> theorem1_suite() {
  std::mt19937 rng(424242);
  std::vector<testgen::Theorem1Instance> out;
  for (int k = 0; k < 50; ++k) out.push_back(testgen::make_theorem1_instance(rng, 1 + k % 3));
  return out;
}

void criterion_6(const std::vector<testgen::Theorem1Instance>& suite) {
  int bad = 0;
  std::string first_issue;
  for (std::size_t idx = 0; idx < suite.size(); ++idx) {
    const Scenario& scn = suite[idx].scn;
    const AnalysisReport rep = analyze(scn);
    const Trajectory t = simulate(scn);

    bool ok = rep.prediction == Prediction::ConsensusGuaranteed;
    ok = ok && t.classification.kind == ConsensusClass::Consensus;
    ok = ok && t.final_diameter() < 1e-3;

    double lo = scn.x0[0], hi = scn.x0[0];
    for (double v : scn.x0) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    for (const Vec& x : t.states)
      for (double xi : x) ok = ok && xi >= lo - 1e-2 && xi <= hi + 1e-2;

    const double radius = norm_inf(build_laplacian(scn.graph)) * (norm_inf(scn.x0) + 1.0);
    double bound = 0.0;
    for (const auto& fn : scn.node_fns) bound = std::max(bound, fn.sup_abs_on(radius));
    for (std::size_t k = 1; k < t.times.size(); ++k) {
      const double slack = 2.0 * bound * (t.times[k] - t.times[k - 1]);
      ok = ok && t.v_channel[k] <= t.v_channel[k - 1] + slack;
      ok = ok && t.w_channel[k] <= t.w_channel[k - 1] + slack;
    }
    if (!ok) {
      ++bad;
      if (first_issue.empty())
        first_issue = " (first failure at instance " + std::to_string(idx) + ")";
    }
  }
  report(6, bad == 0,
         "50 rooted scenarios: consensus, diameter < 1e-3, monotone envelopes, box "
         "invariance" +
             first_issue);
}

void criterion_10(const std::vector<testgen::Theorem1Instance>& suite) {
  int bad = 0;
  for (int k = 0; k < 10; ++k) {
    Scenario coarse = suite[k].scn;
    coarse.integrator.epsilon = 1e-2;
    coarse.integrator.h = 1e-3;
    Scenario fine = suite[k].scn;
    fine.integrator.epsilon = 1.25e-3;
    fine.integrator.h = 1.25e-4;
    const Trajectory tc = simulate(coarse);
    const Trajectory tf = simulate(fine);
    const bool ok = tc.classification.kind == ConsensusClass::Consensus &&
                    tf.classification.kind == ConsensusClass::Consensus &&
                    std::abs(tc.classification.value - tf.classification.value) < 1e-3;
    if (!ok) ++bad;
  }
  report(10, bad == 0,
         "10 scenarios: consensus value stable under (eps, h) -> (eps/8, h/8) within 1e-3");
}

// --- criterion 7: undirected edge protocol suite ----------------------------
void criterion_7() {
  std::mt19937 rng(171717);
  int bad = 0;
  for (int k = 0; k < 25; ++k) {
    const bool antisymmetric = k % 2 == 0;
    const Scenario scn = testgen::make_theorem2_instance(rng, antisymmetric);
    const Trajectory t = simulate(scn);
    bool ok = t.classification.kind == ConsensusClass::Consensus;
    if (antisymmetric) {
      const double n = static_cast<double>(scn.size());
      double mean0 = 0.0;
      for (double v : scn.x0) mean0 += v;
      const double sum0 = mean0;
      mean0 /= n;
      ok = ok && std::abs(t.classification.value - mean0) <= 1e-3;
      for (double su : t.sum) ok = ok && std::abs(su - sum0) < 1e-3;
    }
    if (!ok) ++bad;
  }
  report(7, bad == 0,
         "25 undirected jump-paired suites: consensus; antisymmetric cases keep the average");
}

// --- criterion 8: error dynamics of the sign triangle ----------------------
void criterion_8() {
  Scenario s(unit_triangle());
  for (auto& f : s.node_fns) f = PiecewiseScalarFn::sign();
  s.x0 = {0.0, 1.0, 2.0};
  s.horizon = 10.0;
  const ErrorTrajectory e = simulate_error(s);

  bool ok = e.norm1.back() < 1e-3;
  for (std::size_t k = 0; k < e.times.size(); ++k)
    ok = ok && std::abs(e.v1_channel[k] - e.norm1[k]) <= 1e-9;
  // slack 2 n M^2 |L|: n = 3, sup|f| = 1, |L|_inf = 4
  for (std::size_t k = 1; k < e.times.size(); ++k) {
    const double slack = 24.0 * (e.times[k] - e.times[k - 1]);
    ok = ok && e.v1_channel[k] <= e.v1_channel[k - 1] + slack;
  }
  ok = ok && ph_decompose(s.graph).psd_ok;
  report(8, ok,
         "error dynamics: |z|_1 below 1e-3, potential equals |z|_1 (1e-9) and decreases, "
         "psd split");
}

// --- criterion 9: exact set vs direction sampling ---------------------------
void criterion_9() {
  std::mt19937 rng(31337);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int bad = 0;
  for (int k = 0; k < 20; ++k) {
    const auto inst = testgen::make_filippov_instance(rng, k);
    const auto s = LinearArgumentStructure::for_scenario(inst.scn);
    const auto poly = filippov_set(s, inst.x);

    const int n = inst.scn.size();
    std::vector<Vec> samples;
    samples.reserve(10000);
    for (int rep = 0; rep < 10000; ++rep) {
      Vec d(n);
      for (double& di : d) di = gauss(rng);
      const double norm = std::sqrt(dot(d, d));
      Vec y(inst.x);
      for (int i = 0; i < n; ++i) y[i] += 1e-7 * d[i] / norm;
      samples.push_back(testgen::oracle_protocol_value(inst.scn, y));
    }
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end(),
                              [](const Vec& a, const Vec& b) {
                                double dmax = 0.0;
                                for (std::size_t i = 0; i < a.size(); ++i)
                                  dmax = std::max(dmax, std::abs(a[i] - b[i]));
                                return dmax <= 1e-8;
                              }),
                  samples.end());

    bool ok = true;
    for (const Vec& p : samples) ok = ok && hull_contains(poly, p, 1e-6);
    const FilippovPolytope sampled{n, samples};
    for (const Vec& v : poly.vertices) ok = ok && hull_contains(sampled, v, 1e-6);
    if (!ok) ++bad;
  }
  report(9, bad == 0,
         "20 instances: exact set and 10000-direction sampled hull agree within 1e-6");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  const auto suite = theorem1_suite();
  criterion_6(suite);
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10(suite);
  if (failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
