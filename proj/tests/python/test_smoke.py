#!/usr/bin/env python3
"""Smoke tests for the python module against the bundled scenarios."""

import json
import math
import os
import sys

MODULE_DIR = sys.argv[1] if len(sys.argv) > 1 else None
DATA_DIR = sys.argv[2] if len(sys.argv) > 2 else "data"
if MODULE_DIR:
    sys.path.insert(0, MODULE_DIR)

import nsconsensus as nc  # noqa: E402

checks = 0


def check(ok, what):
    global checks
    checks += 1
    if not ok:
        raise SystemExit(f"FAILED: {what}")
    print(f"ok: {what}")


def data(name):
    return os.path.join(DATA_DIR, "examples", name)


# graph facts and the Laplacian convention
g = nc.Digraph(2)
g.add_edge(0, 1, 1.0)
lap = g.laplacian()
check(lap[0] == [0.0, 0.0] and lap[1] == [-1.0, 1.0], "laplacian of the one-edge digraph")
facts = nc.compute_facts(g)
check(facts.roots == [0] and facts.has_spanning_tree, "single root detected")

# piecewise algebra
sign = nc.PiecewiseScalarFn.sign()
check(sign(0.5) == 1.0 and sign(0.0) == 0.0, "sign evaluation")
check(sign.scalar_filippov(0.0) == (-1.0, 1.0), "sign closure at the jump")
check(sign.predicates().sign_preserving, "sign is sign-preserving")
check(not nc.PiecewiseScalarFn.sat(0.0, 1.0).predicates().sign_preserving,
      "one-sided saturation is not")

# exact set at consensus for the sign triangle
scn = nc.load_scenario_file(data("ex03.json"))
poly = nc.filippov_at(scn, [0.0, 0.0, 0.0])
check(len(poly.vertices) == 6, "six vertices at consensus")
lo, hi = nc.sliding_range(poly)
check(abs(lo + 1.0 / 3.0) < 1e-9 and abs(hi - 1.0 / 3.0) < 1e-9, "sliding range [-1/3, 1/3]")
check(nc.hull_contains(poly, [1.0 / 3.0] * 3), "eta = 1/3 drift inside the hull")
check(not nc.hull_contains(poly, [1.0] * 3), "eta = 1 drift outside the hull")

# simulation: the single-root pair settles at the root state
traj = nc.simulate(nc.load_scenario_file(data("ex06.json")))
check(traj.classification.kind == "Consensus", "single-root pair reaches consensus")
check(abs(traj.classification.value) < 1e-3, "consensus value 0")
check(traj.csv().startswith("t,x_1,x_2,V,W,diameter,sum"), "csv header")

# analysis: condition (i) guarantees consensus
rep = nc.analyze(nc.load_scenario_file(data("ex05.json")))
check(rep["theorem1"] == "i", "condition (i) detected")
check(rep["prediction"] == "ConsensusGuaranteed", "consensus guaranteed")

# analysis: asymmetric two-root pair can slide at 1/2
rep7 = nc.analyze(nc.load_scenario_file(data("ex07b.json")))
check(rep7["prediction"] == "SlidingPossible", "sliding flagged")
check(abs(rep7["sliding_eta"][0] - 0.5) < 1e-9, "drift rate pinned at 1/2")

# error dynamics contract in the 1-norm
err = nc.simulate_error(nc.load_scenario_file(data("ex10.json")))
check(err.norm1[-1] < 1e-3, "error 1-norm decays")
check(max(abs(a - b) for a, b in zip(err.v1_channel, err.norm1)) < 1e-9,
      "potential equals the 1-norm")

ph = nc.ph_decompose(nc.load_scenario_file(data("ex10.json")).graph)
check(ph["psd_ok"], "symmetric part psd")

# scenario round trip
text = nc.serialize_scenario(scn)
check(json.loads(text)["graph"]["n"] == 3, "serialized scenario is json")

print(f"all {checks} smoke checks passed")
