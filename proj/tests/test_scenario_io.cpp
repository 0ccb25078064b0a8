#include <doctest.h>

#include <cmath>

#include "nscon/errors.hpp"
#include "nscon/scenario_io.hpp"

using namespace nscon;

namespace {

const char* kMinimal = R"({
  "graph": {"n": 2, "edges": [[1, 2, 1.0]]},
  "node_fns": {"*": {"preset": "sat", "lo": 0.0, "hi": 1.0}},
  "x0": [0.0, 1.0],
  "sim": {"scheme": "smoothed", "h": 1e-3, "epsilon": 1e-2, "horizon": 10.0}
})";

}  // namespace

TEST_CASE("parsing the minimal scenario") {
  const Scenario s = parse_scenario(kMinimal);
  CHECK(s.size() == 2);
  CHECK(s.graph.weight(1, 0) == 1.0);  // a_21: edge v1 -> v2
  CHECK(s.graph.weight(0, 1) == 0.0);
  CHECK(s.x0 == Vec{0.0, 1.0});
  CHECK(s.horizon == 10.0);
  CHECK(s.integrator.scheme == Scheme::Smoothed);
  CHECK(s.node_fns[0].eval(-2.0) == 0.0);  // sat(.; 0, 1)
  CHECK(s.node_fns[1].eval(2.0) == 1.0);
}

TEST_CASE("unknown keys are rejected everywhere") {
  CHECK_THROWS_AS(parse_scenario(R"({"graph": {"n": 1}, "x0": [0], "bogus": 1})"), ParseError);
  CHECK_THROWS_AS(
      parse_scenario(R"({"graph": {"n": 1, "loops": []}, "x0": [0]})"), ParseError);
  CHECK_THROWS_AS(
      parse_scenario(
          R"({"graph": {"n": 1}, "x0": [0], "sim": {"dt": 0.1}})"),
      ParseError);
  CHECK_THROWS_AS(
      parse_scenario(
          R"({"graph": {"n": 2, "edges": [[1,2,1]]}, "x0": [0,0], "node_fns": {"1": {"preset": "sign", "width": 2}}})"),
      ParseError);
}

TEST_CASE("malformed JSON reports a byte position") {
  try {
    parse_scenario("{\"graph\": {", "broken.json");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.source_name == "broken.json");
    CHECK(std::string(e.what()).find("byte") != std::string::npos);
  }
}

TEST_CASE("structural validation errors") {
  // missing graph
  CHECK_THROWS_AS(parse_scenario(R"({"x0": [0]})"), ParseError);
  // x0 length mismatch
  CHECK_THROWS_AS(parse_scenario(R"({"graph": {"n": 2}, "x0": [0]})"), ParseError);
  // edge function on an absent edge
  CHECK_THROWS_AS(parse_scenario(R"({
    "graph": {"n": 2, "edges": [[1, 2, 1.0]]},
    "edge_fns": [{"from": 2, "to": 1, "fn": {"preset": "sign"}}],
    "x0": [0, 0]
  })"),
                  ParseError);
  // node function index out of range
  CHECK_THROWS_AS(parse_scenario(R"({
    "graph": {"n": 2, "edges": [[1, 2, 1.0]]},
    "node_fns": {"3": {"preset": "sign"}},
    "x0": [0, 0]
  })"),
                  ParseError);
  // 1-based indices
  CHECK_THROWS_AS(parse_scenario(R"({"graph": {"n": 2, "edges": [[0, 1, 1.0]]}, "x0": [0, 0]})"),
                  ParseError);
}

TEST_CASE("round trip: parse, serialize, parse") {
  const char* full = R"({
    "graph": {"n": 3, "edges": [[1, 2, 1.0], [2, 1, 0.5], [2, 3, 2.0]]},
    "node_fns": {
      "1": {"preset": "quantizer", "gain": 1.5, "ratio": 0.5, "levels": 3},
      "2": {"preset": "sign", "scale": 2.0},
      "3": {"breakpoints": [0.0], "point_values": [0.0],
             "segments": [{"kind": "power", "c": 1.0, "p": 0.7},
                          {"kind": "power", "c": 1.0, "p": 0.7}]}
    },
    "edge_fns": [{"from": 1, "to": 2, "fn": {"preset": "jump", "neg": -0.5, "pos": 1.5}}],
    "x0": [0.25, -1.0, 3.5],
    "sim": {"scheme": "event_euler", "h": 1e-4, "epsilon": 1e-3, "horizon": 7.5,
            "consensus_tol": 1e-5, "consensus_window": 0.5, "seed": 42}
  })";
  const Scenario a = parse_scenario(full);
  const Scenario b = parse_scenario(serialize_scenario(a));
  CHECK(a == b);
  // serialization is stable
  CHECK(serialize_scenario(a) == serialize_scenario(b));
}

TEST_CASE("trajectory CSV shape and determinism") {
  const Scenario s = parse_scenario(kMinimal);
  const Trajectory t1 = simulate(s);
  const Trajectory t2 = simulate(s);
  const std::string c1 = trajectory_csv(t1);
  const std::string c2 = trajectory_csv(t2);
  CHECK(c1 == c2);
  CHECK(c1.rfind("t,x_1,x_2,V,W,diameter,sum\n", 0) == 0);

  // thinning keeps the header, the stride and the final row
  const std::string thin = trajectory_csv(t1, 100);
  CHECK(std::count(thin.begin(), thin.end(), '\n') <
        std::count(c1.begin(), c1.end(), '\n'));
  const std::size_t last_t1 = c1.rfind('\n', c1.size() - 2);
  const std::size_t last_thin = thin.rfind('\n', thin.size() - 2);
  CHECK(c1.substr(last_t1) == thin.substr(last_thin));
}

TEST_CASE("summary line carries the classification fields") {
  const Scenario s = parse_scenario(kMinimal);
  const Trajectory t = simulate(s);
  const std::string line = summary_line(t);
  CHECK(line.find("classification=NonConsensus") != std::string::npos);
  CHECK(line.find("value=") != std::string::npos);
  CHECK(line.find("final_diameter=") != std::string::npos);
  CHECK(line.find("scheme=smoothed") != std::string::npos);
}

TEST_CASE("scheme names") {
  CHECK(scheme_from_string("smoothed") == Scheme::Smoothed);
  CHECK(scheme_from_string("event_euler") == Scheme::EventEuler);
  CHECK_THROWS_AS(scheme_from_string("rk45"), ParseError);
}
