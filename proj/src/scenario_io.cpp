#include "nscon/scenario_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nscon/errors.hpp"

namespace nscon {

using nlohmann::json;

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where, const std::string& source) {
  if (!obj.is_object()) throw ParseError(where + " must be a JSON object", source);
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      throw ParseError("unknown key \"" + key + "\" in " + where, source);
  }
}

double as_number(const json& v, const std::string& what, const std::string& source) {
  if (!v.is_number()) throw ParseError(what + " must be a number", source);
  return v.get<double>();
}

int as_int(const json& v, const std::string& what, const std::string& source) {
  if (!v.is_number_integer()) throw ParseError(what + " must be an integer", source);
  return v.get<int>();
}

Segment parse_segment(const json& j, const std::string& source) {
  if (!j.is_object()) throw ParseError("segment must be an object", source);
  const std::string kind = j.value("kind", "");
  if (kind == "constant") {
    require_keys(j, {"kind", "c"}, "constant segment", source);
    return Segment::constant(as_number(j.at("c"), "constant c", source));
  }
  if (kind == "affine") {
    require_keys(j, {"kind", "a", "b"}, "affine segment", source);
    return Segment::affine(as_number(j.at("a"), "affine a", source),
                           as_number(j.at("b"), "affine b", source));
  }
  if (kind == "saturation") {
    require_keys(j, {"kind", "lo", "hi"}, "saturation segment", source);
    return Segment::saturation(as_number(j.at("lo"), "saturation lo", source),
                               as_number(j.at("hi"), "saturation hi", source));
  }
  if (kind == "power") {
    require_keys(j, {"kind", "c", "p"}, "power segment", source);
    return Segment::power(as_number(j.at("c"), "power c", source),
                          as_number(j.at("p"), "power p", source));
  }
  throw ParseError("segment kind must be constant|affine|saturation|power", source);
}

PiecewiseScalarFn parse_fn(const json& j, const std::string& source) {
  if (!j.is_object()) throw ParseError("function descriptor must be an object", source);
  if (j.contains("preset")) {
    const std::string preset = j.at("preset").get<std::string>();
    if (preset == "sign") {
      require_keys(j, {"preset", "scale"}, "sign preset", source);
      return PiecewiseScalarFn::sign(j.value("scale", 1.0));
    }
    if (preset == "sat") {
      require_keys(j, {"preset", "lo", "hi"}, "sat preset", source);
      return PiecewiseScalarFn::sat(j.value("lo", -1.0), j.value("hi", 1.0));
    }
    if (preset == "identity") {
      require_keys(j, {"preset", "slope"}, "identity preset", source);
      return PiecewiseScalarFn::identity(j.value("slope", 1.0));
    }
    if (preset == "deadzone") {
      require_keys(j, {"preset", "halfwidth", "slope"}, "deadzone preset", source);
      return PiecewiseScalarFn::deadzone(j.value("halfwidth", 0.5), j.value("slope", 1.0));
    }
    if (preset == "quantizer") {
      require_keys(j, {"preset", "gain", "ratio", "levels"}, "quantizer preset", source);
      return PiecewiseScalarFn::log_quantizer(j.value("gain", 1.0), j.value("ratio", 0.5),
                                              j.value("levels", 3));
    }
    if (preset == "jump") {
      require_keys(j, {"preset", "neg", "pos"}, "jump preset", source);
      return PiecewiseScalarFn::jump(j.value("neg", -1.0), j.value("pos", 1.0));
    }
    throw ParseError("unknown preset \"" + preset + "\"", source);
  }

  require_keys(j, {"breakpoints", "segments", "point_values"}, "function descriptor", source);
  if (!j.contains("breakpoints") || !j.contains("segments"))
    throw ParseError("explicit function needs breakpoints and segments", source);
  std::vector<double> bps;
  for (const auto& b : j.at("breakpoints")) bps.push_back(as_number(b, "breakpoint", source));
  std::vector<Segment> segs;
  for (const auto& s : j.at("segments")) segs.push_back(parse_segment(s, source));
  std::vector<double> pvs;
  if (j.contains("point_values")) {
    for (const auto& v : j.at("point_values")) pvs.push_back(as_number(v, "point value", source));
  } else {
    pvs.assign(bps.size(), 0.0);
  }
  try {
    return PiecewiseScalarFn(std::move(bps), std::move(segs), std::move(pvs));
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), source);
  }
}

json fn_to_json(const PiecewiseScalarFn& f) {
  json j;
  j["breakpoints"] = f.breakpoints();
  j["point_values"] = f.point_values();
  json segs = json::array();
  for (const Segment& s : f.segments()) {
    json sj;
    switch (s.kind) {
      case Segment::Kind::Constant:
        sj = {{"kind", "constant"}, {"c", s.b}};
        break;
      case Segment::Kind::Affine:
        sj = {{"kind", "affine"}, {"a", s.a}, {"b", s.b}};
        break;
      case Segment::Kind::Saturation:
        sj = {{"kind", "saturation"}, {"lo", s.lo}, {"hi", s.hi}};
        break;
      case Segment::Kind::Power:
        sj = {{"kind", "power"}, {"c", s.c}, {"p", s.p}};
        break;
    }
    segs.push_back(sj);
  }
  j["segments"] = segs;
  return j;
}

}  // namespace

const char* to_string(Scheme s) {
  return s == Scheme::Smoothed ? "smoothed" : "event_euler";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "smoothed") return Scheme::Smoothed;
  if (name == "event_euler") return Scheme::EventEuler;
  throw ParseError("scheme must be smoothed|event_euler, got \"" + name + "\"");
}

Scenario parse_scenario(const std::string& text, const std::string& source_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what(),
                     source_name, e.byte);
  }
  if (!root.is_object()) throw ParseError("scenario must be a JSON object", source_name);
  require_keys(root, {"graph", "node_fns", "edge_fns", "x0", "sim"}, "scenario", source_name);

  if (!root.contains("graph")) throw ParseError("missing graph section", source_name);
  const json& jg = root.at("graph");
  require_keys(jg, {"n", "edges"}, "graph", source_name);
  if (!jg.contains("n")) throw ParseError("graph needs a node count n", source_name);
  const int n = as_int(jg.at("n"), "graph.n", source_name);
  if (n <= 0) throw ParseError("graph.n must be positive", source_name);

  Digraph g(n);
  if (jg.contains("edges")) {
    for (const auto& je : jg.at("edges")) {
      if (!je.is_array() || je.size() != 3)
        throw ParseError("each edge must be [from, to, weight]", source_name);
      const int from = as_int(je[0], "edge from", source_name);
      const int to = as_int(je[1], "edge to", source_name);
      const double w = as_number(je[2], "edge weight", source_name);
      if (from < 1 || from > n || to < 1 || to > n)
        throw ParseError("edge endpoints must be in 1.." + std::to_string(n), source_name);
      try {
        g.add_edge(from - 1, to - 1, w);
      } catch (const ConfigError& e) {
        throw ParseError(e.what(), source_name);
      }
    }
  }

  Scenario scn(std::move(g));

  if (root.contains("node_fns")) {
    const json& jn = root.at("node_fns");
    if (!jn.is_object()) throw ParseError("node_fns must be an object", source_name);
    if (jn.contains("*")) {
      const PiecewiseScalarFn f = parse_fn(jn.at("*"), source_name);
      for (int i = 0; i < n; ++i) scn.node_fns[i] = f;
    }
    for (const auto& [key, value] : jn.items()) {
      if (key == "*") continue;
      int idx = 0;
      try {
        idx = std::stoi(key);
      } catch (...) {
        throw ParseError("node_fns keys must be node indices or \"*\", got \"" + key + "\"",
                         source_name);
      }
      if (idx < 1 || idx > n)
        throw ParseError("node_fns index " + key + " out of range", source_name);
      scn.node_fns[idx - 1] = parse_fn(value, source_name);
    }
  }

  if (root.contains("edge_fns")) {
    const json& je = root.at("edge_fns");
    if (!je.is_array()) throw ParseError("edge_fns must be an array", source_name);
    for (const auto& entry : je) {
      if (!entry.is_object()) throw ParseError("edge_fns entries must be objects", source_name);
      require_keys(entry, {"from", "to", "fn"}, "edge_fns entry", source_name);
      if (!entry.contains("from") || !entry.contains("to") || !entry.contains("fn"))
        throw ParseError("edge_fns entries need from, to and fn", source_name);
      const int from = as_int(entry.at("from"), "edge_fns from", source_name);
      const int to = as_int(entry.at("to"), "edge_fns to", source_name);
      if (from < 1 || from > n || to < 1 || to > n)
        throw ParseError("edge_fns endpoints must be in 1.." + std::to_string(n), source_name);
      scn.edge_fns.insert_or_assign(std::make_pair(to - 1, from - 1),
                                    parse_fn(entry.at("fn"), source_name));
    }
  }

  if (!root.contains("x0")) throw ParseError("missing x0", source_name);
  if (!root.at("x0").is_array()) throw ParseError("x0 must be an array", source_name);
  scn.x0.clear();
  for (const auto& v : root.at("x0")) scn.x0.push_back(as_number(v, "x0 entry", source_name));

  if (root.contains("sim")) {
    const json& js = root.at("sim");
    require_keys(js,
                 {"scheme", "h", "epsilon", "horizon", "consensus_tol", "consensus_window",
                  "seed"},
                 "sim", source_name);
    if (js.contains("scheme"))
      scn.integrator.scheme = scheme_from_string(js.at("scheme").get<std::string>());
    if (js.contains("h")) scn.integrator.h = as_number(js.at("h"), "sim.h", source_name);
    if (js.contains("epsilon"))
      scn.integrator.epsilon = as_number(js.at("epsilon"), "sim.epsilon", source_name);
    if (js.contains("horizon"))
      scn.horizon = as_number(js.at("horizon"), "sim.horizon", source_name);
    if (js.contains("consensus_tol"))
      scn.integrator.consensus_tol =
          as_number(js.at("consensus_tol"), "sim.consensus_tol", source_name);
    if (js.contains("consensus_window"))
      scn.integrator.consensus_window =
          as_number(js.at("consensus_window"), "sim.consensus_window", source_name);
    if (js.contains("seed"))
      scn.integrator.seed = static_cast<unsigned>(as_int(js.at("seed"), "sim.seed", source_name));
  }

  try {
    scn.validate();
  } catch (const ConfigError& e) {
    throw ParseError(e.what(), source_name);
  }
  return scn;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return parse_scenario(buf.str(), path);
}

std::string serialize_scenario(const Scenario& s) {
  json root;
  json jg;
  jg["n"] = s.size();
  json edges = json::array();
  for (const auto& e : s.graph.edges())
    edges.push_back(json::array({e.from + 1, e.to + 1, e.weight}));
  jg["edges"] = edges;
  root["graph"] = jg;

  json jn = json::object();
  for (int i = 0; i < s.size(); ++i) jn[std::to_string(i + 1)] = fn_to_json(s.node_fns[i]);
  root["node_fns"] = jn;

  if (!s.edge_fns.empty()) {
    json je = json::array();
    for (const auto& [key, fn] : s.edge_fns) {
      json entry;
      entry["from"] = key.second + 1;
      entry["to"] = key.first + 1;
      entry["fn"] = fn_to_json(fn);
      je.push_back(entry);
    }
    root["edge_fns"] = je;
  }

  root["x0"] = s.x0;

  json js;
  js["scheme"] = to_string(s.integrator.scheme);
  js["h"] = s.integrator.h;
  js["epsilon"] = s.integrator.epsilon;
  js["horizon"] = s.horizon;
  js["consensus_tol"] = s.integrator.consensus_tol;
  js["consensus_window"] = s.integrator.consensus_window;
  js["seed"] = s.integrator.seed;
  root["sim"] = js;

  return root.dump(2);
}

namespace {

void append_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj, int thin) {
  if (thin < 1) thin = 1;
  const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",x_" + std::to_string(i);
  out += ",V,W,diameter,sum\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (k % thin != 0 && k + 1 != traj.times.size()) continue;
    append_g17(out, traj.times[k]);
    for (int i = 0; i < n; ++i) {
      out += ',';
      append_g17(out, traj.states[k][i]);
    }
    out += ',';
    append_g17(out, traj.v_channel[k]);
    out += ',';
    append_g17(out, traj.w_channel[k]);
    out += ',';
    append_g17(out, traj.diameter[k]);
    out += ',';
    append_g17(out, traj.sum[k]);
    out += '\n';
  }
  return out;
}

std::string error_csv(const ErrorTrajectory& traj, int thin) {
  if (thin < 1) thin = 1;
  const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",z_" + std::to_string(i);
  out += ",norm1,V1\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (k % thin != 0 && k + 1 != traj.times.size()) continue;
    append_g17(out, traj.times[k]);
    for (int i = 0; i < n; ++i) {
      out += ',';
      append_g17(out, traj.states[k][i]);
    }
    out += ',';
    append_g17(out, traj.norm1[k]);
    out += ',';
    append_g17(out, traj.v1_channel[k]);
    out += '\n';
  }
  return out;
}

std::string summary_line(const Trajectory& traj) {
  std::string out = "classification=";
  out += to_string(traj.classification.kind);
  out += " value=";
  append_g17(out, traj.classification.value);
  out += " final_diameter=";
  append_g17(out, traj.final_diameter());
  out += " scheme=";
  out += to_string(traj.scheme);
  if (traj.classification.kind == ConsensusClass::SlidingConsensus) {
    out += " rate=";
    append_g17(out, traj.classification.rate);
  }
  return out;
}

}  // namespace nscon
