// nscon: analyze, simulate and reproduce nonsmooth consensus scenarios.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nscon/analysis.hpp"
#include "nscon/dynamics.hpp"
#include "nscon/errors.hpp"
#include "nscon/filippov.hpp"
#include "nscon/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace nscon;

#ifndef NSCON_DATA_DIR_DEFAULT
#define NSCON_DATA_DIR_DEFAULT "data"
#endif

namespace {

constexpr int kExitGuaranteed = 0;
constexpr int kExitSliding = 2;
constexpr int kExitNoGuarantee = 3;
constexpr int kExitParse = 64;
constexpr int kExitIo = 66;
constexpr int kExitRuntime = 1;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct CliOptions {
  std::string scenario_path;
  std::string out;
  std::string at;
  bool error_dynamics = false;
  std::optional<std::string> scheme;
  std::optional<double> h;
  std::optional<double> epsilon;
  std::optional<unsigned> seed;
  int thin = 1;
  int example_id = 0;
  std::vector<double> sweep_h;
  std::vector<double> sweep_epsilon;
  std::string data_dir;
};

void apply_overrides(Scenario& s, const CliOptions& opt) {
  if (opt.scheme) s.integrator.scheme = scheme_from_string(*opt.scheme);
  if (opt.h) s.integrator.h = *opt.h;
  if (opt.epsilon) s.integrator.epsilon = *opt.epsilon;
  if (opt.seed) s.integrator.seed = *opt.seed;
}

Vec parse_vector(const std::string& text) {
  Vec out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw ParseError("cannot parse vector component \"" + item + "\"");
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  if (path.empty()) return;
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
}

void print_report(const AnalysisReport& rep) {
  auto index_list = [](const std::vector<int>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(v[i] + 1);
    }
    return s + "}";
  };
  std::cout << "roots = " << index_list(rep.roots) << "\n";
  std::cout << "continuity_set = " << index_list(rep.continuity_set) << "\n";
  std::cout << "assumption1_ok = " << (rep.assumption1_ok ? "true" : "false") << "\n";
  std::cout << "assumption2_ok = " << (rep.assumption2_ok ? "true" : "false") << "\n";
  std::cout << "theorem1 = " << to_string(rep.theorem1) << "\n";
  std::cout << "theorem2 = " << (rep.theorem2 ? "true" : "false") << "\n";
  std::cout << "theorem3 = " << (rep.theorem3 ? "true" : "false") << "\n";
  std::cout << "theorem4 = " << to_string(rep.theorem4) << "\n";
  std::cout << "theorem5 = " << (rep.theorem5 ? "true" : "false") << "\n";
  if (rep.sliding_eta)
    std::cout << "sliding_eta = [" << g6(rep.sliding_eta->first) << ", "
              << g6(rep.sliding_eta->second) << "]\n";
  if (rep.ph_split)
    std::cout << "ph_psd_ok = " << (rep.ph_split->psd_ok ? "true" : "false")
              << " (min eigenvalue " << g6(rep.ph_split->min_eigenvalue) << ")\n";
  std::cout << "prediction = " << to_string(rep.prediction) << "\n";
}

int cmd_analyze(const CliOptions& opt) {
  const Scenario s = [&] {
    Scenario scn = load_scenario_file(opt.scenario_path);
    apply_overrides(scn, opt);
    return scn;
  }();
  const AnalysisReport rep = analyze(s);
  print_report(rep);
  switch (rep.prediction) {
    case Prediction::ConsensusGuaranteed:
    case Prediction::ErrorConvergenceGuaranteed:
      return kExitGuaranteed;
    case Prediction::SlidingPossible:
      return kExitSliding;
    case Prediction::NoGuarantee:
      return kExitNoGuarantee;
  }
  return kExitRuntime;
}

int cmd_simulate(const CliOptions& opt) {
  Scenario s = load_scenario_file(opt.scenario_path);
  apply_overrides(s, opt);
  if (opt.error_dynamics) {
    const ErrorTrajectory err = simulate_error(s);
    if (!opt.out.empty()) write_file(opt.out, error_csv(err, opt.thin));
    std::cout << "final_norm1=" << g17(err.norm1.back())
              << " final_V1=" << g17(err.v1_channel.back()) << "\n";
    return 0;
  }
  const Trajectory traj = simulate(s);
  if (!opt.out.empty()) write_file(opt.out, trajectory_csv(traj, opt.thin));
  std::cout << summary_line(traj) << "\n";
  return 0;
}

int cmd_filippov(const CliOptions& opt) {
  const Scenario s = load_scenario_file(opt.scenario_path);
  Vec x = s.x0;
  if (!opt.at.empty()) x = parse_vector(opt.at);
  if (static_cast<int>(x.size()) != s.size())
    throw ParseError("--at needs " + std::to_string(s.size()) + " components");

  const auto structure = LinearArgumentStructure::for_scenario(s);
  const FilippovPolytope poly = filippov_set(structure, x);
  std::cout << "vertices = " << poly.vertices.size() << "\n";
  for (const Vec& v : poly.vertices) {
    std::cout << "  [";
    for (std::size_t i = 0; i < v.size(); ++i) std::cout << (i ? ", " : "") << g6(v[i]);
    std::cout << "]\n";
  }
  const auto range = sliding_range(poly);
  if (range)
    std::cout << "sliding_range = [" << g6(range->first) << ", " << g6(range->second) << "]\n";
  else
    std::cout << "sliding_range = empty\n";
  return 0;
}

// ---------------------------------------------------------------------------
// reproduce: bundled scenarios with their documented expectations
// ---------------------------------------------------------------------------

struct CheckList {
  bool all_ok = true;
  void check(bool ok, const std::string& what) {
    std::cout << (ok ? "  [ok]   " : "  [FAIL] ") << what << "\n";
    all_ok = all_ok && ok;
  }
};

std::string data_file(const CliOptions& opt, const std::string& name) {
  fs::path dir;
  if (!opt.data_dir.empty()) {
    dir = opt.data_dir;
  } else if (const char* env = std::getenv("NSCON_DATA_DIR")) {
    dir = env;
  } else {
    dir = fs::path(NSCON_DATA_DIR_DEFAULT);
  }
  return (dir / "examples" / name).string();
}

int cmd_reproduce(const CliOptions& opt) {
  const int id = opt.example_id;
  const std::string outdir =
      opt.out.empty() ? ("reproduce-" + std::to_string(id)) : opt.out;
  fs::create_directories(outdir);
  CheckList c;
  std::cout << "example " << id << "\n";

  auto load = [&](const std::string& name) { return load_scenario_file(data_file(opt, name)); };
  auto save_traj = [&](const Trajectory& t, const std::string& name) {
    write_file((fs::path(outdir) / name).string(), trajectory_csv(t));
  };

  switch (id) {
    case 1: {
      const Scenario s = load("ex01.json");
      const Trajectory t = simulate(s);
      save_traj(t, "trajectory.csv");
      const Vec& xf = t.states.back();
      c.check(std::abs(xf[0] - 0.0) < 1e-9 && std::abs(xf[1] - 1.0) < 1e-9,
              "final state stays at [0, 1]");
      c.check(t.classification.kind == ConsensusClass::NonConsensus,
              "classified NonConsensus");
      break;
    }
    case 2: {
      const Scenario s = load("ex02.json");
      const Trajectory t = simulate(s);
      save_traj(t, "trajectory.csv");
      double worst = 0.0;
      for (std::size_t k = 0; k < t.times.size(); ++k)
        worst = std::max(worst,
                         std::abs(t.states[k][1] - (1.0 + std::exp(-t.times[k]))));
      c.check(worst < 5e-3, "x2 tracks 1 + exp(-t), max error " + g6(worst));
      const Vec& xf = t.states.back();
      c.check(std::abs(xf[0]) < 1e-2 && std::abs(xf[1] - 1.0) < 1e-2,
              "final state near [0, 1]");
      break;
    }
    case 3: {
      const Scenario s = load("ex03.json");
      const auto structure = LinearArgumentStructure::for_scenario(s);
      const auto poly = filippov_set(structure, Vec(3, 0.0));
      c.check(poly.vertices.size() == 6, "six extreme velocity vectors at consensus");
      const auto range = sliding_range(poly);
      c.check(range && std::abs(range->first + 1.0 / 3.0) < 1e-9 &&
                  std::abs(range->second - 1.0 / 3.0) < 1e-9,
              "sliding range [-1/3, 1/3]");
      break;
    }
    case 4: {
      const Scenario s = load("ex04.json");
      const AnalysisReport rep = analyze(s);
      c.check(rep.theorem1 == TheoremCondition::CondI, "condition (i) applies");
      const Trajectory t = simulate(s);
      save_traj(t, "trajectory.csv");
      c.check(t.classification.kind == ConsensusClass::Consensus, "consensus reached");
      break;
    }
    case 5: {
      const Scenario s = load("ex05.json");
      const AnalysisReport rep = analyze(s);
      c.check(rep.theorem1 == TheoremCondition::CondI, "condition (i) applies");
      c.check(rep.prediction == Prediction::ConsensusGuaranteed, "consensus guaranteed");
      const Trajectory t = simulate(s);
      save_traj(t, "trajectory.csv");
      c.check(t.classification.kind == ConsensusClass::Consensus, "consensus reached");
      break;
    }
    case 6: {
      const Scenario s = load("ex06.json");
      const Trajectory t = simulate(s);
      save_traj(t, "trajectory.csv");
      c.check(t.classification.kind == ConsensusClass::Consensus, "consensus reached");
      c.check(std::abs(t.classification.value) < 1e-3, "consensus value 0");
      double root_moved = 0.0;
      for (const Vec& x : t.states) root_moved = std::max(root_moved, std::abs(x[0]));
      c.check(root_moved < 1e-12, "root state constant");
      break;
    }
    case 7: {
      const Scenario sa = load("ex07a.json");
      const auto range_a = sliding_range(
          filippov_set(LinearArgumentStructure::for_scenario(sa), Vec(2, 0.0)));
      c.check(range_a && std::abs(range_a->first) < 1e-9 && std::abs(range_a->second) < 1e-9,
              "symmetric jumps: consensus line met only at 0");
      const Trajectory ta = simulate(sa);
      save_traj(ta, "trajectory_a.csv");
      c.check(ta.classification.kind == ConsensusClass::Consensus &&
                  std::abs(ta.classification.value - 0.5) < 1e-3,
              "static consensus at 0.5");

      const Scenario sb = load("ex07b.json");
      const auto range_b = sliding_range(
          filippov_set(LinearArgumentStructure::for_scenario(sb), Vec(2, 0.0)));
      c.check(range_b && std::abs(range_b->first - 0.5) < 1e-9 &&
                  std::abs(range_b->second - 0.5) < 1e-9,
              "asymmetric jumps: drift rate pinned at 1/2");
      const Trajectory tb = simulate(sb);
      save_traj(tb, "trajectory_b.csv");
      c.check(tb.classification.kind == ConsensusClass::SlidingConsensus &&
                  std::abs(tb.classification.rate - 0.5) < 0.01,
              "sliding consensus with mean-state slope 0.5");
      break;
    }
    case 8: {
      const Scenario s = load("ex08.json");
      const auto poly = filippov_set(LinearArgumentStructure::for_scenario(s), Vec(3, 0.0));
      c.check(hull_contains(poly, Vec(3, 1.0)), "all-ones drift is a feasible velocity");
      const AnalysisReport rep = analyze(s);
      c.check(rep.prediction == Prediction::SlidingPossible, "sliding flagged as possible");
      break;
    }
    case 9: {
      const Scenario s = load("ex09.json");
      const auto poly = filippov_set(LinearArgumentStructure::for_scenario(s), Vec(3, 0.0));
      c.check(poly.vertices.size() == 6, "same six extreme velocities as the undirected case");
      const auto range = sliding_range(poly);
      c.check(range && std::abs(range->first + 1.0 / 3.0) < 1e-9 &&
                  std::abs(range->second - 1.0 / 3.0) < 1e-9,
              "sliding range [-1/3, 1/3]");
      const AnalysisReport rep = analyze(s);
      c.check(!rep.theorem2 && !rep.theorem3, "no sufficient condition applies");
      c.check(rep.prediction == Prediction::SlidingPossible, "sliding flagged as possible");
      break;
    }
    case 10: {
      const Scenario s = load("ex10.json");
      const ErrorTrajectory err = simulate_error(s);
      write_file((fs::path(outdir) / "error.csv").string(), error_csv(err));
      c.check(err.norm1.back() < 1e-3, "error 1-norm decays below 1e-3");
      double worst = 0.0;
      for (std::size_t k = 0; k < err.times.size(); ++k)
        worst = std::max(worst, std::abs(err.v1_channel[k] - err.norm1[k]));
      c.check(worst < 1e-9, "potential equals the 1-norm along the run");
      bool monotone = true;
      for (std::size_t k = 1; k < err.v1_channel.size(); ++k) {
        const double slack = 24.0 * (err.times[k] - err.times[k - 1]);
        if (err.v1_channel[k] > err.v1_channel[k - 1] + slack) monotone = false;
      }
      c.check(monotone, "potential nonincreasing (per-step slack)");
      const auto ph = ph_decompose(s.graph);
      c.check(ph.psd_ok, "symmetric part positive semidefinite");
      break;
    }
    default:
      std::cerr << "example id must be 1..10\n";
      return kExitRuntime;
  }
  std::cout << (c.all_ok ? "PASS" : "FAIL") << "\n";
  return c.all_ok ? 0 : kExitRuntime;
}

int cmd_sweep(const CliOptions& opt) {
  Scenario base = load_scenario_file(opt.scenario_path);
  apply_overrides(base, opt);
  std::vector<double> hs = opt.sweep_h.empty() ? std::vector<double>{base.integrator.h}
                                               : opt.sweep_h;
  std::vector<double> eps = opt.sweep_epsilon.empty()
                                ? std::vector<double>{base.integrator.epsilon}
                                : opt.sweep_epsilon;
  for (double h : hs) {
    for (double e : eps) {
      Scenario s = base;
      s.integrator.h = h;
      s.integrator.epsilon = e;
      const Trajectory traj = simulate(s);
      std::cout << "h=" << g6(h) << " epsilon=" << g6(e) << " " << summary_line(traj) << "\n";
      if (!opt.out.empty()) {
        const std::string name = "sweep_h" + g6(h) + "_eps" + g6(e) + ".csv";
        write_file((fs::path(opt.out) / name).string(), trajectory_csv(traj, opt.thin));
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonsmooth consensus protocols: analysis, simulation, exact set computation"};
  app.set_help_flag("--help", "print help");  // keep -h free for the step size
  app.require_subcommand(1);
  CliOptions opt;

  auto add_common = [&](CLI::App* cmd, bool needs_file) {
    cmd->set_help_flag("--help", "print help");  // -h is the step size below
    if (needs_file)
      cmd->add_option("scenario", opt.scenario_path, "scenario file")->required();
    cmd->add_option("--scheme", [&opt](const std::vector<std::string>& v) {
      opt.scheme = v.front();
      return true;
    }, "integration scheme: smoothed|event_euler");
    cmd->add_option("--h", [&opt](const std::vector<std::string>& v) {
      opt.h = std::stod(v.front());
      return true;
    }, "integration step");
    cmd->add_option("--epsilon", [&opt](const std::vector<std::string>& v) {
      opt.epsilon = std::stod(v.front());
      return true;
    }, "boundary-layer width");
    cmd->add_option("--seed", [&opt](const std::vector<std::string>& v) {
      opt.seed = static_cast<unsigned>(std::stoul(v.front()));
      return true;
    }, "seed for sampling-based verification paths");
  };

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "check which results apply");
  add_common(analyze_cmd, true);

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "integrate the inclusion");
  add_common(simulate_cmd, true);
  simulate_cmd->add_option("--out", opt.out, "trajectory CSV path");
  simulate_cmd->add_flag("--error", opt.error_dynamics, "integrate the error dynamics z = -Lx");
  simulate_cmd->add_option("--thin", opt.thin, "keep every k-th CSV row");

  CLI::App* filippov_cmd = app.add_subcommand("filippov", "exact set at a state");
  add_common(filippov_cmd, true);
  filippov_cmd->add_option("--at", opt.at, "state, comma-separated (default x0)");

  CLI::App* reproduce_cmd = app.add_subcommand("reproduce", "run a bundled example (1..10)");
  reproduce_cmd->add_option("id", opt.example_id, "example id")->required();
  reproduce_cmd->add_option("--out", opt.out, "artifact directory");
  reproduce_cmd->add_option("--data-dir", opt.data_dir, "bundled scenario directory");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "grid over h and epsilon");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--sweep-h", opt.sweep_h, "step sizes")->delimiter(',');
  sweep_cmd->add_option("--sweep-epsilon", opt.sweep_epsilon, "layer widths")->delimiter(',');
  sweep_cmd->add_option("--out", opt.out, "CSV directory");
  sweep_cmd->add_option("--thin", opt.thin, "keep every k-th CSV row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(analyze_cmd)) return cmd_analyze(opt);
    if (app.got_subcommand(simulate_cmd)) return cmd_simulate(opt);
    if (app.got_subcommand(filippov_cmd)) return cmd_filippov(opt);
    if (app.got_subcommand(reproduce_cmd)) return cmd_reproduce(opt);
    if (app.got_subcommand(sweep_cmd)) return cmd_sweep(opt);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "hint: the exact set enumeration is limited to n <= 12 and 16 active rows;\n"
                 "      evaluate at a state with fewer active discontinuities or use\n"
                 "      'simulate' with the smoothed scheme instead\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
