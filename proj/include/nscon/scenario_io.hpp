#pragma once

#include <string>

#include "nscon/dynamics.hpp"
#include "nscon/scenario.hpp"

namespace nscon {

/// Parses the JSON scenario dialect. Node indices in files are 1-based.
/// Unknown keys anywhere are rejected; errors carry the source name and,
/// for malformed JSON, the byte offset.
Scenario parse_scenario(const std::string& text, const std::string& source_name = "<string>");

/// Reads and parses a scenario file. Throws IoError when unreadable.
Scenario load_scenario_file(const std::string& path);

/// Canonical JSON for a scenario; parse(serialize(s)) == s.
std::string serialize_scenario(const Scenario& s);

/// CSV with header t,x_1..x_n,V,W,diameter,sum; one row per retained sample
/// (every `thin`-th plus the last), 17 significant digits, deterministic.
std::string trajectory_csv(const Trajectory& traj, int thin = 1);

/// CSV with header t,z_1..z_n,norm1,V1.
std::string error_csv(const ErrorTrajectory& traj, int thin = 1);

/// One-line run summary used by the CLI.
std::string summary_line(const Trajectory& traj);

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);  // throws ParseError

}  // namespace nscon
