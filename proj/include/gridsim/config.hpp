#pragma once

#include <string>

#include "gridsim/mcs.hpp"

namespace gridsim::config {

// Baseline configuration: built-in feeder, 0..300% penetration sweep in
// steps of 50, 100 scenarios of one representative day at 0.1 h resolution,
// and the default physical and cost parameter blocks. Vehicle placement is
// the built-in allocation: the monitored transformer's node receives a
// pinned small share (it serves a 500 kVA secondary, not the whole feeder)
// and the remainder is spread load-proportionally.
mcs::RunConfig default_run_config();

// Parses a JSON document (sections feeder/charging/thermal/regulator/tco/
// run, all optional, layered over the defaults) and validates the result.
// A manifest produced by an earlier run is also accepted: its "config"
// object is used. Throws ConfigError listing every problem at once.
mcs::RunConfig parse_run_config(const std::string& json_text);

// Serializes a full configuration; parse_run_config round-trips it exactly.
std::string to_json_string(const mcs::RunConfig& config, int indent = 2);

}  // namespace gridsim::config
