#pragma once

#include <string>
#include <vector>

#include "gridsim/mcs.hpp"

namespace gridsim::report {

// Shortest representation carrying 12 significant digits; all CSV and
// manifest numbers go through this so emitted files re-parse to the
// in-memory values within 1e-9 relative.
std::string format_number(double value);

// One row per penetration level: wear statistics, lifetimes, and horizon
// costs under both depreciation schemes.
void write_aggregate_csv(const std::string& path, const mcs::AggregateResult& aggregate);

struct AggregateRow {
    double pl = 0.0;
    int scenarios = 0;
    double mean_daily_lol = 0.0;
    double std_daily_lol = 0.0;
    double mean_daily_tap_travel = 0.0;
    double std_daily_tap_travel = 0.0;
    double annual_lol = 0.0;
    double annual_tap_travel = 0.0;
    double transformer_life_years = 0.0;
    int transformer_life_degenerate = 0;
    double regulator_life_years = 0.0;
    int regulator_life_degenerate = 0;
    double windowed_capital = 0.0;
    double windowed_core = 0.0;
    double windowed_load = 0.0;
    double windowed_total = 0.0;
    double conventional_total = 0.0;
    int replacements = 0;
    double vr_cost = 0.0;
};

std::vector<AggregateRow> read_aggregate_csv(const std::string& path);

// Long-format cost curves: pl,method,year,cost with method in
// {windowed, conventional}, one row per (pl, method, year).
void write_tco_curve_csv(const std::string& path, const mcs::AggregateResult& aggregate);

// Per-scenario audit files under dir: thermal_*.csv (t,q_to,q_hst,f_aa),
// taps_*.csv (t,v,h,travel), events_*.csv (vehicle_id,node,t_s,dt).
void write_scenario_traces(const std::string& dir, const mcs::ScenarioResult& result, double dt);

// Run manifest: full configuration echo (accepted back as a config file),
// seeds, failure list, versions, wall time.
void write_manifest(const std::string& path, const mcs::RunConfig& config,
                    const mcs::AggregateResult& aggregate);

}  // namespace gridsim::report
