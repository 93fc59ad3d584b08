#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gridsim/feeder.hpp"
#include "gridsim/lifetime.hpp"
#include "gridsim/pev.hpp"
#include "gridsim/regulator.hpp"
#include "gridsim/tco.hpp"
#include "gridsim/thermal.hpp"

namespace gridsim::mcs {

// Full simulation configuration: penetration-level sweep, Monte-Carlo
// sampling, and the physical / economic parameter blocks.
struct RunConfig {
    std::vector<double> pl_list{0.0, 50.0, 100.0, 150.0, 200.0, 250.0, 300.0};
    int scenarios = 100;
    std::uint64_t root_seed = 1;
    int horizon_days = 1;  // representative days simulated per scenario
    double dt = 0.1;       // profile resolution [h]
    feeder::FeederModel feeder = feeder::build_builtin_feeder();
    pev::ChargingSpec charging;
    std::vector<double> base_shape = pev::default_base_shape();  // diurnal, peak 1
    thermal::TransformerThermalParams thermal;
    vr::RegulatorParams regulator;
    tco::TcoParams tco;
    int evaluation_horizon_years = 20;
    double power_factor = 0.95;          // lagging, applied to every load
    double ambient_c = 30.0;             // constant ambient [C]
    std::vector<double> ambient_series;  // optional diurnal ambient overriding the constant
    int threads = 0;                     // 0 = hardware concurrency; GRIDSIM_THREADS caps it
    // Reuse one random stream per scenario index across penetration levels,
    // so a larger fleet extends the smaller fleet vehicle-for-vehicle.
    bool common_random_numbers = true;
    // Resample vehicle-to-node placement per scenario; when false, placement
    // comes from a dedicated stream shared by all scenarios.
    bool resample_placement = true;
    bool emit_traces = false;  // per-scenario CSV traces on emission
};

// Checks every invariant (including cross-module ones such as the regulator
// operating cycle covering the profile resolution) and the parameter blocks;
// throws ConfigError listing all violations at once.
void validate_run_config(const RunConfig& config);

struct ScenarioResult {
    int scenario_index = 0;
    double pl = 0.0;
    std::uint64_t root_seed = 0;
    int n_events = 0;
    double pev_energy_kwh = 0.0;
    std::vector<pev::ChargingEvent> events;
    std::vector<double> k_series;      // transformer load factor per step
    std::vector<double> q_to_series;   // step-end top-oil temperature [C]
    std::vector<double> q_hst_series;  // step-end hot-spot temperature [C]
    std::vector<double> f_aa_series;   // aging factor, initial point + one per step
    std::vector<int> tap_series;       // tap position after the step's decision
    std::vector<double> v_reg_series;  // regulated-node voltage seen by the control [pu]
    double tap_travel = 0.0;
    double daily_lx = 0.0;      // transformer loss of life per simulated day
    double daily_travel = 0.0;  // tap travel per simulated day
    std::vector<double> v_min;  // per-node voltage extrema across the horizon [pu]
    std::vector<double> v_max;
};

struct ExpectedSeries {
    std::vector<double> k;      // mean transformer load factor per step
    std::vector<double> s_kva;  // the same as apparent power
};

struct PlAggregate {
    double pl = 0.0;
    int scenarios = 0;
    double mean_daily_lx = 0.0;
    double std_daily_lx = 0.0;
    double mean_daily_travel = 0.0;
    double std_daily_travel = 0.0;
    std::vector<double> daily_lx_samples;      // per scenario, index order
    std::vector<double> daily_travel_samples;  // per scenario, index order
    ExpectedSeries expected;
    LifetimeEstimate transformer_life;
    LifetimeEstimate regulator_life;
    double annual_lx = 0.0;
    double annual_travel = 0.0;
    tco::CostBreakdown windowed_horizon;     // loss-of-life depreciation over the horizon
    double conventional_horizon_total = 0.0;  // fixed depreciation over the same horizon
    double vr_tco_horizon = 0.0;
    std::vector<tco::TcoCurvePoint> curve;   // cumulative cost per year, both methods
};

struct AggregateResult {
    std::vector<PlAggregate> per_pl;
    std::vector<std::string> failures;  // one line per failed scenario, task order
    bool flagged = false;               // any scenario failed
    double wall_seconds = 0.0;
};

// One deterministic scenario: derive the stream, sample charging events,
// build the load profile, then per step solve the power flow (with the
// previous decision's tap ratio), advance the thermal state, and evaluate
// the tap control on the solved regulated-node voltage. Failures carry the
// (pl, scenario, step) context.
ScenarioResult run_scenario(const RunConfig& config, double pl, int scenario_index);

using ProgressFn = std::function<void(int done, int total)>;
using ScenarioSink = std::function<void(const ScenarioResult&)>;

// Runs the full PL x scenario grid (scenario-level parallelism, results
// merged by index, aggregation sequential) and aggregates lifetimes and
// cost curves per penetration level. Output is bit-identical for a given
// config regardless of worker count. The sink, when given, receives every
// completed scenario sequentially in task order after the parallel phase.
AggregateResult run_mcs(const RunConfig& config, const ProgressFn& progress = {},
                        const ScenarioSink& sink = {});

// Element-wise sample mean of the scenario load-factor series.
ExpectedSeries expected_series(std::span<const ScenarioResult> results, double s_r_kva);

}  // namespace gridsim::mcs
