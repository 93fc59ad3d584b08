#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridsim/feeder.hpp"
#include "gridsim/rng.hpp"

namespace gridsim::pev {

enum class IntervalMode {
    Gaussian,   // duration drawn directly, negative samples clamped to zero
    SocDriven,  // duration from battery size and a uniform initial state of charge
};

struct ChargingSpec {
    double battery_kwh = 23.0;
    double charging_kw = 10.0;
    double start_mean_h = 20.5;  // charging start time distribution, wrapped mod 24
    double start_std_h = 4.5;
    IntervalMode interval_mode = IntervalMode::Gaussian;
    double interval_mean_h = 1.2;
    double interval_std_h = 0.6;
    double soc_min = 0.0;  // uniform initial state-of-charge bounds (SocDriven mode)
    double soc_max = 1.0;
    int n_pev = 0;
    // Vehicle-to-node weights; when empty, callers fall back to the feeder's
    // load weights (vehicle density proportional to household load).
    std::vector<std::pair<std::string, double>> allocation;
};

// Throws DomainError listing every violated constraint.
void validate(const ChargingSpec& spec);

struct ChargingEvent {
    int vehicle = 0;
    std::string node;
    double start_h = 0.0;     // wrapped to [0, 24) when sampled
    double duration_h = 0.0;  // >= 0 always
};

// Per-node real-power series at fixed resolution, split into baseline and
// charging components; the total is their element-wise sum by construction.
struct LoadProfile {
    double dt = 0.1;
    int steps_per_day = 240;
    int steps = 240;
    std::vector<std::string> node_ids;  // feeder model node order
    std::vector<std::vector<double>> baseline_kw;  // [node][step]
    std::vector<std::vector<double>> pev_kw;       // [node][step]

    double total_kw(std::size_t node, std::size_t step) const {
        return baseline_kw[node][step] + pev_kw[node][step];
    }
};

// Hours to fill the battery from the given state of charge at constant
// power. Throws DomainError for soc outside [0, 1] or non-positive sizes.
double charging_interval(double battery_kwh, double soc, double charging_kw);

// Draws n_pev events with a fixed per-vehicle consumption of random draws
// (start, duration, node in that order), so streams advanced by different
// fleet sizes stay aligned vehicle-for-vehicle. Start times wrap modulo
// 24 h; negative durations clamp to zero.
std::vector<ChargingEvent> sample_events(const ChargingSpec& spec, RngStream& rng);

// Same, but node placement drawn from a separate stream so that placement
// can be held fixed across scenarios while timing is resampled.
std::vector<ChargingEvent> sample_events(const ChargingSpec& spec, RngStream& rng,
                                         RngStream& placement_rng);

// Composes baseline (load weight * peak base load * diurnal shape) and
// charging load. base_shape must hold one day at the profile resolution;
// every step overlapping [start, start + duration) receives the full
// charging power, and intervals crossing the horizon end wrap periodically
// to its start. Throws ResolutionError if dt does not divide 24 h or the
// shape length disagrees.
LoadProfile build_load_profile(std::span<const double> base_shape,
                               const feeder::FeederModel& model,
                               std::span<const ChargingEvent> events, double dt, int horizon_days,
                               double charging_kw);

// Aggregated charging capacity as a percentage of peak base load.
double penetration_level(const ChargingSpec& spec, double peak_base_kw);

// Fleet size whose aggregate capacity best matches a penetration level.
long fleet_size_for_pl(double pl_percent, double peak_base_kw, double charging_kw);

// Residential double-peak diurnal shape, hourly, normalized to peak 1.
std::vector<double> default_base_shape();

// Periodic linear resampling of an hourly-or-coarser shape to resolution dt.
std::vector<double> resample_shape(std::span<const double> shape, double dt);

}  // namespace gridsim::pev
