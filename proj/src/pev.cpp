#include "gridsim/pev.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "gridsim/errors.hpp"

namespace gridsim::pev {

void validate(const ChargingSpec& spec) {
    std::string problems;
    auto flag = [&](bool bad, const std::string& msg) {
        if (bad) {
            if (!problems.empty()) problems += "; ";
            problems += msg;
        }
    };
    flag(!(spec.battery_kwh > 0.0), "battery capacity must be > 0");
    flag(!(spec.charging_kw > 0.0), "charging power must be > 0");
    flag(!(spec.start_std_h >= 0.0), "start-time std must be >= 0");
    flag(!(spec.interval_std_h >= 0.0), "interval std must be >= 0");
    flag(!(spec.interval_mean_h >= 0.0), "interval mean must be >= 0");
    flag(spec.n_pev < 0, "fleet size must be >= 0");
    flag(!(spec.soc_min >= 0.0 && spec.soc_min <= spec.soc_max && spec.soc_max <= 1.0),
         "state-of-charge bounds must satisfy 0 <= min <= max <= 1");
    if (!spec.allocation.empty()) {
        double sum = 0.0;
        for (const auto& [node, w] : spec.allocation) {
            flag(!(w >= 0.0), "negative allocation weight at node '" + node + "'");
            sum += w;
        }
        flag(std::abs(sum - 1.0) > 1e-9,
             "allocation weights sum to " + std::to_string(sum) + ", expected 1");
    }
    if (!problems.empty()) throw DomainError("charging spec: " + problems);
}

double charging_interval(double battery_kwh, double soc, double charging_kw) {
    if (!(battery_kwh > 0.0) || !(charging_kw > 0.0)) {
        throw DomainError("battery capacity and charging power must be > 0");
    }
    if (soc < 0.0 || soc > 1.0) {
        throw DomainError("state of charge " + std::to_string(soc) + " outside [0, 1]");
    }
    return battery_kwh * (1.0 - soc) / charging_kw;
}

namespace {

double wrap24(double hours) {
    double t = std::fmod(hours, 24.0);
    if (t < 0.0) t += 24.0;
    if (t >= 24.0) t = 0.0;  // guards the rounding edge of the negative branch
    return t;
}

std::vector<ChargingEvent> sample_events_impl(const ChargingSpec& spec, RngStream& rng,
                                              RngStream& placement_rng) {
    validate(spec);
    if (spec.n_pev > 0 && spec.allocation.empty()) {
        throw DomainError("charging spec: fleet is non-empty but no node allocation is given");
    }
    std::vector<double> weights;
    weights.reserve(spec.allocation.size());
    for (const auto& [node, w] : spec.allocation) weights.push_back(w);

    std::vector<ChargingEvent> events;
    events.reserve(static_cast<std::size_t>(spec.n_pev));
    for (int v = 0; v < spec.n_pev; ++v) {
        ChargingEvent ev;
        ev.vehicle = v;
        ev.start_h = wrap24(rng.normal(spec.start_mean_h, spec.start_std_h));
        if (spec.interval_mode == IntervalMode::Gaussian) {
            ev.duration_h = std::max(0.0, rng.normal(spec.interval_mean_h, spec.interval_std_h));
        } else {
            const double soc =
                spec.soc_min + rng.uniform01() * (spec.soc_max - spec.soc_min);
            ev.duration_h = charging_interval(spec.battery_kwh, soc, spec.charging_kw);
        }
        ev.node = spec.allocation[placement_rng.categorical(weights)].first;
        events.push_back(std::move(ev));
    }
    return events;
}

}  // namespace

std::vector<ChargingEvent> sample_events(const ChargingSpec& spec, RngStream& rng) {
    return sample_events_impl(spec, rng, rng);
}

std::vector<ChargingEvent> sample_events(const ChargingSpec& spec, RngStream& rng,
                                         RngStream& placement_rng) {
    return sample_events_impl(spec, rng, placement_rng);
}

LoadProfile build_load_profile(std::span<const double> base_shape,
                               const feeder::FeederModel& model,
                               std::span<const ChargingEvent> events, double dt, int horizon_days,
                               double charging_kw) {
    if (!(dt > 0.0)) throw ResolutionError("profile resolution must be > 0");
    const auto steps_per_day = static_cast<long>(std::llround(24.0 / dt));
    if (steps_per_day < 1 || std::abs(static_cast<double>(steps_per_day) * dt - 24.0) > 1e-9) {
        throw ResolutionError("profile resolution " + std::to_string(dt) +
                              " h does not divide 24 h");
    }
    if (base_shape.size() != static_cast<std::size_t>(steps_per_day)) {
        throw ResolutionError("base shape has " + std::to_string(base_shape.size()) +
                              " entries, expected " + std::to_string(steps_per_day));
    }
    if (horizon_days < 1) throw DomainError("horizon must cover at least one day");
    if (!(charging_kw > 0.0)) throw DomainError("charging power must be > 0");

    LoadProfile profile;
    profile.dt = dt;
    profile.steps_per_day = static_cast<int>(steps_per_day);
    profile.steps = static_cast<int>(steps_per_day) * horizon_days;
    profile.node_ids.reserve(model.nodes.size());
    for (const auto& n : model.nodes) profile.node_ids.push_back(n.id);

    const auto n_nodes = model.nodes.size();
    const auto n_steps = static_cast<std::size_t>(profile.steps);
    profile.baseline_kw.assign(n_nodes, std::vector<double>(n_steps, 0.0));
    profile.pev_kw.assign(n_nodes, std::vector<double>(n_steps, 0.0));

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n_nodes; ++i) index.emplace(model.nodes[i].id, i);

    for (const auto& [node, weight] : model.load_weights) {
        const std::size_t i = index.at(node);
        for (std::size_t k = 0; k < n_steps; ++k) {
            profile.baseline_kw[i][k] =
                weight * model.peak_base_load_kw * base_shape[k % base_shape.size()];
        }
    }

    const double horizon_h = 24.0 * horizon_days;
    for (const auto& ev : events) {
        const auto it = index.find(ev.node);
        if (it == index.end()) {
            throw DomainError("charging event at unknown node '" + ev.node + "'");
        }
        if (ev.start_h < 0.0 || ev.start_h >= horizon_h) {
            throw DomainError("charging start " + std::to_string(ev.start_h) +
                              " h outside the horizon");
        }
        if (ev.duration_h < 0.0 || ev.duration_h > horizon_h) {
            throw DomainError("charging duration " + std::to_string(ev.duration_h) +
                              " h is negative or exceeds the horizon");
        }
        // Steps overlapping [start, start + duration); a step counts when it
        // has positive overlap, and indices past the horizon wrap around.
        const auto first = static_cast<long>(std::ceil(ev.start_h / dt - 1e-9));
        const auto last =
            static_cast<long>(std::ceil((ev.start_h + ev.duration_h) / dt - 1e-9)) - 1;
        for (long k = first; k <= last; ++k) {
            const std::size_t idx = static_cast<std::size_t>(k) % n_steps;
            profile.pev_kw[it->second][idx] += charging_kw;
        }
    }
    return profile;
}

double penetration_level(const ChargingSpec& spec, double peak_base_kw) {
    if (!(peak_base_kw > 0.0)) throw DomainError("peak base load must be > 0");
    return static_cast<double>(spec.n_pev) * spec.charging_kw / peak_base_kw * 100.0;
}

long fleet_size_for_pl(double pl_percent, double peak_base_kw, double charging_kw) {
    if (!(peak_base_kw > 0.0) || !(charging_kw > 0.0)) {
        throw DomainError("peak base load and charging power must be > 0");
    }
    if (pl_percent < 0.0) throw DomainError("penetration level must be >= 0");
    return std::llround(pl_percent / 100.0 * peak_base_kw / charging_kw);
}

std::vector<double> default_base_shape() {
    return {0.52, 0.46, 0.42, 0.40, 0.40, 0.43, 0.52, 0.64, 0.70, 0.68, 0.64, 0.62,
            0.62, 0.60, 0.58, 0.60, 0.66, 0.76, 0.87, 0.95, 1.00, 0.97, 0.85, 0.66};
}

std::vector<double> resample_shape(std::span<const double> shape, double dt) {
    if (shape.empty()) throw ResolutionError("shape must be non-empty");
    if (!(dt > 0.0)) throw ResolutionError("profile resolution must be > 0");
    const auto steps = static_cast<long>(std::llround(24.0 / dt));
    if (steps < 1 || std::abs(static_cast<double>(steps) * dt - 24.0) > 1e-9) {
        throw ResolutionError("profile resolution " + std::to_string(dt) +
                              " h does not divide 24 h");
    }
    const auto m = shape.size();
    const double source_dt = 24.0 / static_cast<double>(m);
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (long k = 0; k < steps; ++k) {
        const double s = static_cast<double>(k) * dt / source_dt;
        const auto j = static_cast<std::size_t>(s);
        const double frac = s - static_cast<double>(j);
        const double a = shape[j % m];
        const double b = shape[(j + 1) % m];
        out[static_cast<std::size_t>(k)] = a + frac * (b - a);
    }
    return out;
}

}  // namespace gridsim::pev
