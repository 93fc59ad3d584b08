#include "gridsim/mcs.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <optional>
#include <thread>

#include "gridsim/errors.hpp"
#include "gridsim/rng.hpp"

namespace gridsim::mcs {

namespace {

// Stream-derivation keys: common-random-numbers streams ignore the
// penetration level so fleets nest across levels; independent streams fold
// it in. Placement uses its own key so it can be held fixed per scenario.
constexpr std::uint64_t kCrnKey = 1;
constexpr std::uint64_t kPlacementKey = 0;

std::uint64_t pl_stream_key(double pl) {
    return 2 + static_cast<std::uint64_t>(std::llround(pl * 1e6));
}

pev::ChargingSpec effective_spec(const RunConfig& config, double pl) {
    pev::ChargingSpec spec = config.charging;
    spec.n_pev = static_cast<int>(
        pev::fleet_size_for_pl(pl, config.feeder.peak_base_load_kw, spec.charging_kw));
    if (spec.allocation.empty()) {
        // Vehicles live where the load lives.
        for (const auto& [node, w] : config.feeder.load_weights) {
            if (w > 0.0) spec.allocation.emplace_back(node, w);
        }
        double sum = 0.0;
        for (const auto& [node, w] : spec.allocation) sum += w;
        for (auto& [node, w] : spec.allocation) w /= sum;
    }
    return spec;
}

double sample_std(std::span<const double> samples, double mean) {
    if (samples.size() < 2) return 0.0;
    double acc = 0.0;
    for (double s : samples) acc += (s - mean) * (s - mean);
    return std::sqrt(acc / static_cast<double>(samples.size() - 1));
}

int worker_count(const RunConfig& config, int tasks) {
    int n = config.threads > 0 ? config.threads
                               : static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
    if (const char* cap = std::getenv("GRIDSIM_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(cap, &end, 10);
        if (end != cap && parsed > 0) n = std::min<long>(n, parsed);
    }
    return std::max(1, std::min(n, tasks));
}

}  // namespace

void validate_run_config(const RunConfig& config) {
    std::vector<std::string> problems;
    auto flag = [&](bool bad, const std::string& msg) {
        if (bad) problems.push_back(msg);
    };

    flag(config.pl_list.empty(), "run.pl_list: at least one penetration level is required");
    for (double pl : config.pl_list) {
        flag(pl < 0.0 || !std::isfinite(pl), "run.pl_list: levels must be finite and >= 0");
    }
    flag(config.scenarios < 1, "run.scenarios: must be >= 1");
    flag(config.horizon_days < 1, "run.horizon_days: must be >= 1");
    flag(config.evaluation_horizon_years < 1, "run.evaluation_horizon_years: must be >= 1");
    flag(!(config.power_factor > 0.0 && config.power_factor <= 1.0),
         "run.power_factor: must lie in (0, 1]");
    flag(config.threads < 0, "run.threads: must be >= 0");

    if (!(config.dt > 0.0)) {
        problems.push_back("run.dt: must be > 0");
    } else {
        const auto steps = static_cast<long>(std::llround(24.0 / config.dt));
        flag(steps < 1 || std::abs(static_cast<double>(steps) * config.dt - 24.0) > 1e-9,
             "run.dt: " + std::to_string(config.dt) + " h does not divide 24 h");
        flag(config.dt > config.thermal.tau_to / 2.0,
             "run.dt: exceeds half the transformer oil time constant");
        flag(config.regulator.operating_cycle < config.dt,
             "regulator.operating_cycle: must cover at least one profile step");
    }

    flag(config.base_shape.empty(), "run.base_shape: must be non-empty");
    if (!config.base_shape.empty()) {
        const double peak = *std::max_element(config.base_shape.begin(), config.base_shape.end());
        flag(std::abs(peak - 1.0) > 1e-6, "run.base_shape: peak must be normalized to 1");
        for (double v : config.base_shape) {
            if (!(v >= 0.0) || !std::isfinite(v)) {
                problems.push_back("run.base_shape: entries must be finite and >= 0");
                break;
            }
        }
    }
    for (double a : config.ambient_series) {
        if (!std::isfinite(a)) {
            problems.push_back("run.ambient_series: entries must be finite");
            break;
        }
    }

    auto sub_validate = [&](auto&& fn, const char* block) {
        try {
            fn();
        } catch (const std::exception& e) {
            problems.push_back(std::string(block) + ": " + e.what());
        }
    };
    sub_validate([&] { feeder::validate(config.feeder); }, "feeder");
    sub_validate([&] { pev::validate(config.charging); }, "charging");
    sub_validate([&] { thermal::validate(config.thermal); }, "thermal");
    sub_validate([&] { vr::validate(config.regulator); }, "regulator");
    sub_validate([&] { tco::validate(config.tco); }, "tco");

    // Charging allocation nodes must exist on the feeder.
    for (const auto& [node, w] : config.charging.allocation) {
        bool known = false;
        for (const auto& n : config.feeder.nodes) known = known || n.id == node;
        flag(!known, "charging.allocation: unknown node '" + node + "'");
    }

    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
}

ScenarioResult run_scenario(const RunConfig& config, double pl, int scenario_index) {
    const pev::ChargingSpec spec = effective_spec(config, pl);
    const std::uint64_t key =
        config.common_random_numbers ? kCrnKey : pl_stream_key(pl);
    RngStream stream =
        RngStream::derive(config.root_seed, key, static_cast<std::uint64_t>(scenario_index));

    ScenarioResult result;
    result.scenario_index = scenario_index;
    result.pl = pl;
    result.root_seed = config.root_seed;

    std::vector<pev::ChargingEvent> events;
    for (int day = 0; day < config.horizon_days; ++day) {
        std::vector<pev::ChargingEvent> day_events;
        if (config.resample_placement) {
            day_events = pev::sample_events(spec, stream);
        } else {
            RngStream placement = RngStream::derive(config.root_seed, kPlacementKey, 0);
            day_events = pev::sample_events(spec, stream, placement);
        }
        for (auto& ev : day_events) {
            ev.start_h += 24.0 * day;
            result.pev_energy_kwh += ev.duration_h * spec.charging_kw;
            events.push_back(std::move(ev));
        }
    }
    result.n_events = static_cast<int>(events.size());
    result.events = events;

    const std::vector<double> shape = pev::resample_shape(config.base_shape, config.dt);
    const pev::LoadProfile profile = pev::build_load_profile(
        shape, config.feeder, events, config.dt, config.horizon_days, spec.charging_kw);

    const std::vector<double> ambient_day =
        config.ambient_series.empty() ? std::vector<double>{}
                                      : pev::resample_shape(config.ambient_series, config.dt);
    auto ambient_at = [&](int step) {
        return ambient_day.empty()
                   ? config.ambient_c
                   : ambient_day[static_cast<std::size_t>(step % profile.steps_per_day)];
    };

    const std::size_t n_nodes = config.feeder.nodes.size();
    const double tan_phi =
        std::sqrt(1.0 - config.power_factor * config.power_factor) / config.power_factor;
    std::vector<std::complex<double>> nodal_load(n_nodes);
    auto loads_at = [&](int step) {
        for (std::size_t i = 0; i < n_nodes; ++i) {
            const double p_kw = profile.total_kw(i, static_cast<std::size_t>(step));
            nodal_load[i] = std::complex<double>(p_kw, p_kw * tan_phi) / config.feeder.power_base_kva;
        }
    };

    const int steps = profile.steps;
    result.k_series.reserve(static_cast<std::size_t>(steps));
    result.q_to_series.reserve(static_cast<std::size_t>(steps));
    result.q_hst_series.reserve(static_cast<std::size_t>(steps));
    result.f_aa_series.reserve(static_cast<std::size_t>(steps) + 1);
    result.tap_series.reserve(static_cast<std::size_t>(steps));
    result.v_reg_series.reserve(static_cast<std::size_t>(steps));
    result.v_min.assign(n_nodes, std::numeric_limits<double>::infinity());
    result.v_max.assign(n_nodes, -std::numeric_limits<double>::infinity());

    const std::size_t regulated =
        config.feeder.regulator_branch >= 0 ? config.feeder.node_index(config.feeder.regulated_node)
                                            : 0;
    vr::TapState tap;
    thermal::ThermalState state;
    bool state_ready = false;

    for (int step = 0; step < steps; ++step) {
        const double t = static_cast<double>(step) * config.dt;
        loads_at(step);
        feeder::PowerFlowSolution sol;
        try {
            sol = feeder::solve_power_flow(config.feeder, nodal_load,
                                           vr::tap_ratio(tap, config.regulator));
        } catch (const NonConvergence& e) {
            throw NonConvergence("pl " + std::to_string(pl) + " scenario " +
                                 std::to_string(scenario_index) + " step " + std::to_string(step) +
                                 ": " + e.what());
        }

        const double k = feeder::loading_factor(sol, config.feeder);
        if (!state_ready) {
            // Start from the steady state of the first step's loading so the
            // cold-start transient does not pollute the daily wear figures.
            state = thermal::make_steady_state(config.thermal, k, ambient_at(0));
            result.f_aa_series.push_back(thermal::aging_factor(state.q_hst, config.thermal));
            state_ready = true;
        }
        state = thermal::step_thermal(state, k, ambient_at(step), config.dt, config.thermal);
        result.k_series.push_back(k);
        result.q_to_series.push_back(state.q_to);
        result.q_hst_series.push_back(state.q_hst);
        result.f_aa_series.push_back(thermal::aging_factor(state.q_hst, config.thermal));

        if (config.feeder.regulator_branch >= 0) {
            const double v = sol.magnitude(regulated);
            tap = vr::step_tap(tap, v, t, config.regulator);
            result.v_reg_series.push_back(v);
        } else {
            result.v_reg_series.push_back(0.0);
        }
        result.tap_series.push_back(tap.tap);

        for (std::size_t i = 0; i < n_nodes; ++i) {
            const double mag = sol.magnitude(i);
            result.v_min[i] = std::min(result.v_min[i], mag);
            result.v_max[i] = std::max(result.v_max[i], mag);
        }
    }

    result.tap_travel = tap.travel;
    const double horizon_h = 24.0 * config.horizon_days;
    result.daily_lx = thermal::loss_of_life(result.f_aa_series, config.dt,
                                            config.thermal.t_ins_hours, 0.0, horizon_h) /
                      config.horizon_days;
    result.daily_travel = tap.travel / config.horizon_days;
    return result;
}

ExpectedSeries expected_series(std::span<const ScenarioResult> results, double s_r_kva) {
    if (results.empty()) throw DomainError("expected series needs at least one scenario");
    const std::size_t steps = results.front().k_series.size();
    ExpectedSeries out;
    out.k.assign(steps, 0.0);
    for (const auto& r : results) {
        if (r.k_series.size() != steps) {
            throw DomainError("scenario series lengths disagree");
        }
        for (std::size_t i = 0; i < steps; ++i) out.k[i] += r.k_series[i];
    }
    const double inv = 1.0 / static_cast<double>(results.size());
    out.s_kva.assign(steps, 0.0);
    for (std::size_t i = 0; i < steps; ++i) {
        out.k[i] *= inv;
        out.s_kva[i] = out.k[i] * s_r_kva;
    }
    return out;
}

AggregateResult run_mcs(const RunConfig& config, const ProgressFn& progress,
                        const ScenarioSink& sink) {
    validate_run_config(config);
    const auto t_start = std::chrono::steady_clock::now();

    const int per_pl = config.scenarios;
    const int tasks = static_cast<int>(config.pl_list.size()) * per_pl;
    std::vector<std::optional<ScenarioResult>> results(static_cast<std::size_t>(tasks));
    std::vector<std::optional<std::string>> task_failures(static_cast<std::size_t>(tasks));

    std::atomic<int> next{0};
    std::atomic<int> done{0};
    auto work = [&] {
        for (;;) {
            const int task = next.fetch_add(1);
            if (task >= tasks) return;
            const double pl = config.pl_list[static_cast<std::size_t>(task / per_pl)];
            const int scenario = task % per_pl;
            try {
                results[static_cast<std::size_t>(task)] = run_scenario(config, pl, scenario);
            } catch (const std::exception& e) {
                task_failures[static_cast<std::size_t>(task)] = e.what();
            }
            const int finished = done.fetch_add(1) + 1;
            if (progress) progress(finished, tasks);
        }
    };

    const int workers = worker_count(config, tasks);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    AggregateResult agg;
    for (const auto& failure : task_failures) {
        if (failure) agg.failures.push_back(*failure);
    }
    agg.flagged = !agg.failures.empty();

    if (sink) {
        for (const auto& slot : results) {
            if (slot) sink(*slot);
        }
    }

    for (std::size_t p = 0; p < config.pl_list.size(); ++p) {
        PlAggregate pa;
        pa.pl = config.pl_list[p];
        std::vector<ScenarioResult> ok;
        ok.reserve(static_cast<std::size_t>(per_pl));
        for (int s = 0; s < per_pl; ++s) {
            auto& slot = results[p * static_cast<std::size_t>(per_pl) + static_cast<std::size_t>(s)];
            if (slot) ok.push_back(std::move(*slot));
        }
        pa.scenarios = static_cast<int>(ok.size());
        if (!ok.empty()) {
            double lx_sum = 0.0, travel_sum = 0.0;
            for (const auto& r : ok) {
                pa.daily_lx_samples.push_back(r.daily_lx);
                pa.daily_travel_samples.push_back(r.daily_travel);
                lx_sum += r.daily_lx;
                travel_sum += r.daily_travel;
            }
            pa.mean_daily_lx = lx_sum / pa.scenarios;
            pa.mean_daily_travel = travel_sum / pa.scenarios;
            pa.std_daily_lx = sample_std(pa.daily_lx_samples, pa.mean_daily_lx);
            pa.std_daily_travel = sample_std(pa.daily_travel_samples, pa.mean_daily_travel);
            pa.expected = expected_series(ok, config.feeder.transformer_s_r_kva);
            pa.transformer_life =
                thermal::transformer_lifetime(pa.mean_daily_lx, config.thermal.t_ins_hours);
            pa.regulator_life =
                vr::vr_lifetime(pa.mean_daily_travel, config.regulator.max_operations);
            pa.annual_lx = 365.0 * pa.mean_daily_lx;
            pa.annual_travel = 365.0 * pa.mean_daily_travel;

            double mean_s = 0.0, peak_s = 0.0;
            for (double s : pa.expected.s_kva) {
                mean_s += s;
                peak_s = std::max(peak_s, s);
            }
            mean_s /= static_cast<double>(pa.expected.s_kva.size());
            const double horizon = config.evaluation_horizon_years;
            pa.windowed_horizon = tco::long_term_cost_with_replacement(
                pa.annual_lx, config.tco, horizon, mean_s, peak_s,
                config.feeder.transformer_s_r_kva);
            pa.curve = tco::long_term_cost_curve(pa.annual_lx, config.tco,
                                                 config.evaluation_horizon_years, mean_s, peak_s,
                                                 config.feeder.transformer_s_r_kva);
            pa.conventional_horizon_total = pa.curve.back().conventional;
            pa.vr_tco_horizon = tco::vr_tco(pa.annual_travel * horizon /
                                                config.regulator.max_operations,
                                            config.tco.vr_capital_cost);
        }
        agg.per_pl.push_back(std::move(pa));
    }

    agg.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return agg;
}

}  // namespace gridsim::mcs
