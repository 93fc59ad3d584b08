#include "gridsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "json.hpp"

#include "gridsim/errors.hpp"

namespace gridsim::config {

namespace {

using Json = nlohmann::json;

// Share of the vehicle fleet living at the monitored transformer's node.
// The transformer serves one 500 kVA secondary of a 3000 kVA feeder, so its
// household share is far below the node's share of feeder load; the value is
// pinned here and the rest of the fleet follows the load distribution.
constexpr double kTransformerNodeVehicleShare = 0.006;

// Collects typed values from one JSON section, recording every problem
// (wrong type, unknown key) instead of stopping at the first.
class Reader {
  public:
    Reader(const Json& doc, const char* key, std::vector<std::string>& problems)
        : path_(key), problems_(problems) {
        if (doc.contains(key)) {
            if (doc.at(key).is_object()) {
                obj_ = &doc.at(key);
            } else {
                problems_.push_back(std::string(key) + ": must be an object");
            }
        }
    }

    void number(const char* key, double& out) {
        if (const Json* v = take(key)) {
            if (v->is_number()) {
                out = v->get<double>();
            } else {
                bad(key, "a number");
            }
        }
    }
    void integer(const char* key, int& out) {
        if (const Json* v = take(key)) {
            if (v->is_number_integer()) {
                out = v->get<int>();
            } else {
                bad(key, "an integer");
            }
        }
    }
    void unsigned64(const char* key, std::uint64_t& out) {
        if (const Json* v = take(key)) {
            if (v->is_number_unsigned() || (v->is_number_integer() && v->get<long long>() >= 0)) {
                out = v->get<std::uint64_t>();
            } else {
                bad(key, "a non-negative integer");
            }
        }
    }
    void boolean(const char* key, bool& out) {
        if (const Json* v = take(key)) {
            if (v->is_boolean()) {
                out = v->get<bool>();
            } else {
                bad(key, "a boolean");
            }
        }
    }
    void text(const char* key, std::string& out) {
        if (const Json* v = take(key)) {
            if (v->is_string()) {
                out = v->get<std::string>();
            } else {
                bad(key, "a string");
            }
        }
    }
    void number_list(const char* key, std::vector<double>& out) {
        if (const Json* v = take(key)) {
            if (v->is_array() && std::all_of(v->begin(), v->end(),
                                             [](const Json& e) { return e.is_number(); })) {
                out = v->get<std::vector<double>>();
            } else {
                bad(key, "an array of numbers");
            }
        }
    }
    void weighted_nodes(const char* key, std::vector<std::pair<std::string, double>>& out) {
        if (const Json* v = take(key)) {
            if (!v->is_array()) {
                bad(key, "an array of {node, weight} objects");
                return;
            }
            out.clear();
            for (const Json& e : *v) {
                if (!e.is_object() || !e.contains("node") || !e.contains("weight") ||
                    !e.at("node").is_string() || !e.at("weight").is_number()) {
                    bad(key, "an array of {node, weight} objects");
                    return;
                }
                out.emplace_back(e.at("node").get<std::string>(), e.at("weight").get<double>());
            }
        }
    }

    void finish() {
        if (!obj_) return;
        for (auto it = obj_->begin(); it != obj_->end(); ++it) {
            if (used_.find(it.key()) == used_.end()) {
                problems_.push_back(path_ + "." + it.key() + ": unknown key");
            }
        }
    }

  private:
    const Json* take(const char* key) {
        if (!obj_ || !obj_->contains(key)) return nullptr;
        used_.insert(key);
        return &obj_->at(key);
    }
    void bad(const char* key, const char* expected) {
        problems_.push_back(path_ + "." + key + ": must be " + expected);
    }

    const Json* obj_ = nullptr;
    std::string path_;
    std::vector<std::string>& problems_;
    std::set<std::string> used_;
};

void parse_feeder(const Json& doc, mcs::RunConfig& c, std::vector<std::string>& problems) {
    if (!doc.contains("feeder")) return;
    const Json& f = doc.at("feeder");
    if (f.is_string()) {
        if (f.get<std::string>() == "builtin") {
            c.feeder = feeder::build_builtin_feeder();
        } else {
            problems.push_back("feeder: the only named model is \"builtin\"");
        }
        return;
    }
    if (!f.is_object()) {
        problems.push_back("feeder: must be \"builtin\" or an inline model object");
        return;
    }
    try {
        c.feeder = feeder::from_json_string(f.dump());
    } catch (const std::exception& e) {
        problems.push_back(std::string("feeder: ") + e.what());
    }
}

void parse_charging(const Json& doc, mcs::RunConfig& c, std::vector<std::string>& problems) {
    Reader r(doc, "charging", problems);
    r.number("battery_kwh", c.charging.battery_kwh);
    r.number("charging_kw", c.charging.charging_kw);
    r.number("start_mean_h", c.charging.start_mean_h);
    r.number("start_std_h", c.charging.start_std_h);
    std::string mode;
    r.text("interval_mode", mode);
    if (mode == "gaussian") {
        c.charging.interval_mode = pev::IntervalMode::Gaussian;
    } else if (mode == "soc_driven") {
        c.charging.interval_mode = pev::IntervalMode::SocDriven;
    } else if (!mode.empty()) {
        problems.push_back("charging.interval_mode: must be \"gaussian\" or \"soc_driven\"");
    }
    r.number("interval_mean_h", c.charging.interval_mean_h);
    r.number("interval_std_h", c.charging.interval_std_h);
    r.number("soc_min", c.charging.soc_min);
    r.number("soc_max", c.charging.soc_max);
    r.weighted_nodes("allocation", c.charging.allocation);
    r.finish();
}

void parse_thermal(const Json& doc, mcs::RunConfig& c, std::vector<std::string>& problems) {
    Reader r(doc, "thermal", problems);
    r.number("top_oil_rise_rated_k", c.thermal.delta_q_to_rated);
    r.number("hotspot_rise_rated_k", c.thermal.delta_q_h_rated);
    r.number("tau_oil_h", c.thermal.tau_to);
    r.number("tau_winding_h", c.thermal.tau_h);
    r.number("oil_exponent", c.thermal.oil_exponent);
    r.number("winding_exponent", c.thermal.winding_exponent);
    r.number("loss_ratio", c.thermal.loss_ratio);
    r.number("aging_alpha", c.thermal.alpha);
    r.number("aging_beta_k", c.thermal.beta);
    r.number("aging_omega_k", c.thermal.omega);
    r.number("insulation_life_h", c.thermal.t_ins_hours);
    r.finish();
}

void parse_regulator(const Json& doc, mcs::RunConfig& c, std::vector<std::string>& problems) {
    Reader r(doc, "regulator", problems);
    r.number("v_ref", c.regulator.v_ref);
    r.number("step_size", c.regulator.step_size);
    r.number("dead_band_lo", c.regulator.dead_band_lo);
    r.number("dead_band_hi", c.regulator.dead_band_hi);
    r.integer("tap_min", c.regulator.tap_min);
    r.integer("tap_max", c.regulator.tap_max);
    r.number("operating_cycle_h", c.regulator.operating_cycle);
    r.number("max_operations", c.regulator.max_operations);
    r.finish();
}

void parse_tco(const Json& doc, mcs::RunConfig& c, std::vector<std::string>& problems) {
    Reader r(doc, "tco", problems);
    r.number("capital_cost", c.tco.capital_cost);
    r.number("core_loss_kw", c.tco.core_loss_kw);
    r.number("load_loss_kw", c.tco.load_loss_kw);
    r.number("energy_cost", c.tco.energy_cost);
    r.number("interest", c.tco.interest);
    r.number("gamma", c.tco.gamma);
    r.number("hours_per_year", c.tco.hours_per_year);
    r.number("depreciation_years", c.tco.t_ins_years);
    r.number("vr_capital_cost", c.tco.vr_capital_cost);
    r.boolean("load_loss_hours", c.tco.load_loss_hours);
    r.boolean("annualize_capital", c.tco.annualize_capital);
    r.finish();
}

void parse_run(const Json& doc, mcs::RunConfig& c, std::vector<std::string>& problems) {
    Reader r(doc, "run", problems);
    r.number_list("pl_list", c.pl_list);
    r.integer("scenarios", c.scenarios);
    r.unsigned64("root_seed", c.root_seed);
    r.integer("horizon_days", c.horizon_days);
    r.number("dt", c.dt);
    r.integer("evaluation_horizon_years", c.evaluation_horizon_years);
    r.number("power_factor", c.power_factor);
    r.number("ambient_c", c.ambient_c);
    r.number_list("ambient_series", c.ambient_series);
    r.number_list("base_shape", c.base_shape);
    r.integer("threads", c.threads);
    r.boolean("common_random_numbers", c.common_random_numbers);
    r.boolean("resample_placement", c.resample_placement);
    r.boolean("traces", c.emit_traces);
    r.finish();
}

}  // namespace

mcs::RunConfig default_run_config() {
    mcs::RunConfig c;
    const auto& fm = c.feeder;
    const double w_xfmr = fm.weight_of(fm.transformer_node);
    for (const auto& [node, w] : fm.load_weights) {
        if (w <= 0.0) continue;
        const double share = node == fm.transformer_node
                                 ? kTransformerNodeVehicleShare
                                 : w * (1.0 - kTransformerNodeVehicleShare) / (1.0 - w_xfmr);
        c.charging.allocation.emplace_back(node, share);
    }
    return c;
}

mcs::RunConfig parse_run_config(const std::string& json_text) {
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
    // A run manifest embeds the configuration it ran with; accept it whole.
    if (doc.contains("config") && doc.at("config").is_object()) {
        doc = doc.at("config");
    }

    std::vector<std::string> problems;
    static const std::set<std::string> known_sections{"feeder",    "charging", "thermal",
                                                      "regulator", "tco",      "run"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (known_sections.find(it.key()) == known_sections.end()) {
            problems.push_back(it.key() + ": unknown section");
        }
    }

    mcs::RunConfig c = default_run_config();
    parse_feeder(doc, c, problems);
    parse_charging(doc, c, problems);
    parse_thermal(doc, c, problems);
    parse_regulator(doc, c, problems);
    parse_tco(doc, c, problems);
    parse_run(doc, c, problems);

    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
    mcs::validate_run_config(c);
    return c;
}

std::string to_json_string(const mcs::RunConfig& c, int indent) {
    Json doc;
    doc["feeder"] = Json::parse(feeder::to_json_string(c.feeder));

    Json charging;
    charging["battery_kwh"] = c.charging.battery_kwh;
    charging["charging_kw"] = c.charging.charging_kw;
    charging["start_mean_h"] = c.charging.start_mean_h;
    charging["start_std_h"] = c.charging.start_std_h;
    charging["interval_mode"] =
        c.charging.interval_mode == pev::IntervalMode::Gaussian ? "gaussian" : "soc_driven";
    charging["interval_mean_h"] = c.charging.interval_mean_h;
    charging["interval_std_h"] = c.charging.interval_std_h;
    charging["soc_min"] = c.charging.soc_min;
    charging["soc_max"] = c.charging.soc_max;
    charging["allocation"] = Json::array();
    for (const auto& [node, w] : c.charging.allocation) {
        charging["allocation"].push_back({{"node", node}, {"weight", w}});
    }
    doc["charging"] = std::move(charging);

    doc["thermal"] = {{"top_oil_rise_rated_k", c.thermal.delta_q_to_rated},
                      {"hotspot_rise_rated_k", c.thermal.delta_q_h_rated},
                      {"tau_oil_h", c.thermal.tau_to},
                      {"tau_winding_h", c.thermal.tau_h},
                      {"oil_exponent", c.thermal.oil_exponent},
                      {"winding_exponent", c.thermal.winding_exponent},
                      {"loss_ratio", c.thermal.loss_ratio},
                      {"aging_alpha", c.thermal.alpha},
                      {"aging_beta_k", c.thermal.beta},
                      {"aging_omega_k", c.thermal.omega},
                      {"insulation_life_h", c.thermal.t_ins_hours}};
    doc["regulator"] = {{"v_ref", c.regulator.v_ref},
                        {"step_size", c.regulator.step_size},
                        {"dead_band_lo", c.regulator.dead_band_lo},
                        {"dead_band_hi", c.regulator.dead_band_hi},
                        {"tap_min", c.regulator.tap_min},
                        {"tap_max", c.regulator.tap_max},
                        {"operating_cycle_h", c.regulator.operating_cycle},
                        {"max_operations", c.regulator.max_operations}};
    doc["tco"] = {{"capital_cost", c.tco.capital_cost},
                  {"core_loss_kw", c.tco.core_loss_kw},
                  {"load_loss_kw", c.tco.load_loss_kw},
                  {"energy_cost", c.tco.energy_cost},
                  {"interest", c.tco.interest},
                  {"gamma", c.tco.gamma},
                  {"hours_per_year", c.tco.hours_per_year},
                  {"depreciation_years", c.tco.t_ins_years},
                  {"vr_capital_cost", c.tco.vr_capital_cost},
                  {"load_loss_hours", c.tco.load_loss_hours},
                  {"annualize_capital", c.tco.annualize_capital}};

    Json run;
    run["pl_list"] = c.pl_list;
    run["scenarios"] = c.scenarios;
    run["root_seed"] = c.root_seed;
    run["horizon_days"] = c.horizon_days;
    run["dt"] = c.dt;
    run["evaluation_horizon_years"] = c.evaluation_horizon_years;
    run["power_factor"] = c.power_factor;
    run["ambient_c"] = c.ambient_c;
    if (!c.ambient_series.empty()) run["ambient_series"] = c.ambient_series;
    run["base_shape"] = c.base_shape;
    run["threads"] = c.threads;
    run["common_random_numbers"] = c.common_random_numbers;
    run["resample_placement"] = c.resample_placement;
    run["traces"] = c.emit_traces;
    doc["run"] = std::move(run);

    return doc.dump(indent);
}

}  // namespace gridsim::config
