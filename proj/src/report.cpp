#include "gridsim/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gridsim/config.hpp"
#include "gridsim/errors.hpp"

namespace gridsim::report {

namespace {

namespace fs = std::filesystem;

std::ofstream open_for_write(const std::string& path) {
    const fs::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open '" + path + "' for writing");
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

// Penetration levels are usually whole percentages; keep file names tidy.
std::string pl_tag(double pl) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", pl);
    return buf;
}

}  // namespace

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

void write_aggregate_csv(const std::string& path, const mcs::AggregateResult& aggregate) {
    auto out = open_for_write(path);
    out << "pl,scenarios,mean_daily_lol,std_daily_lol,mean_daily_tap_travel,"
           "std_daily_tap_travel,annual_lol,annual_tap_travel,transformer_life_years,"
           "transformer_life_degenerate,regulator_life_years,regulator_life_degenerate,"
           "windowed_capital,windowed_core,windowed_load,windowed_total,conventional_total,"
           "replacements,vr_cost\n";
    for (const auto& pa : aggregate.per_pl) {
        out << format_number(pa.pl) << ',' << pa.scenarios << ','
            << format_number(pa.mean_daily_lx) << ',' << format_number(pa.std_daily_lx) << ','
            << format_number(pa.mean_daily_travel) << ',' << format_number(pa.std_daily_travel)
            << ',' << format_number(pa.annual_lx) << ',' << format_number(pa.annual_travel) << ','
            << format_number(pa.transformer_life.years) << ','
            << (pa.transformer_life.degenerate ? 1 : 0) << ','
            << format_number(pa.regulator_life.years) << ','
            << (pa.regulator_life.degenerate ? 1 : 0) << ','
            << format_number(pa.windowed_horizon.capital) << ','
            << format_number(pa.windowed_horizon.core) << ','
            << format_number(pa.windowed_horizon.load) << ','
            << format_number(pa.windowed_horizon.total) << ','
            << format_number(pa.conventional_horizon_total) << ',' << pa.windowed_horizon.replacements
            << ',' << format_number(pa.vr_tco_horizon) << '\n';
    }
}

std::vector<AggregateRow> read_aggregate_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line)) throw DomainError("'" + path + "' is empty");
    std::vector<AggregateRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 19) {
            throw DomainError("'" + path + "': expected 19 fields, found " +
                              std::to_string(f.size()));
        }
        AggregateRow r;
        std::size_t i = 0;
        r.pl = std::stod(f[i++]);
        r.scenarios = std::stoi(f[i++]);
        r.mean_daily_lol = std::stod(f[i++]);
        r.std_daily_lol = std::stod(f[i++]);
        r.mean_daily_tap_travel = std::stod(f[i++]);
        r.std_daily_tap_travel = std::stod(f[i++]);
        r.annual_lol = std::stod(f[i++]);
        r.annual_tap_travel = std::stod(f[i++]);
        r.transformer_life_years = std::stod(f[i++]);
        r.transformer_life_degenerate = std::stoi(f[i++]);
        r.regulator_life_years = std::stod(f[i++]);
        r.regulator_life_degenerate = std::stoi(f[i++]);
        r.windowed_capital = std::stod(f[i++]);
        r.windowed_core = std::stod(f[i++]);
        r.windowed_load = std::stod(f[i++]);
        r.windowed_total = std::stod(f[i++]);
        r.conventional_total = std::stod(f[i++]);
        r.replacements = std::stoi(f[i++]);
        r.vr_cost = std::stod(f[i++]);
        rows.push_back(r);
    }
    return rows;
}

void write_tco_curve_csv(const std::string& path, const mcs::AggregateResult& aggregate) {
    auto out = open_for_write(path);
    out << "pl,method,year,cost\n";
    for (const auto& pa : aggregate.per_pl) {
        for (const auto& pt : pa.curve) {
            out << format_number(pa.pl) << ",windowed," << format_number(pt.year) << ','
                << format_number(pt.windowed) << '\n';
        }
        for (const auto& pt : pa.curve) {
            out << format_number(pa.pl) << ",conventional," << format_number(pt.year) << ','
                << format_number(pt.conventional) << '\n';
        }
    }
}

void write_scenario_traces(const std::string& dir, const mcs::ScenarioResult& r, double dt) {
    const std::string tag = "pl" + pl_tag(r.pl) + "_s" + std::to_string(r.scenario_index);
    const fs::path base(dir);

    {
        auto out = open_for_write((base / ("thermal_" + tag + ".csv")).string());
        out << "t,q_to,q_hst,f_aa\n";
        for (std::size_t k = 0; k < r.q_hst_series.size(); ++k) {
            out << format_number(static_cast<double>(k + 1) * dt) << ','
                << format_number(r.q_to_series[k]) << ',' << format_number(r.q_hst_series[k])
                << ',' << format_number(r.f_aa_series[k + 1]) << '\n';
        }
    }
    {
        auto out = open_for_write((base / ("taps_" + tag + ".csv")).string());
        out << "t,v,h,travel\n";
        long travel = 0;
        int prev = 0;  // taps start neutral before the first decision
        for (std::size_t k = 0; k < r.tap_series.size(); ++k) {
            travel += std::abs(static_cast<long>(r.tap_series[k]) - prev);
            prev = r.tap_series[k];
            out << format_number(static_cast<double>(k) * dt) << ','
                << format_number(r.v_reg_series[k]) << ',' << r.tap_series[k] << ',' << travel
                << '\n';
        }
    }
    {
        auto out = open_for_write((base / ("events_" + tag + ".csv")).string());
        out << "vehicle_id,node,t_s,dt\n";
        for (const auto& ev : r.events) {
            out << ev.vehicle << ',' << ev.node << ',' << format_number(ev.start_h) << ','
                << format_number(ev.duration_h) << '\n';
        }
    }
}

void write_manifest(const std::string& path, const mcs::RunConfig& config,
                    const mcs::AggregateResult& aggregate) {
    nlohmann::json doc;
    doc["config"] = nlohmann::json::parse(config::to_json_string(config));
    doc["root_seed"] = config.root_seed;
    doc["flagged"] = aggregate.flagged;
    doc["failures"] = aggregate.failures;
    doc["wall_seconds"] = aggregate.wall_seconds;
    doc["versions"] = {{"gridsim", "1.0.0"}};
    auto out = open_for_write(path);
    out << doc.dump(2) << '\n';
}

}  // namespace gridsim::report
