#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gridsim/config.hpp"
#include "gridsim/errors.hpp"
#include "gridsim/feeder.hpp"
#include "gridsim/mcs.hpp"
#include "gridsim/report.hpp"

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::vector<double> pl;
    std::optional<int> scenarios;
    std::optional<double> dt;
    bool traces = false;
    bool verbose = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gridsim::ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

gridsim::mcs::RunConfig load_config(const Options& opt) {
    gridsim::mcs::RunConfig config = opt.config_path.empty()
                                         ? gridsim::config::default_run_config()
                                         : gridsim::config::parse_run_config(read_file(opt.config_path));
    if (opt.seed) config.root_seed = *opt.seed;
    if (!opt.pl.empty()) config.pl_list = opt.pl;
    if (opt.scenarios) config.scenarios = *opt.scenarios;
    if (opt.dt) config.dt = *opt.dt;
    if (opt.traces) config.emit_traces = true;
    gridsim::mcs::validate_run_config(config);
    return config;
}

int run_and_emit(const gridsim::mcs::RunConfig& config, const Options& opt) {
    fs::create_directories(opt.out_dir);
    const std::string traces_dir = (fs::path(opt.out_dir) / "traces").string();

    gridsim::mcs::ProgressFn progress;
    if (opt.verbose) {
        progress = [](int done, int total) {
            if (done % 50 == 0 || done == total) {
                std::cerr << "\r" << done << "/" << total << " scenarios" << std::flush;
                if (done == total) std::cerr << "\n";
            }
        };
    }
    gridsim::mcs::ScenarioSink sink;
    if (config.emit_traces) {
        sink = [&](const gridsim::mcs::ScenarioResult& r) {
            gridsim::report::write_scenario_traces(traces_dir, r, config.dt);
        };
    }

    const auto aggregate = gridsim::mcs::run_mcs(config, progress, sink);

    gridsim::report::write_aggregate_csv((fs::path(opt.out_dir) / "aggregate.csv").string(),
                                         aggregate);
    gridsim::report::write_tco_curve_csv((fs::path(opt.out_dir) / "tco_curve.csv").string(),
                                         aggregate);
    gridsim::report::write_manifest((fs::path(opt.out_dir) / "manifest.json").string(), config,
                                    aggregate);

    if (opt.verbose) {
        std::cout << "pl, transformer life [yr], regulator life [yr], windowed cost [$], "
                     "conventional cost [$]\n";
        for (const auto& pa : aggregate.per_pl) {
            std::cout << pa.pl << ", " << pa.transformer_life.years << ", "
                      << pa.regulator_life.years << ", " << pa.windowed_horizon.total << ", "
                      << pa.conventional_horizon_total << "\n";
        }
    }

    if (aggregate.flagged) {
        std::cerr << aggregate.failures.size()
                  << " scenario(s) failed; outputs are marked in manifest.json:\n";
        for (const auto& f : aggregate.failures) std::cerr << "  " << f << "\n";
        return 1;
    }
    std::cout << "wrote " << (fs::path(opt.out_dir) / "aggregate.csv").string() << ", "
              << (fs::path(opt.out_dir) / "tco_curve.csv").string() << ", "
              << (fs::path(opt.out_dir) / "manifest.json").string() << "\n";
    return 0;
}

void add_common(CLI::App* cmd, Options& opt, bool with_overrides) {
    cmd->add_option("-c,--config", opt.config_path, "JSON configuration (or a run manifest)");
    cmd->add_option("-o,--out", opt.out_dir, "output directory")->capture_default_str();
    if (with_overrides) {
        cmd->add_option("--seed", opt.seed, "override the root seed");
        cmd->add_option("--pl", opt.pl, "override the penetration-level list (percent)");
        cmd->add_option("--scenarios", opt.scenarios, "override scenarios per level");
        cmd->add_option("--dt", opt.dt, "override the profile resolution (hours)");
        cmd->add_flag("--traces", opt.traces, "emit per-scenario trace CSVs");
    }
    cmd->add_flag("-v,--verbose", opt.verbose, "progress and summary output");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo simulator for vehicle-charging impact on "
                 "distribution-asset wear and long-term cost"};
    app.require_subcommand(1);

    Options opt;
    CLI::App* run = app.add_subcommand("run", "simulate the configured penetration levels");
    add_common(run, opt, true);
    CLI::App* sweep =
        app.add_subcommand("sweep", "simulate the full default 0..300% penetration sweep");
    add_common(sweep, opt, true);
    CLI::App* exportf =
        app.add_subcommand("export-feeder", "write the built-in feeder model as JSON");
    std::string export_path;
    exportf->add_option("-o,--out", export_path, "output file (default: stdout)");
    CLI::App* validate = app.add_subcommand("validate", "check a configuration and exit");
    validate->add_option("-c,--config", opt.config_path, "JSON configuration to check")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (exportf->parsed()) {
            const std::string text = gridsim::feeder::to_json_string(gridsim::feeder::build_builtin_feeder());
            if (export_path.empty()) {
                std::cout << text << "\n";
            } else {
                std::ofstream out(export_path);
                if (!out) throw gridsim::DomainError("cannot write '" + export_path + "'");
                out << text << "\n";
                std::cout << "wrote " << export_path << "\n";
            }
            return 0;
        }
        if (validate->parsed()) {
            gridsim::config::parse_run_config(read_file(opt.config_path));
            std::cout << "configuration OK\n";
            return 0;
        }
        if (sweep->parsed()) {
            gridsim::mcs::RunConfig config = load_config(opt);
            if (opt.pl.empty()) {
                config.pl_list = {0.0, 50.0, 100.0, 150.0, 200.0, 250.0, 300.0};
            }
            return run_and_emit(config, opt);
        }
        return run_and_emit(load_config(opt), opt);
    } catch (const gridsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
