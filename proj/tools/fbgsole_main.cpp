#include <cstdio>
#include <iostream>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>

#include "fbgsole/harness.hpp"
#include "fbgsole/util.hpp"

namespace {

using namespace fbgsole;

struct CliOptions {
    RunConfig config;
    std::string config_path;
    std::string bind_text;
    std::string dest_text;
    std::string session = "gait";
    std::string side = "left";
    // fit mode
    std::string fit_input;
    std::string fit_model = "log";
    std::string fit_output;
};

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file (flags override it)");
    cmd->add_option("--layout", opt.config.layout_path, "layout JSON (default: built-in)");
    cmd->add_option("--out", opt.config.out_dir, "output directory")
        ->capture_default_str();
    cmd->add_option("--seed", opt.config.seed, "seed for all randomness")
        ->capture_default_str();
    cmd->add_flag("--stamp", opt.config.stamp, "timestamp artifact file names");
    cmd->add_option("--rate", opt.config.rate_hz,
                    "interrogator rate in Hz (1-100, overrides scenario)");
    cmd->add_option("--duration", opt.config.scenario.duration_s, "session length in s")
        ->capture_default_str();
    cmd->add_option("--mass", opt.config.scenario.body_mass_kg, "body mass in kg")
        ->capture_default_str();
    cmd->add_option("--cadence", opt.config.scenario.cadence_hz, "gait cycles per second")
        ->capture_default_str();
    cmd->add_option("--ambient", opt.config.scenario.ambient_temp_c, "ambient temp in degC")
        ->capture_default_str();
    cmd->add_option("--steady", opt.config.scenario.steady_foot_temp_c,
                    "steady foot temp in degC")
        ->capture_default_str();
    cmd->add_option("--warmup-tau", opt.config.scenario.warmup_time_constant_s,
                    "foot warmup time constant in s")
        ->capture_default_str();
    cmd->add_option("--noise", opt.config.scenario.noise_rms_microstrain,
                    "strain noise RMS in microstrain")
        ->capture_default_str();
    cmd->add_option("--session", opt.session, "gait or seated")->capture_default_str();
    cmd->add_option("--bind", opt.bind_text, "ingest endpoint host:port");
    cmd->add_option("--dest", opt.dest_text, "emit destination host:port");
    cmd->add_option("--pace-us", opt.config.pace_us,
                    "inter-datagram pacing in microseconds")
        ->capture_default_str();
    cmd->add_flag("--realtime", opt.config.realtime, "serve at the nominal rate");
    cmd->add_option("--side", opt.side, "left or right (serve/process)")
        ->capture_default_str();
    cmd->add_option("--map-at", opt.config.map_at_s, "pressure map export instants in s");
    cmd->add_option("--map-interval", opt.config.map_interval_s,
                    "temperature map export interval in s");
    cmd->add_option("--compare-start", opt.config.compare_start_s,
                    "first scored instant for compare mode in s")
        ->capture_default_str();
}

RunConfig resolve_config(CliOptions& opt, CLI::App* cmd) {
    RunConfig config;
    if (!opt.config_path.empty()) {
        config = config_from_json(read_file(opt.config_path));
    }
    // flags the user actually passed override the file
    const auto passed = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (passed("--layout")) config.layout_path = opt.config.layout_path;
    if (passed("--out") || opt.config_path.empty()) config.out_dir = opt.config.out_dir;
    if (passed("--seed")) config.seed = opt.config.seed;
    if (passed("--stamp")) config.stamp = opt.config.stamp;
    if (passed("--rate")) config.rate_hz = opt.config.rate_hz;
    if (passed("--duration")) config.scenario.duration_s = opt.config.scenario.duration_s;
    if (passed("--mass")) config.scenario.body_mass_kg = opt.config.scenario.body_mass_kg;
    if (passed("--cadence")) config.scenario.cadence_hz = opt.config.scenario.cadence_hz;
    if (passed("--ambient")) {
        config.scenario.ambient_temp_c = opt.config.scenario.ambient_temp_c;
    }
    if (passed("--steady")) {
        config.scenario.steady_foot_temp_c = opt.config.scenario.steady_foot_temp_c;
    }
    if (passed("--warmup-tau")) {
        config.scenario.warmup_time_constant_s = opt.config.scenario.warmup_time_constant_s;
    }
    if (passed("--noise")) {
        config.scenario.noise_rms_microstrain = opt.config.scenario.noise_rms_microstrain;
    }
    if (passed("--session")) {
        if (opt.session != "gait" && opt.session != "seated") {
            throw ConfigError("--session must be gait or seated");
        }
        config.scenario.seated = opt.session == "seated";
    }
    if (!opt.bind_text.empty()) config.bind = parse_endpoint(opt.bind_text);
    if (!opt.dest_text.empty()) config.dest = parse_endpoint(opt.dest_text);
    if (passed("--pace-us")) config.pace_us = opt.config.pace_us;
    if (passed("--realtime")) config.realtime = opt.config.realtime;
    if (passed("--side")) {
        if (opt.side != "left" && opt.side != "right") {
            throw ConfigError("--side must be left or right");
        }
        config.side = opt.side == "right" ? Side::Right : Side::Left;
    }
    if (passed("--map-at")) config.map_at_s = opt.config.map_at_s;
    if (passed("--map-interval")) config.map_interval_s = opt.config.map_interval_s;
    if (passed("--compare-start")) config.compare_start_s = opt.config.compare_start_s;
    return config;
}

int dispatch(RunMode mode, RunConfig config, const CliOptions& opt) {
    config.mode = mode;
    switch (mode) {
        case RunMode::Simulate:
            return run_simulate(config);
        case RunMode::Serve:
            return run_serve(config);
        case RunMode::Process:
            return run_process(config);
        case RunMode::Roundtrip: {
            if (config.scenario.seated) {
                const auto maps = run_temperature_session(config);
                std::cout << strf("temperature session complete: %zu maps under %s\n",
                                  maps.size(), config.out_dir.c_str());
                return kExitOk;
            }
            const RoundtripResult result = run_roundtrip(config);
            std::cout << strf(
                "roundtrip complete: %zu frames, %zu+%zu cycles, %llu parse errors\n",
                result.frames_delivered, result.left_record.cycles.size(),
                result.right_record.cycles.size(),
                static_cast<unsigned long long>(result.parse_errors));
            return kExitOk;
        }
        case RunMode::Compare: {
            const ComparisonReport report = run_compare(config);
            std::filesystem::create_directories(config.out_dir);
            write_file(config.out_dir + "/compare_report.json", comparison_to_json(report));
            write_file(config.out_dir + "/compare_report.csv", comparison_to_csv(report));
            for (const auto& row : report.rows) {
                std::cout << strf("%-14s rmse %9.3f gf   pearson %.4f   temp mae %.4f degC\n",
                                  row.system.c_str(), row.pressure_rmse_gf,
                                  row.pressure_pearson_midstance, row.temperature_mae_c);
            }
            return kExitOk;
        }
        case RunMode::ValidateLayout:
            return run_validate_layout(config);
        case RunMode::Fit: {
            CalibrationModel model = CalibrationModel::LogMassStrain;
            if (opt.fit_model == "linear") {
                model = CalibrationModel::LinearTempWavelength;
            } else if (opt.fit_model != "log") {
                throw ConfigError("--model must be log or linear");
            }
            return run_fit(config, opt.fit_input, model, opt.fit_output);
        }
    }
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FBG smart-insole toolkit: simulate gait telemetry, stream it over UDP, "
                 "decode it back to pressure/temperature maps and gait cycles"};
    app.require_subcommand(1);

    CliOptions opt;
    struct ModeCmd {
        RunMode mode;
        CLI::App* cmd;
    };
    std::vector<ModeCmd> modes;
    const auto add_mode = [&](RunMode mode, const char* name, const char* help) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_common_flags(cmd, opt);
        modes.push_back({mode, cmd});
        return cmd;
    };

    add_mode(RunMode::Simulate, "simulate",
             "synthesize a session to files (truth maps, telemetry dump, ideal vGRF)");
    add_mode(RunMode::Serve, "serve", "emit a simulated telemetry stream over UDP");
    add_mode(RunMode::Process, "process", "ingest a UDP telemetry stream and decode it");
    add_mode(RunMode::Roundtrip, "roundtrip",
             "simulate, stream over loopback and decode in one process");
    add_mode(RunMode::Compare, "compare",
             "score FBG-20 and Electronic-24 reconstructions against the dense truth");
    add_mode(RunMode::ValidateLayout, "validate-layout",
             "check a layout against the manufacturer constraints");
    CLI::App* fit_cmd = add_mode(RunMode::Fit, "fit",
                                 "least-squares calibration fit from a points CSV");
    fit_cmd->add_option("--input", opt.fit_input, "CSV of x,y points")->required();
    fit_cmd->add_option("--model", opt.fit_model, "log or linear")->capture_default_str();
    fit_cmd->add_option("--output", opt.fit_output, "write the fit JSON here (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& m : modes) {
            if (m.cmd->parsed()) {
                RunConfig config = resolve_config(opt, m.cmd);
                return dispatch(m.mode, std::move(config), opt);
            }
        }
        std::cerr << "no mode selected\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CapacityError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::system_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ProtocolError& e) {
        std::cerr << "protocol error: " << e.what() << "\n";
        return kExitProtocol;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
