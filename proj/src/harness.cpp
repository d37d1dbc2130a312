#include "fbgsole/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fbgsole/util.hpp"

namespace fbgsole {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kIndividualCutoffHz = 20.0;
constexpr double kCombinedCutoffHz = 10.0;

const char* side_name(Side side) { return side == Side::Left ? "left" : "right"; }

std::string format_value(double v) {
    return std::isfinite(v) ? strf("%.3f", v) : std::string("NaN");
}

std::string stamp_suffix(bool stamp) {
    if (!stamp) return "";
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    return strf("_%lld",
                static_cast<long long>(
                    std::chrono::duration_cast<std::chrono::milliseconds>(now).count()));
}

json gaps_to_json(const GapReport& gaps, std::uint64_t parse_errors) {
    return {
        {"missing", gaps.missing},
        {"duplicates", gaps.duplicates},
        {"out_of_order", gaps.out_of_order},
        {"parse_errors", parse_errors},
    };
}

FootMap truth_pressure_map(const PlantarField& field) {
    FootMap map;
    map.tmpl = field.tmpl;
    map.kind = MapKind::Pressure;
    map.unit = "gf";
    map.t_s = field.t_s;
    map.side = field.side;
    map.values.assign(field.tmpl.size(), FootMap::no_data());
    for (int ix = 0; ix < field.tmpl.nx; ++ix) {
        for (int iy = 0; iy < field.tmpl.ny; ++iy) {
            const std::size_t i = field.tmpl.index(ix, iy);
            if (field.tmpl.mask[i]) {
                map.values[i] = kpa_to_grams_force(field.pressure_kpa[i]);
            }
        }
    }
    return map;
}

FootMap truth_temperature_map(const PlantarField& field) {
    FootMap map;
    map.tmpl = field.tmpl;
    map.kind = MapKind::Temperature;
    map.unit = "degC";
    map.t_s = field.t_s;
    map.side = field.side;
    map.values.assign(field.tmpl.size(), FootMap::no_data());
    for (std::size_t i = 0; i < field.tmpl.size(); ++i) {
        if (field.tmpl.mask[i]) map.values[i] = field.temperature_c[i];
    }
    return map;
}

void export_map_files(const FootMap& map, const std::string& out_dir) {
    const char* kind = map.kind == MapKind::Pressure ? "pressure" : "temperature";
    const long long ms = std::llround(map.t_s * 1000.0);
    const std::string base = strf("%s_%s_t%lld", side_name(map.side), kind, ms);
    write_file(out_dir + "/" + base + ".csv", export_map(map, MapFormat::CsvGrid));
    write_file(out_dir + "/" + base + ".pgm", export_map(map, MapFormat::Pgm));
}

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
    const std::size_t colon = text.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size()) {
        throw ConfigError("endpoint must be host:port, got '" + text + "'");
    }
    Endpoint ep;
    ep.host = text.substr(0, colon);
    try {
        ep.port = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw ConfigError("invalid port in endpoint '" + text + "'");
    }
    if (ep.port < 1 || ep.port > 65535) {
        throw ConfigError(strf("port %d out of range", ep.port));
    }
    return ep;
}

RunConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig config;
    if (doc.contains("scenario")) {
        config.scenario = scenario_from_json(doc.at("scenario").dump());
    }
    if (doc.contains("layout_path")) config.layout_path = doc.at("layout_path");
    if (doc.contains("bind")) config.bind = parse_endpoint(doc.at("bind"));
    if (doc.contains("dest")) config.dest = parse_endpoint(doc.at("dest"));
    if (doc.contains("rate_hz")) config.rate_hz = doc.at("rate_hz");
    if (doc.contains("out_dir")) config.out_dir = doc.at("out_dir");
    if (doc.contains("seed")) config.seed = doc.at("seed");
    if (doc.contains("stamp")) config.stamp = doc.at("stamp");
    if (doc.contains("pace_us")) config.pace_us = doc.at("pace_us");
    if (doc.contains("realtime")) config.realtime = doc.at("realtime");
    if (doc.contains("side")) {
        config.side = doc.at("side") == "right" ? Side::Right : Side::Left;
    }
    if (doc.contains("map_at_s")) {
        config.map_at_s = doc.at("map_at_s").get<std::vector<double>>();
    }
    if (doc.contains("map_interval_s")) config.map_interval_s = doc.at("map_interval_s");
    if (doc.contains("compare_start_s")) config.compare_start_s = doc.at("compare_start_s");
    return config;
}

SensorLayout load_layout_or_default(const std::string& path) {
    if (path.empty()) return build_default_layout();
    return layout_from_json(read_file(path));
}

// --- SessionSimulator ------------------------------------------------------

SessionSimulator::SessionSimulator(const SensorLayout& layout, const GaitScenario& scenario,
                                   Side side, std::uint64_t seed)
    : layout_(layout),
      scenario_(scenario),
      side_(side),
      tmpl_(FootTemplate::from_insole(layout.insole)),
      rng_(seed) {
    scenario_.validate();
}

PlantarField SessionSimulator::field_at(double t_s) const {
    return synth_gait_field(scenario_, t_s, side_, tmpl_, layout_.insole);
}

TelemetryFrame SessionSimulator::frame(std::uint32_t seq) {
    const double t = time_of(seq);
    const PlantarField field = field_at(t);
    const auto samples = sample_at_sensors(field, layout_);
    auto states = make_sensor_states(layout_, samples, scenario_.ambient_temp_c);

    if (scenario_.noise_rms_microstrain > 0.0) {
        std::normal_distribution<double> noise(0.0, scenario_.noise_rms_microstrain);
        for (auto& st : states) {
            const FbgSensorSpec& spec = layout_.sensor(st.sensor_id);
            if (spec.role == SensorRole::Pressure) {
                st.strain_microstrain += noise(rng_);
                st.reflected_nm = bragg_wavelength(spec, st.strain_microstrain,
                                                   st.temp_c - scenario_.ambient_temp_c);
            }
        }
    }

    // Full interrogator path: spectrum synthesis, peak detection, assignment.
    const SpectrumFrame spectrum = synth_spectrum(layout_, states);
    const auto peaks = detect_peaks(spectrum, layout_.plan);
    const PeakAssignment assignment = assign_peaks(peaks, layout_.plan);

    TelemetryFrame frame;
    frame.seq = seq;
    frame.t_ms = nominal_t_ms(seq, scenario_.sample_rate_hz);
    for (const auto& sensor : layout_.sensors) {
        SensorReading reading;
        reading.sensor_id = sensor.id;
        const auto it = assignment.wavelength_by_sensor.find(sensor.id);
        if (sensor.role == SensorRole::Pressure && scenario_.seated) {
            // pressure sensors are muted during temperature sessions
            reading.mode = ReadingMode::Compensation;
            reading.value = std::numeric_limits<double>::quiet_NaN();
        } else if (it == assignment.wavelength_by_sensor.end()) {
            continue;  // peak lost (heavy noise); the frame simply omits it
        } else if (sensor.role == SensorRole::Pressure) {
            reading.mode = ReadingMode::Strain;
            reading.value = quantize_reading(wavelength_to_strain(sensor, it->second));
        } else {
            reading.mode = ReadingMode::Temperature;
            reading.value = quantize_reading(
                scenario_.ambient_temp_c + wavelength_to_temperature_delta(sensor, it->second));
        }
        frame.readings.push_back(reading);
    }
    return frame;
}

// --- DecodePipeline ---------------------------------------------------------

DecodePipeline::DecodePipeline(const SensorLayout& layout, double sample_rate_hz,
                               double body_mass_kg)
    : layout_(layout),
      tmpl_(FootTemplate::from_insole(layout.insole)),
      sample_rate_hz_(sample_rate_hz),
      body_mass_kg_(body_mass_kg) {
    for (const auto& s : layout_.sensors) {
        if (s.role == SensorRole::Pressure) {
            pressure_ids_.push_back(s.id);
        } else {
            temperature_ids_.push_back(s.id);
        }
    }
    for (int pid : pressure_ids_) {
        const Point pos = layout_.sensor(pid).position_mm;
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int tid : temperature_ids_) {
            const double d = distance(pos, layout_.sensor(tid).position_mm);
            if (d < best_d) {
                best_d = d;
                best = tid;
            }
        }
        if (best >= 0) nearest_temp_sensor_[pid] = best;
        mass_gf_[pid] = {};
    }
    for (int tid : temperature_ids_) temp_c_[tid] = {};
}

void DecodePipeline::consume(const TelemetryFrame& frame) {
    // temperature readings first so compensation sees this frame's values
    for (const auto& r : frame.readings) {
        if (r.mode == ReadingMode::Temperature && std::isfinite(r.value)) {
            latest_t_c_[r.sensor_id] = r.value;
            t_ref_c_.emplace(r.sensor_id, r.value);
        }
    }

    for (int tid : temperature_ids_) {
        double value = FootMap::no_data();
        for (const auto& r : frame.readings) {
            if (r.sensor_id == tid && r.mode == ReadingMode::Temperature) {
                value = r.value;
            }
        }
        temp_c_[tid].push_back(value);
    }

    for (int pid : pressure_ids_) {
        const SensorReading* reading = nullptr;
        for (const auto& r : frame.readings) {
            if (r.sensor_id == pid) reading = &r;
        }
        auto& series = mass_gf_[pid];
        if (reading && reading->mode == ReadingMode::Strain && std::isfinite(reading->value)) {
            double strain = reading->value;
            const auto near = nearest_temp_sensor_.find(pid);
            if (near != nearest_temp_sensor_.end()) {
                const auto now = latest_t_c_.find(near->second);
                const auto ref = t_ref_c_.find(near->second);
                if (now != latest_t_c_.end() && ref != t_ref_c_.end()) {
                    strain = compensate(strain, now->second, ref->second);
                }
            }
            series.push_back(strain_to_mass(layout_.sensor(pid), strain));
        } else if (reading && reading->mode == ReadingMode::Compensation) {
            series.push_back(FootMap::no_data());
        } else {
            // reading lost in transit: hold the previous value
            series.push_back(series.empty() ? 0.0 : series.back());
        }
    }
    t_ms_.push_back(frame.t_ms);
}

GaitRecord DecodePipeline::finalize() {
    GaitRecord record;
    record.sample_rate_hz = sample_rate_hz_;
    record.sensor_ids = pressure_ids_;

    std::vector<double> combined(t_ms_.size(), 0.0);
    for (int pid : pressure_ids_) {
        const auto& raw = mass_gf_[pid];
        for (std::size_t k = 0; k < raw.size(); ++k) {
            if (std::isfinite(raw[k])) combined[k] += raw[k];
        }
        bool clamped = false;
        record.per_sensor_gf.push_back(
            lowpass(raw, kIndividualCutoffHz, sample_rate_hz_, &clamped));
        if (clamped) {
            individual_clamped_ = true;
            individual_fc_hz_ = 0.45 * sample_rate_hz_;
        }
    }
    record.combined_gf = lowpass(combined, kCombinedCutoffHz, sample_rate_hz_);
    record.cycles = segment_gait(record.combined_gf, sample_rate_hz_, body_mass_kg_);
    const double duration_s = t_ms_.empty() ? 0.0 : t_ms_.size() / sample_rate_hz_;
    record.cadence_hz = duration_s > 0.0 ? record.cycles.size() / duration_s : 0.0;
    return record;
}

FootMap DecodePipeline::pressure_map_at(std::size_t frame_index, Side side) const {
    std::vector<MapSample> samples;
    for (int pid : pressure_ids_) {
        const auto& series = mass_gf_.at(pid);
        if (frame_index < series.size() && std::isfinite(series[frame_index])) {
            samples.push_back({layout_.sensor(pid).position_mm, series[frame_index]});
        }
    }
    FootMap map = interpolate_map(samples, tmpl_, MapKind::Pressure);
    map.t_s = frame_index < t_ms_.size() ? t_ms_[frame_index] / 1000.0 : 0.0;
    map.side = side;
    return map;
}

FootMap DecodePipeline::temperature_map_at(std::size_t frame_index, Side side) const {
    std::vector<MapSample> samples;
    for (int tid : temperature_ids_) {
        const auto& series = temp_c_.at(tid);
        if (frame_index < series.size() && std::isfinite(series[frame_index])) {
            samples.push_back({layout_.sensor(tid).position_mm, series[frame_index]});
        }
    }
    FootMap map = interpolate_map(samples, tmpl_, MapKind::Temperature);
    map.t_s = frame_index < t_ms_.size() ? t_ms_[frame_index] / 1000.0 : 0.0;
    map.side = side;
    return map;
}

std::optional<std::size_t> DecodePipeline::frame_index_near(double t_s) const {
    if (t_ms_.empty()) return std::nullopt;
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t_ms_.size(); ++i) {
        const double d = std::abs(t_ms_[i] / 1000.0 - t_s);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

// --- electronic reference insole -------------------------------------------

namespace electronic {

const std::vector<Point>& fsr_positions() {
    static const std::vector<Point> positions = {
        {30, 30},  {30, 58},  {52, 22},  {52, 66},  {55, 44},   // heel
        {100, 30}, {100, 58},                                   // midfoot
        {150, 20}, {155, 44}, {150, 68}, {180, 30}, {180, 58},  // metatarsal
        {215, 25}, {215, 50}, {235, 40}, {230, 65},             // toes
    };
    return positions;
}

const std::vector<Point>& thermistor_positions() {
    static const std::vector<Point> positions = {
        {40, 44},  {85, 30},  {85, 58},  {130, 44},
        {170, 25}, {170, 63}, {205, 44}, {232, 55},
    };
    return positions;
}

std::vector<MapSample> pressure_readings(const PlantarField& field) {
    std::vector<MapSample> out;
    for (const Point& p : fsr_positions()) {
        const double load = field_load_gf_at(field, p);
        double decoded = 0.0;
        if (load > 1e-6) {
            const double r = fsr_resistance_from_mass(load);
            const double v = fsr_output_voltage(r, kExternalResistanceOhm, kSupplyVoltage);
            const double r_back = fsr_resistance_from_voltage(v, kExternalResistanceOhm,
                                                              kSupplyVoltage);
            decoded = mass_from_fsr_resistance(r_back);
        }
        out.push_back({p, decoded});
    }
    return out;
}

std::vector<MapSample> temperature_readings(const PlantarField& field) {
    std::vector<MapSample> out;
    for (const Point& p : thermistor_positions()) {
        const double t_c = field_temperature_at(field, p);
        const double r = thermistor_resistance_ohm(t_c + kCelsiusOffsetK,
                                                   kThermistorBConstantK, kNominalR0Ohm,
                                                   kNominalT0K);
        const double decoded =
            thermistor_temperature_k(r, kThermistorBConstantK, kNominalR0Ohm, kNominalT0K) -
            kCelsiusOffsetK;
        out.push_back({p, decoded});
    }
    return out;
}

}  // namespace electronic

// --- compare -----------------------------------------------------------------

ComparisonReport run_compare(const RunConfig& config) {
    const SensorLayout layout = load_layout_or_default(config.layout_path);
    GaitScenario sc = config.scenario;
    sc.validate();
    const FootTemplate tmpl = FootTemplate::from_insole(layout.insole);

    const double cycle_s = 1.0 / sc.cadence_hz;
    double t0 = config.compare_start_s;
    if (t0 + cycle_s > sc.duration_s) t0 = 0.0;
    if (t0 + cycle_s > sc.duration_s) {
        throw ConfigError("compare needs at least one full gait cycle in the scenario");
    }
    const int frames = std::max(1, static_cast<int>(std::floor(cycle_s * sc.sample_rate_hz)));
    const double t_mid = t0 + 0.35 * cycle_s;  // both lobes active

    // FBG spectral chain with compensation referenced to session start.
    const auto fbg_readings = [&](const PlantarField& field, const std::map<int, double>& t_ref)
        -> std::pair<std::vector<MapSample>, std::vector<MapSample>> {
        const auto samples = sample_at_sensors(field, layout);
        const auto states = make_sensor_states(layout, samples, sc.ambient_temp_c);
        const SpectrumFrame spectrum = synth_spectrum(layout, states);
        const auto peaks = detect_peaks(spectrum, layout.plan);
        const PeakAssignment assignment = assign_peaks(peaks, layout.plan);

        std::map<int, double> temp_now;
        std::vector<MapSample> temp_samples;
        for (const auto& sensor : layout.sensors) {
            if (sensor.role != SensorRole::Temperature) continue;
            const auto it = assignment.wavelength_by_sensor.find(sensor.id);
            if (it == assignment.wavelength_by_sensor.end()) continue;
            const double t_c =
                sc.ambient_temp_c + wavelength_to_temperature_delta(sensor, it->second);
            temp_now[sensor.id] = t_c;
            temp_samples.push_back({sensor.position_mm, t_c});
        }

        std::vector<MapSample> pressure_samples;
        for (const auto& sensor : layout.sensors) {
            if (sensor.role != SensorRole::Pressure) continue;
            const auto it = assignment.wavelength_by_sensor.find(sensor.id);
            if (it == assignment.wavelength_by_sensor.end()) continue;
            double strain = wavelength_to_strain(sensor, it->second);
            // nearest temperature sensor provides the compensation pair
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (const auto& [tid, unused] : temp_now) {
                const double d = distance(sensor.position_mm, layout.sensor(tid).position_mm);
                if (d < best_d) {
                    best_d = d;
                    best = tid;
                }
            }
            if (best >= 0 && t_ref.count(best)) {
                strain = compensate(strain, temp_now.at(best), t_ref.at(best));
            }
            pressure_samples.push_back({sensor.position_mm, strain_to_mass(sensor, strain)});
        }
        return {pressure_samples, temp_samples};
    };

    // session-start reference temperatures
    std::map<int, double> t_ref;
    {
        const PlantarField field0 = synth_gait_field(sc, 0.0, Side::Left, tmpl, layout.insole);
        const auto [unused, temp0] = fbg_readings(field0, {});
        for (std::size_t i = 0, k = 0; i < layout.sensors.size(); ++i) {
            if (layout.sensors[i].role == SensorRole::Temperature && k < temp0.size()) {
                t_ref[layout.sensors[i].id] = temp0[k++].second;
            }
        }
    }

    ComparisonReport report;
    const std::vector<std::string> systems = {"DenseTruth", "FBG-20", "Electronic-24"};
    for (const auto& s : systems) {
        report.rmse_series_gf[s] = {};
        report.mae_series_c[s] = {};
    }
    std::map<std::string, double> pearson_mid;

    int mid_index = 0;
    double best_mid_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < frames; ++k) {
        const double t = t0 + k / sc.sample_rate_hz;
        if (std::abs(t - t_mid) < best_mid_d) {
            best_mid_d = std::abs(t - t_mid);
            mid_index = k;
        }
    }

    for (int k = 0; k < frames; ++k) {
        const double t = t0 + k / sc.sample_rate_hz;
        report.frame_t_s.push_back(t);
        const PlantarField field = synth_gait_field(sc, t, Side::Left, tmpl, layout.insole);
        const FootMap truth_p = truth_pressure_map(field);
        const FootMap truth_t = truth_temperature_map(field);

        const auto [fbg_p_samples, fbg_t_samples] = fbg_readings(field, t_ref);
        const FootMap fbg_p = interpolate_map(fbg_p_samples, tmpl, MapKind::Pressure);
        const FootMap fbg_t = interpolate_map(fbg_t_samples, tmpl, MapKind::Temperature);

        const auto elec_p_samples = electronic::pressure_readings(field);
        const auto elec_t_samples = electronic::temperature_readings(field);
        const FootMap elec_p = interpolate_map(elec_p_samples, tmpl, MapKind::Pressure);
        const FootMap elec_t = interpolate_map(elec_t_samples, tmpl, MapKind::Temperature);

        report.rmse_series_gf["DenseTruth"].push_back(map_rmse(truth_p, truth_p));
        report.rmse_series_gf["FBG-20"].push_back(map_rmse(fbg_p, truth_p));
        report.rmse_series_gf["Electronic-24"].push_back(map_rmse(elec_p, truth_p));
        report.mae_series_c["DenseTruth"].push_back(map_mae(truth_t, truth_t));
        report.mae_series_c["FBG-20"].push_back(map_mae(fbg_t, truth_t));
        report.mae_series_c["Electronic-24"].push_back(map_mae(elec_t, truth_t));

        if (k == mid_index) {
            pearson_mid["DenseTruth"] = map_pearson(truth_p, truth_p);
            pearson_mid["FBG-20"] = map_pearson(fbg_p, truth_p);
            pearson_mid["Electronic-24"] = map_pearson(elec_p, truth_p);
        }
    }

    for (const auto& s : systems) {
        SystemScore row;
        row.system = s;
        const auto mean = [](const std::vector<double>& v) {
            if (v.empty()) return 0.0;
            double sum = 0.0;
            for (double x : v) sum += x;
            return sum / v.size();
        };
        row.pressure_rmse_gf = mean(report.rmse_series_gf[s]);
        row.temperature_mae_c = mean(report.mae_series_c[s]);
        row.pressure_pearson_midstance = pearson_mid[s];
        report.rows.push_back(row);
    }
    return report;
}

std::string comparison_to_json(const ComparisonReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({
            {"system", r.system},
            {"pressure_rmse_gf", r.pressure_rmse_gf},
            {"pressure_pearson_midstance", r.pressure_pearson_midstance},
            {"temperature_mae_c", r.temperature_mae_c},
        });
    }
    const json doc = {{"rows", rows}, {"frame_t_s", report.frame_t_s}};
    return doc.dump(2) + "\n";
}

std::string comparison_to_csv(const ComparisonReport& report) {
    std::ostringstream out;
    out << "t_s";
    for (const auto& [system, unused] : report.rmse_series_gf) out << ",rmse_gf_" << system;
    for (const auto& [system, unused] : report.mae_series_c) out << ",mae_c_" << system;
    out << "\n";
    for (std::size_t k = 0; k < report.frame_t_s.size(); ++k) {
        out << strf("%.6f", report.frame_t_s[k]);
        for (const auto& [unused, series] : report.rmse_series_gf) {
            out << ',' << strf("%.6f", series[k]);
        }
        for (const auto& [unused, series] : report.mae_series_c) {
            out << ',' << strf("%.6f", series[k]);
        }
        out << "\n";
    }
    return out.str();
}

// --- wire sessions -----------------------------------------------------------

namespace {

struct SessionOutcome {
    IngestResult ingested;
    GaitRecord record;
    bool filter_clamped = false;
};

SessionOutcome run_wire_session(const SensorLayout& layout, const GaitScenario& scenario,
                                Side side, const RunConfig& config,
                                DecodePipeline& pipeline) {
    const int n = scenario.frame_count();

    // bind before the emitter starts so nothing is lost
    UdpReceiver receiver(config.bind.host, config.bind.port);
    SessionSimulator simulator(layout, scenario, side,
                               config.seed ^ (side == Side::Right ? 0x5eed : 0));

    std::exception_ptr emit_error;
    std::thread emitter([&] {
        try {
            EmitOptions options;
            options.host = config.bind.host;
            options.port = config.bind.port;
            options.rate_hz = scenario.sample_rate_hz;
            options.pace_us = config.pace_us;
            emit_stream(
                [&](std::uint32_t seq) -> std::optional<TelemetryFrame> {
                    if (static_cast<int>(seq) >= n) return std::nullopt;
                    return simulator.frame(seq);
                },
                options);
        } catch (...) {
            emit_error = std::current_exception();
        }
    });

    SessionOutcome outcome;
    {
        FrameReorderer reorderer(8);
        while (static_cast<int>(outcome.ingested.frames.size()) < n) {
            const auto datagram = receiver.recv(2000);
            if (!datagram) break;  // idle: emitter finished or frames lost
            DecodeResult decoded = decode_frame(*datagram);
            if (!decoded.ok()) {
                outcome.ingested.parse_errors += 1;
                continue;
            }
            for (auto& f : reorderer.push(std::move(*decoded.frame))) {
                outcome.ingested.frames.push_back(std::move(f));
            }
        }
        for (auto& f : reorderer.finish()) {
            outcome.ingested.frames.push_back(std::move(f));
        }
        outcome.ingested.gaps = reorderer.report();
    }
    emitter.join();
    if (emit_error) std::rethrow_exception(emit_error);

    for (const auto& frame : outcome.ingested.frames) pipeline.consume(frame);
    outcome.record = pipeline.finalize();
    outcome.filter_clamped = pipeline.individual_filter_clamped();
    if (outcome.filter_clamped) {
        std::cerr << strf(
            "warning: individual cutoff %.0f Hz is at or above Nyquist for fs %.0f Hz; "
            "clamped to %.1f Hz\n",
            kIndividualCutoffHz, scenario.sample_rate_hz, pipeline.individual_fc_hz());
    }
    return outcome;
}

void write_session_csvs(const std::string& out_dir, Side side, const SensorLayout& layout,
                        const DecodePipeline& pipeline, const GaitRecord& record,
                        const std::string& suffix) {
    const auto& t_ms = pipeline.timestamps_ms();

    // pressure log: every sensor column; temperature sensors show NaN here
    std::ostringstream pressure;
    pressure << "t_ms";
    for (const auto& s : layout.sensors) pressure << strf(",sensor_%d", s.id);
    pressure << ",combined\n";
    for (std::size_t k = 0; k < t_ms.size(); ++k) {
        pressure << t_ms[k];
        for (const auto& s : layout.sensors) {
            double v = FootMap::no_data();
            if (s.role == SensorRole::Pressure) {
                const auto it = std::find(record.sensor_ids.begin(), record.sensor_ids.end(),
                                          s.id);
                if (it != record.sensor_ids.end()) {
                    const std::size_t col = it - record.sensor_ids.begin();
                    if (k < record.per_sensor_gf[col].size()) {
                        v = record.per_sensor_gf[col][k];
                    }
                }
            }
            pressure << ',' << format_value(v);
        }
        pressure << ',' << format_value(k < record.combined_gf.size() ? record.combined_gf[k]
                                                                      : FootMap::no_data());
        pressure << "\n";
    }
    write_file(strf("%s/%s_pressure%s.csv", out_dir.c_str(), side_name(side), suffix.c_str()),
               pressure.str());

    // temperature log: pressure sensors show NaN here
    const auto& temp_series = pipeline.temperature_series();
    std::ostringstream temperature;
    temperature << "t_ms";
    for (const auto& s : layout.sensors) temperature << strf(",sensor_%d", s.id);
    temperature << "\n";
    for (std::size_t k = 0; k < t_ms.size(); ++k) {
        temperature << t_ms[k];
        for (const auto& s : layout.sensors) {
            double v = FootMap::no_data();
            const auto it = temp_series.find(s.id);
            if (it != temp_series.end() && k < it->second.size()) {
                v = it->second[k];
            }
            temperature << ',' << format_value(v);
        }
        temperature << "\n";
    }
    write_file(strf("%s/%s_temperature%s.csv", out_dir.c_str(), side_name(side),
                    suffix.c_str()),
               temperature.str());
}

}  // namespace

RoundtripResult run_roundtrip(const RunConfig& config) {
    const SensorLayout layout = load_layout_or_default(config.layout_path);
    GaitScenario sc = config.scenario;
    if (config.rate_hz > 0.0) sc.sample_rate_hz = config.rate_hz;
    sc.validate();
    fs::create_directories(config.out_dir);
    const std::string suffix = stamp_suffix(config.stamp);

    RoundtripResult result;
    json report_doc;
    for (const Side side : {Side::Left, Side::Right}) {
        DecodePipeline pipeline(layout, sc.sample_rate_hz, sc.body_mass_kg);
        const SessionOutcome outcome = run_wire_session(layout, sc, side, config, pipeline);

        write_session_csvs(config.out_dir, side, layout, pipeline, outcome.record, suffix);

        // maps: pressure at each requested instant (default: first cycle
        // midstance), temperature at session end
        std::vector<double> map_times = config.map_at_s;
        if (map_times.empty() && !outcome.record.cycles.empty()) {
            const auto& cycle = outcome.record.cycles.front();
            const double t_mid =
                (cycle.heel_strike +
                 0.35 * (cycle.next_heel_strike - cycle.heel_strike)) /
                sc.sample_rate_hz;
            map_times.push_back(t_mid);
        }
        for (double t : map_times) {
            if (const auto idx = pipeline.frame_index_near(t)) {
                export_map_files(pipeline.pressure_map_at(*idx, side), config.out_dir);
            }
        }
        if (pipeline.frames_consumed() > 0) {
            export_map_files(
                pipeline.temperature_map_at(pipeline.frames_consumed() - 1, side),
                config.out_dir);
        }

        json cycles = json::array();
        for (const auto& c : outcome.record.cycles) {
            cycles.push_back({{"heel_strike", c.heel_strike},
                              {"toe_off", c.toe_off},
                              {"next_heel_strike", c.next_heel_strike}});
        }
        report_doc[side_name(side)] = {
            {"frames", pipeline.frames_consumed()},
            {"cycles", cycles},
            {"cadence_hz", outcome.record.cadence_hz},
            {"gaps", gaps_to_json(outcome.ingested.gaps, outcome.ingested.parse_errors)},
            {"individual_filter_clamped", outcome.filter_clamped},
        };

        if (side == Side::Left) {
            result.left_record = outcome.record;
            result.left_gaps = outcome.ingested.gaps;
        } else {
            result.right_record = outcome.record;
            result.right_gaps = outcome.ingested.gaps;
        }
        result.parse_errors += outcome.ingested.parse_errors;
        result.frames_delivered += outcome.ingested.frames.size();
    }
    write_file(config.out_dir + "/gait_report" + suffix + ".json",
               report_doc.dump(2) + "\n");
    return result;
}

std::vector<FootMap> run_temperature_session(const RunConfig& config) {
    const SensorLayout layout = load_layout_or_default(config.layout_path);
    GaitScenario sc = config.scenario;
    if (!sc.seated) {
        throw ConfigError("temperature sessions need a seated scenario (pressure lobes off)");
    }
    if (config.rate_hz > 0.0) sc.sample_rate_hz = config.rate_hz;
    sc.validate();
    fs::create_directories(config.out_dir);
    const std::string suffix = stamp_suffix(config.stamp);

    const double interval =
        config.map_interval_s > 0.0 ? config.map_interval_s : sc.duration_s / 4.0;

    std::vector<FootMap> maps;
    FootMap left_final, right_final;
    json report_doc;
    for (const Side side : {Side::Left, Side::Right}) {
        DecodePipeline pipeline(layout, sc.sample_rate_hz, sc.body_mass_kg);
        const SessionOutcome outcome = run_wire_session(layout, sc, side, config, pipeline);
        write_session_csvs(config.out_dir, side, layout, pipeline, outcome.record, suffix);

        for (double t = 0.0; t <= sc.duration_s + 1e-9; t += interval) {
            if (const auto idx = pipeline.frame_index_near(t)) {
                FootMap map = pipeline.temperature_map_at(*idx, side);
                export_map_files(map, config.out_dir);
                maps.push_back(std::move(map));
            }
            if (interval <= 0.0) break;
        }
        if (pipeline.frames_consumed() > 0) {
            FootMap final_map =
                pipeline.temperature_map_at(pipeline.frames_consumed() - 1, side);
            if (side == Side::Left) {
                left_final = final_map;
            } else {
                right_final = final_map;
            }
        }
        report_doc[side_name(side)]["frames"] = pipeline.frames_consumed();
        report_doc[side_name(side)]["gaps"] =
            gaps_to_json(outcome.ingested.gaps, outcome.ingested.parse_errors);
    }

    if (!left_final.values.empty() && !right_final.values.empty()) {
        const AsymmetryReport asym = asymmetry_analysis(left_final, mirror_map(right_final));
        json regions = json::object();
        for (int r = 0; r < kNumFootRegions; ++r) {
            regions[foot_region_name(static_cast<FootRegion>(r))] = asym.delta_t_c[r];
        }
        json flagged = json::array();
        for (const FootRegion r : asym.flagged) flagged.push_back(foot_region_name(r));
        report_doc["asymmetry"] = {
            {"threshold_c", asym.threshold_c},
            {"delta_t_c", regions},
            {"flagged", flagged},
        };
    }
    write_file(config.out_dir + "/temperature_report" + suffix + ".json",
               report_doc.dump(2) + "\n");
    return maps;
}

int run_simulate(const RunConfig& config) {
    const SensorLayout layout = load_layout_or_default(config.layout_path);
    GaitScenario sc = config.scenario;
    if (config.rate_hz > 0.0) sc.sample_rate_hz = config.rate_hz;
    sc.validate();
    fs::create_directories(config.out_dir);

    write_file(config.out_dir + "/scenario.json", scenario_to_json(sc));
    write_file(config.out_dir + "/layout.json", layout_to_json(layout));

    const int n = sc.frame_count();
    std::ostringstream combined_csv;
    combined_csv << "t_ms,left_gf,right_gf\n";
    for (const Side side : {Side::Left, Side::Right}) {
        SessionSimulator simulator(layout, sc, side,
                                   config.seed ^ (side == Side::Right ? 0x5eed : 0));
        std::ostringstream wire;
        for (int seq = 0; seq < n; ++seq) {
            TelemetryFrame frame = simulator.frame(static_cast<std::uint32_t>(seq));
            frame.t_ms = nominal_t_ms(static_cast<std::uint32_t>(seq), sc.sample_rate_hz);
            wire << encode_frame(frame);
        }
        write_file(strf("%s/telemetry_%s.fbgx", config.out_dir.c_str(), side_name(side)),
                   wire.str());

        // dense ground-truth maps at the requested instants
        std::vector<double> map_times = config.map_at_s;
        if (map_times.empty() && sc.duration_s >= 0.5 / sc.cadence_hz) {
            map_times.push_back(0.35 / sc.cadence_hz);
        }
        for (double t : map_times) {
            if (t < 0.0 || t > sc.duration_s) continue;
            const PlantarField field = simulator.field_at(t);
            export_map_files(truth_pressure_map(field), config.out_dir);
            export_map_files(truth_temperature_map(field), config.out_dir);
        }
    }
    for (int k = 0; k < n; ++k) {
        const double t = k / sc.sample_rate_hz;
        combined_csv << nominal_t_ms(static_cast<std::uint32_t>(k), sc.sample_rate_hz) << ','
                     << strf("%.3f", ideal_combined_vgrf_gf(sc, t, Side::Left)) << ','
                     << strf("%.3f", ideal_combined_vgrf_gf(sc, t, Side::Right)) << "\n";
    }
    write_file(config.out_dir + "/ideal_combined.csv", combined_csv.str());
    return kExitOk;
}

int run_serve(const RunConfig& config) {
    const SensorLayout layout = load_layout_or_default(config.layout_path);
    GaitScenario sc = config.scenario;
    if (config.rate_hz > 0.0) sc.sample_rate_hz = config.rate_hz;
    sc.validate();

    SessionSimulator simulator(layout, sc, config.side, config.seed);
    const int n = sc.frame_count();
    EmitOptions options;
    options.host = config.dest.host;
    options.port = config.dest.port;
    options.rate_hz = sc.sample_rate_hz;
    options.pace_us = config.realtime
                          ? static_cast<int>(std::llround(1e6 / sc.sample_rate_hz))
                          : config.pace_us;
    const std::uint32_t sent = emit_stream(
        [&](std::uint32_t seq) -> std::optional<TelemetryFrame> {
            if (static_cast<int>(seq) >= n) return std::nullopt;
            return simulator.frame(seq);
        },
        options);
    std::cerr << strf("served %u frames to %s:%d\n", sent, options.host.c_str(),
                      options.port);
    return kExitOk;
}

int run_process(const RunConfig& config) {
    const SensorLayout layout = load_layout_or_default(config.layout_path);
    GaitScenario sc = config.scenario;
    if (config.rate_hz > 0.0) sc.sample_rate_hz = config.rate_hz;
    fs::create_directories(config.out_dir);

    IngestOptions options;
    options.host = config.bind.host;
    options.port = config.bind.port;
    const IngestResult ingested = ingest_stream(options);
    if (ingested.frames.empty() && ingested.parse_errors > 0) {
        throw ProtocolError(strf("received only undecodable datagrams (%llu parse errors)",
                                 static_cast<unsigned long long>(ingested.parse_errors)));
    }

    DecodePipeline pipeline(layout, sc.sample_rate_hz, sc.body_mass_kg);
    for (const auto& frame : ingested.frames) pipeline.consume(frame);
    const GaitRecord record = pipeline.finalize();
    const std::string suffix = stamp_suffix(config.stamp);
    write_session_csvs(config.out_dir, config.side, layout, pipeline, record, suffix);

    json cycles = json::array();
    for (const auto& c : record.cycles) {
        cycles.push_back({{"heel_strike", c.heel_strike},
                          {"toe_off", c.toe_off},
                          {"next_heel_strike", c.next_heel_strike}});
    }
    const json report = {
        {"frames", pipeline.frames_consumed()},
        {"cycles", cycles},
        {"cadence_hz", record.cadence_hz},
        {"gaps", gaps_to_json(ingested.gaps, ingested.parse_errors)},
    };
    write_file(config.out_dir + "/process_report" + suffix + ".json", report.dump(2) + "\n");
    return kExitOk;
}

int run_validate_layout(const RunConfig& config) {
    const SensorLayout layout = load_layout_or_default(config.layout_path);
    const ValidationReport report = validate_layout(layout);
    json violations = json::array();
    for (const auto& v : report.violations) {
        violations.push_back({{"rule", v.rule}, {"detail", v.detail}, {"sensor_id", v.sensor_id}});
    }
    const json doc = {
        {"valid", report.valid()},
        {"min_bend_radius_mm",
         std::isinf(report.min_bend_radius_mm) ? json("unbounded")
                                               : json(report.min_bend_radius_mm)},
        {"violations", violations},
    };
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

int run_fit(const RunConfig& config, const std::string& points_csv_path,
            CalibrationModel model, const std::string& out_path) {
    const std::string text = read_file(points_csv_path);
    std::istringstream in(text);
    std::string line;
    std::vector<Point> points;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string xs, ys;
        if (!std::getline(row, xs, ',') || !std::getline(row, ys, ',')) continue;
        try {
            points.push_back({std::stod(xs), std::stod(ys)});
        } catch (const std::exception&) {
            continue;  // header or comment line
        }
    }
    const CalibrationFit fit = fit_calibration(points, model);
    const json doc = {
        {"model", model == CalibrationModel::LogMassStrain ? "log_mass_strain"
                                                           : "linear_temp_wavelength"},
        {"a", fit.a},
        {"b", fit.b},
        {"r_squared", fit.r_squared},
        {"points", points.size()},
    };
    const std::string payload = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << payload;
    } else {
        fs::create_directories(config.out_dir);
        write_file(out_path, payload);
    }
    return kExitOk;
}

}  // namespace fbgsole
