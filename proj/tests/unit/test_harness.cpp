#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "fbgsole/harness.hpp"

using namespace fbgsole;
namespace fs = std::filesystem;

namespace {

GaitScenario short_scenario() {
    GaitScenario sc;
    sc.duration_s = 6.0;
    sc.cadence_hz = 1.0;
    sc.sample_rate_hz = 40.0;
    return sc;
}

}  // namespace

TEST_CASE("endpoint parsing") {
    const Endpoint ep = parse_endpoint("127.0.0.1:9123");
    CHECK(ep.host == "127.0.0.1");
    CHECK(ep.port == 9123);
    CHECK_THROWS_AS(parse_endpoint("no-port"), ConfigError);
    CHECK_THROWS_AS(parse_endpoint("h:99999"), ConfigError);
}

TEST_CASE("config json round trip picks up scenario and endpoints") {
    const RunConfig config = config_from_json(R"({
        "scenario": {"body_mass_kg": 82.5, "duration_s": 12, "seated": true,
                     "left_offsets_c": {"medial_heel": 3.0}},
        "bind": "127.0.0.1:9300",
        "seed": 99,
        "out_dir": "artifacts"
    })");
    CHECK(config.scenario.body_mass_kg == doctest::Approx(82.5));
    CHECK(config.scenario.seated);
    CHECK(config.scenario.left_offsets_c[static_cast<int>(FootRegion::MedialHeel)] ==
          doctest::Approx(3.0));
    CHECK(config.bind.port == 9300);
    CHECK(config.seed == 99);
    CHECK(config.out_dir == "artifacts");
    CHECK_THROWS_AS(config_from_json("{not json"), ConfigError);
}

TEST_CASE("layout json round trip preserves the document") {
    const SensorLayout layout = build_default_layout();
    const std::string text = layout_to_json(layout);
    const SensorLayout back = layout_from_json(text);
    REQUIRE(back.sensors.size() == layout.sensors.size());
    for (std::size_t i = 0; i < layout.sensors.size(); ++i) {
        CHECK(back.sensors[i].id == layout.sensors[i].id);
        CHECK(back.sensors[i].role == layout.sensors[i].role);
        CHECK(back.sensors[i].lambda_nominal_nm ==
              doctest::Approx(layout.sensors[i].lambda_nominal_nm).epsilon(1e-12));
        CHECK(back.sensors[i].position_mm.x ==
              doctest::Approx(layout.sensors[i].position_mm.x).epsilon(1e-9));
    }
    CHECK(back.plan.guard_band_nm == doctest::Approx(layout.plan.guard_band_nm));
    CHECK(back.fiber.polyline_mm.size() == layout.fiber.polyline_mm.size());
    CHECK(validate_layout(back).valid());
}

TEST_CASE("session simulator is deterministic per seed") {
    const SensorLayout layout = build_default_layout();
    GaitScenario sc = short_scenario();
    sc.noise_rms_microstrain = 2.0;
    SessionSimulator a(layout, sc, Side::Left, 1234);
    SessionSimulator b(layout, sc, Side::Left, 1234);
    SessionSimulator c(layout, sc, Side::Left, 999);
    bool any_difference = false;
    for (std::uint32_t seq = 0; seq < 12; ++seq) {
        const std::string fa = encode_frame(a.frame(seq));
        CHECK(fa == encode_frame(b.frame(seq)));
        if (fa != encode_frame(c.frame(seq))) any_difference = true;
    }
    CHECK(any_difference);
}

TEST_CASE("gait frames carry strain plus temperature; seated frames mute pressure") {
    const SensorLayout layout = build_default_layout();
    GaitScenario sc = short_scenario();
    SessionSimulator gait(layout, sc, Side::Left, 1);
    const TelemetryFrame frame = gait.frame(8);  // mid-stance-ish
    int strain = 0, temp = 0, comp = 0;
    for (const auto& r : frame.readings) {
        if (r.mode == ReadingMode::Strain) ++strain;
        if (r.mode == ReadingMode::Temperature) ++temp;
        if (r.mode == ReadingMode::Compensation) ++comp;
    }
    CHECK(strain == 15);
    CHECK(temp == 5);
    CHECK(comp == 0);

    sc.seated = true;
    SessionSimulator seated(layout, sc, Side::Left, 1);
    const TelemetryFrame muted = seated.frame(0);
    strain = temp = comp = 0;
    for (const auto& r : muted.readings) {
        if (r.mode == ReadingMode::Strain) ++strain;
        if (r.mode == ReadingMode::Temperature) ++temp;
        if (r.mode == ReadingMode::Compensation) {
            ++comp;
            CHECK(std::isnan(r.value));
        }
    }
    CHECK(strain == 0);
    CHECK(temp == 5);
    CHECK(comp == 15);
}

TEST_CASE("pipeline decodes a simulated session back to clean gait cycles") {
    const SensorLayout layout = build_default_layout();
    const GaitScenario sc = short_scenario();
    SessionSimulator simulator(layout, sc, Side::Left, 7);
    DecodePipeline pipeline(layout, sc.sample_rate_hz, sc.body_mass_kg);
    const int n = sc.frame_count();
    for (int seq = 0; seq < n; ++seq) {
        pipeline.consume(simulator.frame(static_cast<std::uint32_t>(seq)));
    }
    const GaitRecord record = pipeline.finalize();
    CHECK(pipeline.frames_consumed() == static_cast<std::size_t>(n));
    // 6 s at 1 Hz: 6 heel strikes, 5 complete cycles (the last has no successor)
    CHECK(record.cycles.size() >= 5);
    CHECK(record.cycles.size() <= 6);

    // boundaries within one sample of the synthesizer's ground truth
    const GaitTruthMarks truth = gait_truth_marks(sc, Side::Left, layout);
    REQUIRE(truth.heel_strikes.size() >= record.cycles.size());
    for (std::size_t i = 0; i < record.cycles.size(); ++i) {
        const auto diff_hs =
            static_cast<long long>(record.cycles[i].heel_strike) -
            static_cast<long long>(truth.heel_strikes[i]);
        const auto diff_to = static_cast<long long>(record.cycles[i].toe_off) -
                             static_cast<long long>(truth.toe_offs[i]);
        CHECK(std::abs(diff_hs) <= 1);
        CHECK(std::abs(diff_to) <= 1);
    }
}

TEST_CASE("pipeline compensation holds loads steady under a warming foot") {
    const SensorLayout layout = build_default_layout();
    GaitScenario sc = short_scenario();
    sc.warmup_time_constant_s = 3.0;  // aggressive warmup over the session
    sc.steady_foot_temp_c = 36.0;
    SessionSimulator simulator(layout, sc, Side::Left, 7);
    DecodePipeline pipeline(layout, sc.sample_rate_hz, sc.body_mass_kg);
    const int n = sc.frame_count();
    for (int seq = 0; seq < n; ++seq) {
        pipeline.consume(simulator.frame(static_cast<std::uint32_t>(seq)));
    }
    // swing-phase samples should read the unloaded baseline (~8.9 g) in
    // every cycle, early and late, despite ~8 degC of drift
    const auto& series = pipeline.mass_series().at(0);  // heel sensor
    const double baseline = strain_to_mass(layout.sensor(0), 0.0);
    // phase 0.8 of cycles 1 and 5 (swing)
    const std::size_t early = static_cast<std::size_t>(0.8 * 40.0);
    const std::size_t late = static_cast<std::size_t>((5.0 + 0.8) * 40.0);
    REQUIRE(series.size() > late);
    CHECK(series[early] == doctest::Approx(baseline).epsilon(0.01));
    CHECK(series[late] == doctest::Approx(baseline).epsilon(0.01));
}

TEST_CASE("electronic chain round trips loads and temperatures") {
    const GaitScenario sc = short_scenario();
    const PlantarField field = synth_gait_field(sc, 0.2, Side::Left);  // heel peak
    const auto pressures = electronic::pressure_readings(field);
    REQUIRE(pressures.size() == 16);
    for (const auto& [pos, value] : pressures) {
        const double truth = field_load_gf_at(field, pos);
        CHECK(value == doctest::Approx(truth).epsilon(1e-9));
    }
    const auto temps = electronic::temperature_readings(field);
    REQUIRE(temps.size() == 8);
    for (const auto& [pos, value] : temps) {
        const double truth = field_temperature_at(field, pos);
        CHECK(value == doctest::Approx(truth).epsilon(1e-9));
    }
}

TEST_CASE("compare scores the dense truth perfectly and the FBG chain well") {
    RunConfig config;
    config.scenario = short_scenario();
    config.compare_start_s = 2.0;
    const ComparisonReport report = run_compare(config);
    REQUIRE(report.rows.size() == 3);
    const auto& truth = report.rows[0];
    CHECK(truth.system == "DenseTruth");
    CHECK(truth.pressure_rmse_gf == doctest::Approx(0.0));
    CHECK(truth.pressure_pearson_midstance == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(truth.temperature_mae_c == doctest::Approx(0.0));

    const auto& fbg = report.rows[1];
    CHECK(fbg.system == "FBG-20");
    CHECK(fbg.pressure_pearson_midstance >= 0.8);

    const auto& elec = report.rows[2];
    CHECK(elec.system == "Electronic-24");
    CHECK(elec.temperature_mae_c <= fbg.temperature_mae_c + 1.0);
}

TEST_CASE("electronic 8-probe temperature maps track FBG 5-probe maps over seeds") {
    // symmetric scenarios with randomized regional structure: the denser
    // electronic probe set should never do much worse than the FBG set
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> offset(-2.0, 2.0);
    std::uniform_real_distribution<double> ambient(20.0, 28.0);
    for (int trial = 0; trial < 10; ++trial) {
        RunConfig config;
        config.scenario = short_scenario();
        config.scenario.duration_s = 4.0;
        config.scenario.ambient_temp_c = ambient(rng);
        config.scenario.steady_foot_temp_c = config.scenario.ambient_temp_c + 9.0;
        for (int r = 0; r < kNumFootRegions; ++r) {
            const double v = offset(rng);
            config.scenario.left_offsets_c[r] = v;
            config.scenario.right_offsets_c[r] = v;  // symmetric
        }
        config.compare_start_s = 2.0;
        const ComparisonReport report = run_compare(config);
        const double fbg_mae = report.rows[1].temperature_mae_c;
        const double elec_mae = report.rows[2].temperature_mae_c;
        CHECK(elec_mae <= fbg_mae + 1.0);
    }
}

TEST_CASE("roundtrip over loopback delivers every frame and deterministic logs") {
    RunConfig config;
    config.scenario = short_scenario();
    config.bind = {"127.0.0.1", 19771};
    config.pace_us = 50;
    config.out_dir = (fs::temp_directory_path() / "fbgsole_rt_a").string();
    fs::remove_all(config.out_dir);

    const RoundtripResult first = run_roundtrip(config);
    const int n = config.scenario.frame_count();
    CHECK(first.frames_delivered == static_cast<std::size_t>(2 * n));
    CHECK(first.parse_errors == 0);
    CHECK(first.left_gaps.missing.empty());
    CHECK(first.left_record.cycles.size() >= 4);

    RunConfig again = config;
    again.out_dir = (fs::temp_directory_path() / "fbgsole_rt_b").string();
    fs::remove_all(again.out_dir);
    run_roundtrip(again);

    for (const char* name : {"left_pressure.csv", "right_pressure.csv",
                             "left_temperature.csv", "right_temperature.csv"}) {
        const std::string a = read_file(config.out_dir + "/" + name);
        const std::string b = read_file(again.out_dir + "/" + name);
        CHECK(a == b);
        CHECK(!a.empty());
    }
    fs::remove_all(config.out_dir);
    fs::remove_all(again.out_dir);
}

TEST_CASE("temperature session flags an injected left-heel hotspot") {
    RunConfig config;
    config.scenario = short_scenario();
    config.scenario.seated = true;
    config.scenario.warmup_time_constant_s = 2.0;
    config.scenario.steady_foot_temp_c = 34.0;
    config.scenario.left_offsets_c[static_cast<int>(FootRegion::MedialHeel)] = 3.0;
    config.scenario.left_offsets_c[static_cast<int>(FootRegion::LateralHeel)] = 3.0;
    config.bind = {"127.0.0.1", 19772};
    config.pace_us = 50;
    config.out_dir = (fs::temp_directory_path() / "fbgsole_temp_session").string();
    fs::remove_all(config.out_dir);

    const auto maps = run_temperature_session(config);
    CHECK(!maps.empty());

    // the foot warms toward the steady map: the last left-side map is
    // warmer than the first one everywhere the mask carries data
    std::vector<const FootMap*> left_maps;
    for (const auto& map : maps) {
        if (map.side == Side::Left) left_maps.push_back(&map);
    }
    REQUIRE(left_maps.size() >= 2);
    const FootMap& first = *left_maps.front();
    const FootMap& last = *left_maps.back();
    CHECK(last.t_s > first.t_s);
    for (std::size_t i = 0; i < first.values.size(); ++i) {
        if (std::isfinite(first.values[i]) && std::isfinite(last.values[i])) {
            CHECK(last.values[i] > first.values[i]);
        }
    }

    const std::string report = read_file(config.out_dir + "/temperature_report.json");
    CHECK(report.find("medial_heel") != std::string::npos);
    CHECK(report.find("\"flagged\"") != std::string::npos);
    // at least one heel region flagged
    const std::size_t flagged_pos = report.find("\"flagged\"");
    CHECK(report.find("heel", flagged_pos) != std::string::npos);
    fs::remove_all(config.out_dir);
}

TEST_CASE("roundtrip with zero duration exits cleanly with zero frames") {
    RunConfig config;
    config.scenario = short_scenario();
    config.scenario.duration_s = 0.0;
    config.bind = {"127.0.0.1", 19775};
    config.out_dir = (fs::temp_directory_path() / "fbgsole_rt0").string();
    fs::remove_all(config.out_dir);
    const RoundtripResult result = run_roundtrip(config);
    CHECK(result.frames_delivered == 0);
    CHECK(result.parse_errors == 0);
    CHECK(result.left_record.cycles.empty());
    fs::remove_all(config.out_dir);
}

TEST_CASE("temperature session requires a seated scenario") {
    RunConfig config;
    config.scenario = short_scenario();
    config.scenario.seated = false;
    CHECK_THROWS_AS(run_temperature_session(config), ConfigError);
}

TEST_CASE("simulate with zero duration writes empty artifacts and returns cleanly") {
    RunConfig config;
    config.scenario = short_scenario();
    config.scenario.duration_s = 0.0;
    config.out_dir = (fs::temp_directory_path() / "fbgsole_sim0").string();
    fs::remove_all(config.out_dir);
    CHECK(run_simulate(config) == kExitOk);
    const std::string wire = read_file(config.out_dir + "/telemetry_left.fbgx");
    CHECK(wire.empty());
    fs::remove_all(config.out_dir);
}
