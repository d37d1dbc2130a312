#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fbgsole/dsp.hpp"
#include "fbgsole/gateway.hpp"
#include "fbgsole/io.hpp"
#include "fbgsole/layout.hpp"
#include "fbgsole/maps.hpp"
#include "fbgsole/physics.hpp"

namespace fbgsole {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitProtocol = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode { Simulate, Serve, Process, Roundtrip, Compare, ValidateLayout, Fit };

struct Endpoint {
    std::string host = kDefaultHost;
    int port = kDefaultPort;
};

Endpoint parse_endpoint(const std::string& text);

struct RunConfig {
    RunMode mode = RunMode::Roundtrip;
    GaitScenario scenario;
    std::string layout_path;  // empty = built-in default layout
    Endpoint bind;
    Endpoint dest;
    double rate_hz = 0.0;  // 0 = scenario sample rate
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    bool stamp = false;   // timestamped artifact names
    int pace_us = 200;    // wire pacing; timestamps stay nominal
    bool realtime = false;  // serve at the nominal rate instead of paced-fast
    Side side = Side::Left;  // serve/process single-side modes
    std::vector<double> map_at_s;   // pressure map export instants
    double map_interval_s = 0.0;    // temperature map interval; 0 = quarter points
    double compare_start_s = 2.0;   // first scored instant in compare mode

    double wire_rate_hz() const { return rate_hz > 0.0 ? rate_hz : scenario.sample_rate_hz; }
};

RunConfig config_from_json(const std::string& text);

SensorLayout load_layout_or_default(const std::string& path);

/// Generates the interrogator's view of one foot frame by frame: dense
/// field, sensor states, reflected spectrum, peak detection, and finally
/// the per-sensor readings that go on the wire. During gait sessions
/// pressure sensors report raw (uncompensated) strain and temperature
/// sensors report degC; in seated sessions pressure sensors are muted to
/// compensation mode (NaN).
class SessionSimulator {
public:
    SessionSimulator(const SensorLayout& layout, const GaitScenario& scenario, Side side,
                     std::uint64_t seed);

    int frame_count() const { return scenario_.frame_count(); }
    double time_of(std::uint32_t seq) const { return seq / scenario_.sample_rate_hz; }

    /// Frames must be pulled in seq order (strain noise advances an RNG).
    TelemetryFrame frame(std::uint32_t seq);

    PlantarField field_at(double t_s) const;

private:
    SensorLayout layout_;
    GaitScenario scenario_;
    Side side_;
    FootTemplate tmpl_;
    std::mt19937_64 rng_;
};

/// Consumes ordered frames and decodes them back to physical units:
/// compensation against the session's first temperature reading (nearest
/// temperature sensor for each pressure sensor), mass via the inverse log
/// calibration, then filtering and gait segmentation.
class DecodePipeline {
public:
    DecodePipeline(const SensorLayout& layout, double sample_rate_hz, double body_mass_kg);

    void consume(const TelemetryFrame& frame);

    std::size_t frames_consumed() const { return t_ms_.size(); }
    const std::vector<std::uint64_t>& timestamps_ms() const { return t_ms_; }

    /// Individual series filtered at 20 Hz (Nyquist-clamped when needed),
    /// combined series summed raw then filtered at 10 Hz, cycles from the
    /// 5%-body-weight rule.
    GaitRecord finalize();

    bool individual_filter_clamped() const { return individual_clamped_; }
    double individual_fc_hz() const { return individual_fc_hz_; }

    FootMap pressure_map_at(std::size_t frame_index, Side side) const;
    FootMap temperature_map_at(std::size_t frame_index, Side side) const;

    /// Frame index whose timestamp is nearest to t (consumed order).
    std::optional<std::size_t> frame_index_near(double t_s) const;

    const std::map<int, std::vector<double>>& mass_series() const { return mass_gf_; }
    const std::map<int, std::vector<double>>& temperature_series() const { return temp_c_; }

private:
    SensorLayout layout_;
    FootTemplate tmpl_;
    double sample_rate_hz_;
    double body_mass_kg_;
    std::map<int, int> nearest_temp_sensor_;  // pressure id -> temperature id
    std::map<int, double> t_ref_c_;           // first reading per temperature sensor
    std::map<int, double> latest_t_c_;
    std::vector<int> pressure_ids_;
    std::vector<int> temperature_ids_;
    std::map<int, std::vector<double>> mass_gf_;  // per pressure sensor, raw
    std::map<int, std::vector<double>> temp_c_;   // per temperature sensor
    std::vector<std::uint64_t> t_ms_;
    bool individual_clamped_ = false;
    double individual_fc_hz_ = 20.0;
};

/// 24-sensor electronic reference insole: 16 FSRs through the voltage
/// divider and anchored inverse law, 8 NTC thermistors through the
/// B-parameter equation. Runs in-process; only the FBG chain uses the wire.
namespace electronic {

inline constexpr double kExternalResistanceOhm = 1000.0;
inline constexpr double kSupplyVoltage = 3.3;
inline constexpr double kNominalR0Ohm = 10000.0;
inline constexpr double kNominalT0K = 298.15;

const std::vector<Point>& fsr_positions();
const std::vector<Point>& thermistor_positions();

/// Field -> FSR electrical round trip -> grams-force samples.
std::vector<MapSample> pressure_readings(const PlantarField& field);
/// Field -> thermistor round trip -> degC samples.
std::vector<MapSample> temperature_readings(const PlantarField& field);

}  // namespace electronic

struct SystemScore {
    std::string system;  // DenseTruth, FBG-20, Electronic-24
    double pressure_rmse_gf = 0.0;          // mean over scored frames
    double pressure_pearson_midstance = 0.0;
    double temperature_mae_c = 0.0;         // mean over scored frames
};

struct ComparisonReport {
    std::vector<SystemScore> rows;
    std::vector<double> frame_t_s;
    std::map<std::string, std::vector<double>> rmse_series_gf;
    std::map<std::string, std::vector<double>> mae_series_c;
};

std::string comparison_to_json(const ComparisonReport& report);
std::string comparison_to_csv(const ComparisonReport& report);

/// Reconstructs maps from the FBG-20 and Electronic-24 chains over one
/// gait cycle and scores both against the dense ground truth.
ComparisonReport run_compare(const RunConfig& config);

struct RoundtripResult {
    GaitRecord left_record;
    GaitRecord right_record;
    GapReport left_gaps;
    GapReport right_gaps;
    std::uint64_t parse_errors = 0;
    std::size_t frames_delivered = 0;
};

/// simulate -> encode -> loopback UDP -> ingest -> pipeline -> artifacts.
/// Left and right feet stream as consecutive sessions on the same port.
RoundtripResult run_roundtrip(const RunConfig& config);

/// Seated protocol: pressure sensors muted (mode C / NaN), temperature
/// maps exported over time, asymmetry report at session end. Returns the
/// exported maps (both sides, time ordered).
std::vector<FootMap> run_temperature_session(const RunConfig& config);

int run_simulate(const RunConfig& config);
int run_serve(const RunConfig& config);
int run_process(const RunConfig& config);
int run_validate_layout(const RunConfig& config);
int run_fit(const RunConfig& config, const std::string& points_csv_path,
            CalibrationModel model, const std::string& out_path);

}  // namespace fbgsole
