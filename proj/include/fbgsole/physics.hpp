#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fbgsole/layout.hpp"
#include "fbgsole/maps.hpp"

namespace fbgsole {

inline constexpr double kFsrActiveAreaMm2 = 126.677;  // FSR-402, r = 6.35 mm
inline constexpr double kGravityMs2 = 9.80665;
inline constexpr double kThermistorBConstantK = 4350.0;
inline constexpr double kCelsiusOffsetK = 273.15;
inline constexpr double kCalibrationMinG = 2.0;
inline constexpr double kCalibrationMaxG = 10000.0;

struct GaitScenario {
    double body_mass_kg = 70.0;
    double cadence_hz = 1.0;  // gait cycles per second
    double duration_s = 60.0;
    double sample_rate_hz = 40.0;  // interrogator rate, 1..100
    double ambient_temp_c = 24.0;  // also the sensors' calibration base
    double steady_foot_temp_c = 33.0;
    double warmup_time_constant_s = 600.0;
    std::array<double, kNumFootRegions> left_offsets_c{};   // per FootRegion
    std::array<double, kNumFootRegions> right_offsets_c{};  // per FootRegion
    double noise_rms_microstrain = 0.0;
    bool seated = false;  // pressure lobes disabled (temperature sessions)

    int frame_count() const;
    void validate() const;  // throws std::invalid_argument on bad ranges
};

/// Dense per-foot state at one instant: pressure in kPa and temperature in
/// degC over the template grid.
struct PlantarField {
    FootTemplate tmpl;
    std::vector<double> pressure_kpa;
    std::vector<double> temperature_c;
    double t_s = 0.0;
    Side side = Side::Left;
};

struct SensorSample {
    double load_gf = 0.0;
    double temp_c = 0.0;
};

struct SensorState {
    int sensor_id = 0;
    double load_gf = 0.0;
    double temp_c = 0.0;
    double strain_microstrain = 0.0;  // mechanical strain
    double reflected_nm = 0.0;
};

struct SpectrumFrame {
    std::vector<double> wavelength_nm;
    std::vector<double> amplitude;
};

struct SpectrumOptions {
    int bins = 4096;
    double fwhm_nm = 0.2;
    double peak_amplitude = 1.0;
    double noise_amplitude_rms = 0.0;
    std::uint64_t noise_seed = 0;
    bool include_reference = true;
};

/// Reflected Bragg wavelength: lambda_B * (1 + S_eps*strain*1e-6 + S_T*dT).
double bragg_wavelength(const FbgSensorSpec& sensor, double strain_microstrain, double dt_c);

/// Logarithmic pressure calibration, strain = a*ln(mass) + b. Throws
/// std::domain_error for mass <= 0; values outside [2 g, 10 kg] are
/// extrapolations (see within_calibration_range) but still computed.
double mass_to_strain(const FbgSensorSpec& sensor, double grams);

bool within_calibration_range(double grams);

/// kPa over the FSR active-area analogue -> newtons / grams-force.
double kpa_to_newtons(double kpa, double area_mm2 = kFsrActiveAreaMm2);
double kpa_to_grams_force(double kpa, double area_mm2 = kFsrActiveAreaMm2);

/// Voltage divider (FSR in the high leg): Vout = Vcc*Rext/(Rext+Rfsr).
double fsr_output_voltage(double r_fsr_ohm, double r_ext_ohm, double vcc_v);
double fsr_resistance_from_voltage(double vout_v, double r_ext_ohm, double vcc_v);

/// Single-point-anchored inverse law for the FSR: 10 kOhm at 100 g.
double fsr_resistance_from_mass(double grams);
double mass_from_fsr_resistance(double r_ohm);

/// NTC B-parameter equation, T = B / ln(R / (R0*exp(-B/T0))), kelvin in and
/// out. Throws std::domain_error when the log argument is not > 1.
double thermistor_temperature_k(double r_ohm, double b_k, double r0_ohm, double t0_k);
double thermistor_resistance_ohm(double t_k, double b_k, double r0_ohm, double t0_k);

/// ADC-count relation reproduced verbatim from the electronic-insole
/// companion design (10 kOhm external resistance only). Its constants give
/// physically implausible values over most of the ADC range; the B-parameter
/// equation above is the normative temperature model. Callers opt in via an
/// explicit flag.
double adc_to_temperature_eq4_verbatim(double adc_counts);

/// Dense pressure/temperature field for one foot at time t. Pressure is a
/// pair of body-weight-scaled raised-cosine lobes (heel over cycle phase
/// [0, 0.4], forefoot/toe over [0.3, 0.6]); temperature is a first-order
/// warmup toward the steady map plus per-region offsets. The right foot
/// runs half a cycle out of phase. Throws std::out_of_range for t outside
/// [0, duration].
PlantarField synth_gait_field(const GaitScenario& scenario, double t_s, Side side,
                              const FootTemplate& tmpl, const InsoleTemplate& insole);
PlantarField synth_gait_field(const GaitScenario& scenario, double t_s,
                              Side side = Side::Left);

/// Ideal (continuous-model) combined vGRF in grams-force at time t.
double ideal_combined_vgrf_gf(const GaitScenario& scenario, double t_s, Side side);

/// Noiseless sum of the loads the layout's pressure sensors would see at
/// time t (the waveform the decoder reconstructs as "combined").
double ideal_sensor_sum_gf(const GaitScenario& scenario, double t_s, Side side,
                           const SensorLayout& layout);

/// Ground-truth gait boundaries on the sampled ideal sensor-sum waveform:
/// heel strike = first sample at or above 5% body weight (2% hysteresis
/// release), toe off = first sample back below the release level.
/// Independent of the decoding pipeline; used as the segmentation oracle.
struct GaitTruthMarks {
    std::vector<std::size_t> heel_strikes;
    std::vector<std::size_t> toe_offs;
};
GaitTruthMarks gait_truth_marks(const GaitScenario& scenario, Side side,
                                const SensorLayout& layout);

/// Pressure load in grams-force at the cell containing p, through the
/// FSR active-area analogue. Throws std::out_of_range off the grid.
double field_load_gf_at(const PlantarField& field, const Point& p);

/// Bilinear temperature at p on the cell-center lattice, clamped at the
/// grid borders. Throws std::out_of_range off the grid.
double field_temperature_at(const PlantarField& field, const Point& p);

/// Load and temperature seen by each layout sensor (pressure at the sensor
/// cell through the active-area analogue, temperature bilinear). Throws
/// std::out_of_range when a sensor lies off the field grid.
std::vector<SensorSample> sample_at_sensors(const PlantarField& field,
                                            const SensorLayout& layout);

/// Physical state of every sensor given its sample: mechanical strain from
/// the calibration curve (clamped at the zero-load point so an unloaded
/// sensor reflects exactly its nominal wavelength), thermal shift from the
/// departure from the calibration base temperature.
std::vector<SensorState> make_sensor_states(const SensorLayout& layout,
                                            std::span<const SensorSample> samples,
                                            double calibration_base_c);

/// Sum of Gaussian reflection peaks (FWHM 0.2 nm) from every sensor state
/// plus the interrogator reference peak at the plan's reference wavelength.
SpectrumFrame synth_spectrum(const SensorLayout& layout, std::span<const SensorState> states,
                             const SpectrumOptions& options = {});

}  // namespace fbgsole
