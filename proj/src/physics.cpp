#include "fbgsole/physics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fbgsole/util.hpp"

namespace fbgsole {

namespace {

constexpr double kPi = std::numbers::pi;

// Integral of the raised-cosine bump 0.5*(1+cos(pi*r/R)) over its disc is
// this factor times R^2.
constexpr double kRaisedCosineAreaFactor = kPi / 2.0 - 2.0 / kPi;

// Lobe geometry as fractions of the template length; width centered.
constexpr double kHeelCenterFrac = 50.0 / 259.0;
constexpr double kForefootCenterFrac = 182.0 / 259.0;
constexpr double kHeelRadiusFrac = 45.0 / 259.0;
constexpr double kForefootRadiusFrac = 50.0 / 259.0;

constexpr double kMaxCellPressureKpa = 600.0;

// Temporal activation of the two lobes over the gait cycle.
double heel_weight(double u) {
    if (u < 0.0 || u > 0.4) return 0.0;
    return 0.5 * (1.0 - std::cos(2.0 * kPi * u / 0.4));
}

double forefoot_weight(double u) {
    if (u < 0.3 || u > 0.6) return 0.0;
    return 0.5 * (1.0 - std::cos(2.0 * kPi * (u - 0.3) / 0.3));
}

double cycle_phase(const GaitScenario& sc, double t_s, Side side) {
    const double shift = side == Side::Right ? 0.5 : 0.0;
    double u = std::fmod(t_s * sc.cadence_hz + shift, 1.0);
    if (u < 0.0) u += 1.0;
    return u;
}

double lobe_pressure_kpa(double weight_n, double temporal, double r_mm, double radius_mm) {
    if (temporal <= 0.0 || r_mm >= radius_mm) return 0.0;
    const double center_kpa =
        weight_n * temporal / (kRaisedCosineAreaFactor * radius_mm * radius_mm * 1e-3);
    return center_kpa * 0.5 * (1.0 + std::cos(kPi * r_mm / radius_mm));
}

}  // namespace

int GaitScenario::frame_count() const {
    return static_cast<int>(std::floor(duration_s * sample_rate_hz));
}

void GaitScenario::validate() const {
    if (sample_rate_hz < 1.0 || sample_rate_hz > 100.0) {
        throw std::invalid_argument(
            strf("sample rate %.1f Hz outside the interrogator's 1-100 Hz range",
                 sample_rate_hz));
    }
    if (duration_s < 0.0) throw std::invalid_argument("duration must be >= 0");
    if (cadence_hz <= 0.0) throw std::invalid_argument("cadence must be > 0");
    if (body_mass_kg <= 0.0) throw std::invalid_argument("body mass must be > 0");
}

double bragg_wavelength(const FbgSensorSpec& sensor, double strain_microstrain, double dt_c) {
    return sensor.lambda_nominal_nm *
           (1.0 + sensor.strain_sensitivity * strain_microstrain * 1e-6 +
            sensor.temp_sensitivity * dt_c);
}

double mass_to_strain(const FbgSensorSpec& sensor, double grams) {
    if (grams <= 0.0) {
        throw std::domain_error("mass must be > 0 for the logarithmic calibration");
    }
    return sensor.calib_a * std::log(grams) + sensor.calib_b;
}

bool within_calibration_range(double grams) {
    return grams >= kCalibrationMinG && grams <= kCalibrationMaxG;
}

double kpa_to_newtons(double kpa, double area_mm2) {
    return kpa * 1e-3 * area_mm2;  // kPa * mm^2 -> N via 1 kPa = 1e-3 N/mm^2
}

double kpa_to_grams_force(double kpa, double area_mm2) {
    return kpa_to_newtons(kpa, area_mm2) / kGravityMs2 * 1000.0;
}

double fsr_output_voltage(double r_fsr_ohm, double r_ext_ohm, double vcc_v) {
    if (r_fsr_ohm <= 0.0 || r_ext_ohm <= 0.0) {
        throw std::domain_error("divider resistances must be positive");
    }
    return vcc_v * r_ext_ohm / (r_ext_ohm + r_fsr_ohm);
}

double fsr_resistance_from_voltage(double vout_v, double r_ext_ohm, double vcc_v) {
    if (vout_v <= 0.0 || r_ext_ohm <= 0.0) {
        throw std::domain_error("output voltage and external resistance must be positive");
    }
    return r_ext_ohm * (vcc_v - vout_v) / vout_v;
}

double fsr_resistance_from_mass(double grams) {
    if (grams <= 0.0) throw std::domain_error("mass must be > 0");
    return 10000.0 * (100.0 / grams);
}

double mass_from_fsr_resistance(double r_ohm) {
    if (r_ohm <= 0.0) throw std::domain_error("resistance must be > 0");
    return 100.0 * (10000.0 / r_ohm);
}

double thermistor_temperature_k(double r_ohm, double b_k, double r0_ohm, double t0_k) {
    if (r_ohm <= 0.0 || b_k <= 0.0 || r0_ohm <= 0.0 || t0_k <= 0.0) {
        throw std::domain_error("thermistor arguments must be positive");
    }
    const double arg = r_ohm / (r0_ohm * std::exp(-b_k / t0_k));
    if (arg <= 1.0) {
        throw std::domain_error("resistance outside the B-parameter model's domain");
    }
    return b_k / std::log(arg);
}

double thermistor_resistance_ohm(double t_k, double b_k, double r0_ohm, double t0_k) {
    if (t_k <= 0.0) throw std::domain_error("temperature must be > 0 K");
    return r0_ohm * std::exp(-b_k / t0_k) * std::exp(b_k / t_k);
}

double adc_to_temperature_eq4_verbatim(double adc_counts) {
    const double numerator = 40950000.0 - 10000.0 * adc_counts;
    if (adc_counts <= 0.0 || numerator <= 0.0) {
        throw std::domain_error("ADC reading outside (0, 4095)");
    }
    return (std::log(numerator / adc_counts) - 3.10) / -0.048;
}

PlantarField synth_gait_field(const GaitScenario& scenario, double t_s, Side side,
                              const FootTemplate& tmpl, const InsoleTemplate& insole) {
    if (t_s < 0.0 || t_s > scenario.duration_s) {
        throw std::out_of_range(strf("t=%.3f s outside [0, %.3f]", t_s, scenario.duration_s));
    }

    PlantarField field;
    field.tmpl = tmpl;
    field.t_s = t_s;
    field.side = side;
    field.pressure_kpa.assign(tmpl.size(), 0.0);
    field.temperature_c.assign(tmpl.size(), 0.0);

    const double u = cycle_phase(scenario, t_s, side);
    const double w_heel = scenario.seated ? 0.0 : heel_weight(u);
    const double w_fore = scenario.seated ? 0.0 : forefoot_weight(u);
    const double weight_n = scenario.body_mass_kg * kGravityMs2;

    const Point heel_center{kHeelCenterFrac * insole.length_mm, insole.width_mm / 2.0};
    const Point fore_center{kForefootCenterFrac * insole.length_mm, insole.width_mm / 2.0};
    const double heel_r = kHeelRadiusFrac * insole.length_mm;
    const double fore_r = kForefootRadiusFrac * insole.length_mm;

    const double warmed =
        1.0 - std::exp(-t_s / std::max(scenario.warmup_time_constant_s, 1e-9));
    const double base_t =
        scenario.ambient_temp_c + (scenario.steady_foot_temp_c - scenario.ambient_temp_c) * warmed;
    const auto& offsets =
        side == Side::Left ? scenario.left_offsets_c : scenario.right_offsets_c;

    for (int ix = 0; ix < tmpl.nx; ++ix) {
        for (int iy = 0; iy < tmpl.ny; ++iy) {
            const std::size_t i = tmpl.index(ix, iy);
            const Point c = tmpl.cell_center(ix, iy);
            if (tmpl.masked(ix, iy)) {
                double p = lobe_pressure_kpa(weight_n, w_heel, distance(c, heel_center), heel_r) +
                           lobe_pressure_kpa(weight_n, w_fore, distance(c, fore_center), fore_r);
                field.pressure_kpa[i] = std::min(p, kMaxCellPressureKpa);
            }
            field.temperature_c[i] =
                base_t + offsets[static_cast<int>(foot_region_of(c, insole))];
        }
    }
    return field;
}

PlantarField synth_gait_field(const GaitScenario& scenario, double t_s, Side side) {
    const InsoleTemplate insole = InsoleTemplate::standard();
    return synth_gait_field(scenario, t_s, side, FootTemplate::from_insole(insole), insole);
}

double ideal_combined_vgrf_gf(const GaitScenario& scenario, double t_s, Side side) {
    if (scenario.seated) return 0.0;
    const double u = cycle_phase(scenario, t_s, side);
    return (heel_weight(u) + forefoot_weight(u)) * scenario.body_mass_kg * 1000.0;
}

double ideal_sensor_sum_gf(const GaitScenario& scenario, double t_s, Side side,
                           const SensorLayout& layout) {
    const PlantarField field = synth_gait_field(
        scenario, t_s, side, FootTemplate::from_insole(layout.insole), layout.insole);
    double sum = 0.0;
    for (const auto& sensor : layout.sensors) {
        if (sensor.role == SensorRole::Pressure) {
            sum += field_load_gf_at(field, sensor.position_mm);
        }
    }
    return sum;
}

GaitTruthMarks gait_truth_marks(const GaitScenario& scenario, Side side,
                                const SensorLayout& layout) {
    GaitTruthMarks marks;
    const double body_gf = scenario.body_mass_kg * 1000.0;
    const double thr_hi = 0.05 * body_gf;
    const double thr_lo = 0.03 * body_gf;
    const int n = scenario.frame_count();
    bool stance = false;
    for (int k = 0; k < n; ++k) {
        const double v =
            ideal_sensor_sum_gf(scenario, k / scenario.sample_rate_hz, side, layout);
        if (!stance && v >= thr_hi) {
            stance = true;
            marks.heel_strikes.push_back(static_cast<std::size_t>(k));
        } else if (stance && v < thr_lo) {
            stance = false;
            marks.toe_offs.push_back(static_cast<std::size_t>(k));
        }
    }
    return marks;
}

double field_load_gf_at(const PlantarField& field, const Point& p) {
    const auto cell = field.tmpl.cell_of(p);
    if (!cell) {
        throw std::out_of_range(strf("position (%.1f, %.1f) outside the field grid", p.x, p.y));
    }
    return kpa_to_grams_force(field.pressure_kpa[field.tmpl.index(cell->first, cell->second)]);
}

double field_temperature_at(const PlantarField& field, const Point& p) {
    const FootTemplate& t = field.tmpl;
    if (!t.cell_of(p)) {
        throw std::out_of_range(strf("position (%.1f, %.1f) outside the field grid", p.x, p.y));
    }
    // Bilinear interpolation on the cell-center lattice, clamped at borders.
    const double gx = std::clamp(p.x / t.cell_mm - 0.5, 0.0, static_cast<double>(t.nx - 1));
    const double gy = std::clamp(p.y / t.cell_mm - 0.5, 0.0, static_cast<double>(t.ny - 1));
    const int x0 = std::min(static_cast<int>(gx), t.nx >= 2 ? t.nx - 2 : 0);
    const int y0 = std::min(static_cast<int>(gy), t.ny >= 2 ? t.ny - 2 : 0);
    const double fx = gx - x0;
    const double fy = gy - y0;
    const auto T = [&](int ix, int iy) { return field.temperature_c[t.index(ix, iy)]; };
    return (1 - fx) * (1 - fy) * T(x0, y0) + fx * (1 - fy) * T(x0 + 1, y0) +
           (1 - fx) * fy * T(x0, y0 + 1) + fx * fy * T(x0 + 1, y0 + 1);
}

std::vector<SensorSample> sample_at_sensors(const PlantarField& field,
                                            const SensorLayout& layout) {
    std::vector<SensorSample> out;
    out.reserve(layout.sensors.size());
    for (const auto& sensor : layout.sensors) {
        try {
            out.push_back({field_load_gf_at(field, sensor.position_mm),
                           field_temperature_at(field, sensor.position_mm)});
        } catch (const std::out_of_range&) {
            throw std::out_of_range(
                strf("sensor %d position outside the field grid", sensor.id));
        }
    }
    return out;
}

std::vector<SensorState> make_sensor_states(const SensorLayout& layout,
                                            std::span<const SensorSample> samples,
                                            double calibration_base_c) {
    if (samples.size() != layout.sensors.size()) {
        throw std::invalid_argument("one sample per layout sensor required");
    }
    std::vector<SensorState> states;
    states.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const FbgSensorSpec& sensor = layout.sensors[i];
        const SensorSample& sample = samples[i];
        SensorState st;
        st.sensor_id = sensor.id;
        st.load_gf = sample.load_gf;
        st.temp_c = sample.temp_c;
        if (sensor.role == SensorRole::Pressure && sample.load_gf > 0.0) {
            // The log curve crosses zero strain at ~8.9 g; below that an
            // unloaded grating sits at its nominal wavelength.
            st.strain_microstrain = std::max(0.0, mass_to_strain(sensor, sample.load_gf));
        }
        st.reflected_nm =
            bragg_wavelength(sensor, st.strain_microstrain, sample.temp_c - calibration_base_c);
        states.push_back(st);
    }
    return states;
}

SpectrumFrame synth_spectrum(const SensorLayout& layout, std::span<const SensorState> states,
                             const SpectrumOptions& options) {
    const SpectralPlan& plan = layout.plan;
    SpectrumFrame frame;
    frame.wavelength_nm.resize(options.bins);
    frame.amplitude.assign(options.bins, 0.0);
    const double lo = plan.band_min_nm;
    const double step = (plan.band_max_nm - plan.band_min_nm) / (options.bins - 1);
    for (int i = 0; i < options.bins; ++i) {
        frame.wavelength_nm[i] = lo + i * step;
    }

    const double sigma2 = options.fwhm_nm * options.fwhm_nm / (8.0 * std::log(2.0));
    const double reach = 4.0 * options.fwhm_nm;  // beyond this the peak is ~1e-29
    const auto add_peak = [&](double center) {
        const int first = std::max(0, static_cast<int>((center - reach - lo) / step));
        const int last = std::min(options.bins - 1,
                                  static_cast<int>((center + reach - lo) / step) + 1);
        for (int i = first; i <= last; ++i) {
            const double d = frame.wavelength_nm[i] - center;
            frame.amplitude[i] += options.peak_amplitude * std::exp(-d * d / (2.0 * sigma2));
        }
    };

    if (options.include_reference) add_peak(plan.reference_peak_nm);
    for (const auto& st : states) add_peak(st.reflected_nm);

    if (options.noise_amplitude_rms > 0.0) {
        std::mt19937_64 rng(options.noise_seed);
        std::normal_distribution<double> noise(0.0, options.noise_amplitude_rms);
        for (auto& a : frame.amplitude) a += noise(rng);
    }
    return frame;
}

}  // namespace fbgsole
