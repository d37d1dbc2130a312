#include <doctest.h>

#include <cmath>
#include <random>

#include "fbgsole/dsp.hpp"
#include "fbgsole/physics.hpp"

#include <vector>

using namespace fbgsole;

namespace {

FbgSensorSpec sensor850() {
    FbgSensorSpec s;
    s.lambda_nominal_nm = 850.0;
    return s;
}

}  // namespace

TEST_CASE("bragg wavelength matches hand arithmetic") {
    const FbgSensorSpec s = sensor850();
    CHECK(bragg_wavelength(s, 0.0, 0.0) == doctest::Approx(850.0).epsilon(1e-12));
    CHECK(bragg_wavelength(s, 100.0, 0.0) == doctest::Approx(850.0663).epsilon(1e-9));
    CHECK(bragg_wavelength(s, 0.0, 1.0) == doctest::Approx(850.008710494).epsilon(1e-12));
}

TEST_CASE("bragg wavelength is affine: superposition to 1e-12 relative") {
    const FbgSensorSpec s = sensor850();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> strain(-50.0, 250.0);
    std::uniform_real_distribution<double> dt(-10.0, 30.0);
    for (int i = 0; i < 200; ++i) {
        const double e1 = strain(rng), e2 = strain(rng);
        const double t1 = dt(rng), t2 = dt(rng);
        const double both = bragg_wavelength(s, e1 + e2, t1 + t2) - s.lambda_nominal_nm;
        const double parts = (bragg_wavelength(s, e1, t1) - s.lambda_nominal_nm) +
                             (bragg_wavelength(s, e2, t2) - s.lambda_nominal_nm);
        CHECK(both == doctest::Approx(parts).epsilon(1e-12));
    }
}

TEST_CASE("mass_to_strain reproduces the log calibration") {
    const FbgSensorSpec s = sensor850();
    CHECK(mass_to_strain(s, 100.0) == doctest::Approx(64.945738).epsilon(1e-6));
    CHECK(mass_to_strain(s, 1000.0) == doctest::Approx(126.823108).epsilon(1e-6));
    CHECK_THROWS_AS(mass_to_strain(s, 0.0), std::domain_error);
    CHECK_THROWS_AS(mass_to_strain(s, -5.0), std::domain_error);
    // out of range still computes, just flagged
    CHECK(!within_calibration_range(1.0));
    CHECK(!within_calibration_range(20000.0));
    CHECK(within_calibration_range(2.0));
    CHECK(within_calibration_range(10000.0));
    CHECK(std::isfinite(mass_to_strain(s, 1.0)));
}

TEST_CASE("13.138 microstrain corresponds to roughly 15 g") {
    const FbgSensorSpec s = sensor850();
    const double mass = strain_to_mass(s, 13.138);
    CHECK(mass == doctest::Approx(14.5457).epsilon(1e-4));
    CHECK(std::abs(mass - 15.0) < 1.0);
}

TEST_CASE("mass -> strain -> mass is the identity over the calibration range") {
    const FbgSensorSpec s = sensor850();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> log_mass(std::log(2.0), std::log(10000.0));
    for (int i = 0; i < 500; ++i) {
        const double g = std::exp(log_mass(rng));
        const double back = strain_to_mass(s, mass_to_strain(s, g));
        CHECK(back == doctest::Approx(g).epsilon(1e-9));
    }
}

TEST_CASE("pressure over the FSR active area reproduces the 10N and 76N anchors") {
    CHECK(kpa_to_newtons(80.0) == doctest::Approx(10.13416).epsilon(1e-6));
    CHECK(kpa_to_newtons(600.0) == doctest::Approx(76.0062).epsilon(1e-6));
    CHECK(kpa_to_grams_force(80.0) == doctest::Approx(1033.397).epsilon(1e-4));
    CHECK(kpa_to_grams_force(0.0) == doctest::Approx(0.0));
}

TEST_CASE("FSR divider matches the 10k at 100 g anchor") {
    CHECK(fsr_output_voltage(10000.0, 1000.0, 3.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(fsr_output_voltage(1000.0, 1000.0, 3.3) == doctest::Approx(1.65));
    CHECK_THROWS_AS(fsr_output_voltage(-1.0, 1000.0, 3.3), std::domain_error);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> r_fsr(100.0, 1e6);
    for (int i = 0; i < 200; ++i) {
        const double r = r_fsr(rng);
        const double v = fsr_output_voltage(r, 1000.0, 3.3);
        CHECK(fsr_resistance_from_voltage(v, 1000.0, 3.3) ==
              doctest::Approx(r).epsilon(1e-12));
    }
    CHECK(fsr_resistance_from_mass(100.0) == doctest::Approx(10000.0));
    CHECK(mass_from_fsr_resistance(10000.0) == doctest::Approx(100.0));
}

TEST_CASE("thermistor B-parameter equation") {
    CHECK(thermistor_temperature_k(10000.0, 4350.0, 10000.0, 298.15) ==
          doctest::Approx(298.15).epsilon(1e-12));
    CHECK(thermistor_temperature_k(5000.0, 4350.0, 10000.0, 298.15) ==
          doctest::Approx(313.02116).epsilon(1e-6));
    // log argument at or below 1 is outside the model
    const double r_singular = 10000.0 * std::exp(-4350.0 / 298.15);
    CHECK_THROWS_AS(thermistor_temperature_k(r_singular, 4350.0, 10000.0, 298.15),
                    std::domain_error);
}

TEST_CASE("thermistor resistance/temperature round trip") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> temp_k(278.15, 330.15);
    for (int i = 0; i < 200; ++i) {
        const double t = temp_k(rng);
        const double r = thermistor_resistance_ohm(t, 4350.0, 10000.0, 298.15);
        CHECK(thermistor_temperature_k(r, 4350.0, 10000.0, 298.15) ==
              doctest::Approx(t).epsilon(1e-12));
    }
}

TEST_CASE("verbatim ADC relation reproduces its own outputs, warts and all") {
    CHECK(adc_to_temperature_eq4_verbatim(4092.0) == doctest::Approx(23.0799).epsilon(1e-4));
    CHECK(adc_to_temperature_eq4_verbatim(2047.5) ==
          doctest::Approx(-127.2988).epsilon(1e-4));
    CHECK_THROWS_AS(adc_to_temperature_eq4_verbatim(4095.0), std::domain_error);
    CHECK_THROWS_AS(adc_to_temperature_eq4_verbatim(0.0), std::domain_error);
    CHECK_THROWS_AS(adc_to_temperature_eq4_verbatim(5000.0), std::domain_error);
}

TEST_CASE("gait field: swing phase carries zero pressure") {
    GaitScenario sc;
    sc.duration_s = 10.0;
    // phase 0.8 of the first cycle at 1 Hz cadence
    const PlantarField field = synth_gait_field(sc, 0.8, Side::Left);
    for (double p : field.pressure_kpa) CHECK(p == doctest::Approx(0.0));
}

TEST_CASE("gait field: t=0 temperature is ambient plus offsets") {
    GaitScenario sc;
    sc.duration_s = 10.0;
    sc.ambient_temp_c = 24.0;
    sc.left_offsets_c[static_cast<int>(FootRegion::MedialHeel)] = 3.0;
    const PlantarField field = synth_gait_field(sc, 0.0, Side::Left);
    const InsoleTemplate insole = InsoleTemplate::standard();
    for (int ix = 0; ix < field.tmpl.nx; ++ix) {
        for (int iy = 0; iy < field.tmpl.ny; ++iy) {
            const Point c = field.tmpl.cell_center(ix, iy);
            const double expected =
                foot_region_of(c, insole) == FootRegion::MedialHeel ? 27.0 : 24.0;
            CHECK(field.temperature_c[field.tmpl.index(ix, iy)] ==
                  doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("gait field: by ten time constants the map reaches the steady temperature") {
    GaitScenario sc;
    sc.warmup_time_constant_s = 30.0;
    sc.duration_s = 400.0;
    sc.ambient_temp_c = 24.0;
    sc.steady_foot_temp_c = 33.0;
    const PlantarField field = synth_gait_field(sc, 300.0, Side::Left);
    for (double t : field.temperature_c) {
        CHECK(std::abs(t - 33.0) < 0.01);
    }
    // and it rose monotonically along the way
    const PlantarField early = synth_gait_field(sc, 10.0, Side::Left);
    CHECK(early.temperature_c[0] < field.temperature_c[0]);
}

TEST_CASE("gait field: out-of-range time is rejected") {
    GaitScenario sc;
    sc.duration_s = 5.0;
    CHECK_THROWS_AS(synth_gait_field(sc, 6.0, Side::Left), std::out_of_range);
    CHECK_THROWS_AS(synth_gait_field(sc, -0.5, Side::Left), std::out_of_range);
}

TEST_CASE("gait field: peak cell pressure stays within 80..600 kPa for 50..100 kg") {
    for (double mass : {50.0, 70.0, 85.0, 100.0}) {
        GaitScenario sc;
        sc.body_mass_kg = mass;
        sc.duration_s = 2.0;
        double peak = 0.0;
        // scan one full cycle
        for (int k = 0; k < 40; ++k) {
            const PlantarField field = synth_gait_field(sc, k / 40.0, Side::Left);
            for (double p : field.pressure_kpa) peak = std::max(peak, p);
        }
        CHECK(peak >= 80.0);
        CHECK(peak <= 600.0);
    }
}

TEST_CASE("gait field integral conserves body weight at the lobe peaks") {
    GaitScenario sc;
    sc.body_mass_kg = 70.0;
    sc.duration_s = 2.0;
    const double weight_n = 70.0 * kGravityMs2;
    // heel lobe peak (phase 0.2) and forefoot lobe peak (phase 0.45)
    for (double phase : {0.2, 0.45}) {
        const PlantarField field = synth_gait_field(sc, phase, Side::Left);
        double force_n = 0.0;
        const double cell_area_mm2 = field.tmpl.cell_mm * field.tmpl.cell_mm;
        for (double p : field.pressure_kpa) force_n += p * 1e-3 * cell_area_mm2;
        CHECK(force_n == doctest::Approx(weight_n).epsilon(0.10));
    }
}

TEST_CASE("right foot runs half a cycle out of phase") {
    GaitScenario sc;
    sc.duration_s = 2.0;
    const double left = ideal_combined_vgrf_gf(sc, 0.2, Side::Left);
    const double right = ideal_combined_vgrf_gf(sc, 0.7, Side::Right);
    CHECK(left == doctest::Approx(right).epsilon(1e-9));
}

TEST_CASE("sampling a zero field reads zero load everywhere") {
    GaitScenario sc;
    sc.duration_s = 10.0;
    sc.seated = true;
    const SensorLayout layout = build_default_layout();
    const PlantarField field = synth_gait_field(sc, 1.0, Side::Left);
    const auto samples = sample_at_sensors(field, layout);
    REQUIRE(samples.size() == layout.sensors.size());
    for (const auto& s : samples) CHECK(s.load_gf == doctest::Approx(0.0));
}

TEST_CASE("sampling rejects sensors off the grid") {
    GaitScenario sc;
    sc.duration_s = 1.0;
    SensorLayout layout = build_default_layout();
    layout.sensors[0].position_mm = {400.0, 40.0};
    const PlantarField field = synth_gait_field(sc, 0.5, Side::Left);
    CHECK_THROWS_AS(sample_at_sensors(field, layout), std::out_of_range);
}

TEST_CASE("unperturbed spectrum has one peak per sensor plus the reference") {
    const SensorLayout layout = build_default_layout();
    std::vector<SensorSample> samples(layout.sensors.size(), SensorSample{0.0, 24.0});
    const auto states = make_sensor_states(layout, samples, 24.0);
    for (const auto& st : states) {
        CHECK(st.strain_microstrain == doctest::Approx(0.0));
        CHECK(st.reflected_nm ==
              doctest::Approx(layout.sensor(st.sensor_id).lambda_nominal_nm).epsilon(1e-12));
    }
    const SpectrumFrame frame = synth_spectrum(layout, states);
    const auto peaks = detect_peaks(frame, layout.plan);
    CHECK(peaks.size() == 20);  // reference found and stripped
}

TEST_CASE("empty sensor list leaves only the reference peak") {
    const SensorLayout layout = build_default_layout();
    const SpectrumFrame frame = synth_spectrum(layout, {});
    int maxima = 0;
    for (std::size_t i = 1; i + 1 < frame.amplitude.size(); ++i) {
        if (frame.amplitude[i] > frame.amplitude[i - 1] &&
            frame.amplitude[i] >= frame.amplitude[i + 1] && frame.amplitude[i] > 0.1) {
            ++maxima;
        }
    }
    // the reference sits on the first bin; interior maxima are zero
    CHECK(maxima == 0);
    CHECK(frame.amplitude[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("a strained sensor displaces exactly one peak by the bragg shift") {
    const SensorLayout layout = build_default_layout();
    std::vector<SensorSample> samples(layout.sensors.size(), SensorSample{0.0, 24.0});
    auto states = make_sensor_states(layout, samples, 24.0);
    const int probe = 8;
    states[probe].strain_microstrain = 100.0;
    states[probe].reflected_nm = bragg_wavelength(layout.sensor(probe), 100.0, 0.0);

    const SpectrumFrame frame = synth_spectrum(layout, states);
    const auto peaks = detect_peaks(frame, layout.plan);
    REQUIRE(peaks.size() == 20);
    int displaced = 0;
    for (const auto& p : peaks) {
        double nearest = 1e9;
        for (double nominal : layout.plan.assignments_nm) {
            nearest = std::min(nearest, std::abs(p.center_nm - nominal));
        }
        if (nearest > 1e-4) {
            ++displaced;
            const double expected =
                layout.sensor(probe).lambda_nominal_nm * (1.0 + 0.78 * 100e-6);
            CHECK(p.center_nm == doctest::Approx(expected).epsilon(1e-9));
        }
    }
    CHECK(displaced == 1);
}

TEST_CASE("gait truth marks give one stance per cycle") {
    GaitScenario sc;
    sc.duration_s = 10.0;
    sc.cadence_hz = 1.0;
    sc.sample_rate_hz = 40.0;
    const SensorLayout layout = build_default_layout();
    const GaitTruthMarks marks = gait_truth_marks(sc, Side::Left, layout);
    CHECK(marks.heel_strikes.size() == 10);
    CHECK(marks.toe_offs.size() == 10);
    for (std::size_t i = 0; i < marks.toe_offs.size(); ++i) {
        CHECK(marks.toe_offs[i] > marks.heel_strikes[i]);
    }
}

TEST_CASE("spectrum noise is seed-deterministic and survives detection") {
    const SensorLayout layout = build_default_layout();
    std::vector<SensorSample> samples(layout.sensors.size(), SensorSample{0.0, 24.0});
    const auto states = make_sensor_states(layout, samples, 24.0);
    SpectrumOptions options;
    options.noise_amplitude_rms = 0.01;
    options.noise_seed = 99;
    const SpectrumFrame a = synth_spectrum(layout, states, options);
    const SpectrumFrame b = synth_spectrum(layout, states, options);
    CHECK(a.amplitude == b.amplitude);
    options.noise_seed = 100;
    const SpectrumFrame c = synth_spectrum(layout, states, options);
    CHECK(a.amplitude != c.amplitude);
    // 1% amplitude noise does not break peak counting
    const auto peaks = detect_peaks(a, layout.plan);
    CHECK(peaks.size() == 20);
}

TEST_CASE("scenario validation rejects out-of-range rates") {
    GaitScenario sc;
    sc.sample_rate_hz = 0.5;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc.sample_rate_hz = 101.0;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc.sample_rate_hz = 100.0;
    CHECK_NOTHROW(sc.validate());
}
