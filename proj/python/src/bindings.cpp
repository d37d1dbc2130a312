#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fbgsole/dsp.hpp"
#include "fbgsole/gateway.hpp"
#include "fbgsole/io.hpp"
#include "fbgsole/layout.hpp"
#include "fbgsole/maps.hpp"
#include "fbgsole/physics.hpp"

namespace py = pybind11;
using namespace fbgsole;

PYBIND11_MODULE(_fbgsole, m) {
    m.doc() = "FBG smart-insole acquisition chain: layout planning, gait/spectrum "
              "simulation, wavelength telemetry, decoding and foot maps";

    // --- layout ---------------------------------------------------------
    py::enum_<SensorRole>(m, "SensorRole")
        .value("Pressure", SensorRole::Pressure)
        .value("Temperature", SensorRole::Temperature);
    py::enum_<Side>(m, "Side").value("Left", Side::Left).value("Right", Side::Right);
    py::enum_<FootRegion>(m, "FootRegion")
        .value("MedialHeel", FootRegion::MedialHeel)
        .value("LateralHeel", FootRegion::LateralHeel)
        .value("Midfoot", FootRegion::Midfoot)
        .value("MedialForefoot", FootRegion::MedialForefoot)
        .value("LateralForefoot", FootRegion::LateralForefoot)
        .value("Hallux", FootRegion::Hallux);

    py::class_<Point>(m, "Point")
        .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
        .def_readwrite("x", &Point::x)
        .def_readwrite("y", &Point::y)
        .def("__repr__", [](const Point& p) {
            return "Point(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
        });

    py::class_<FbgSensorSpec>(m, "FbgSensorSpec")
        .def(py::init<>())
        .def_readwrite("id", &FbgSensorSpec::id)
        .def_readwrite("role", &FbgSensorSpec::role)
        .def_readwrite("position_mm", &FbgSensorSpec::position_mm)
        .def_readwrite("lambda_nominal_nm", &FbgSensorSpec::lambda_nominal_nm)
        .def_readwrite("strain_sensitivity", &FbgSensorSpec::strain_sensitivity)
        .def_readwrite("temp_sensitivity", &FbgSensorSpec::temp_sensitivity)
        .def_readwrite("calib_a", &FbgSensorSpec::calib_a)
        .def_readwrite("calib_b", &FbgSensorSpec::calib_b);

    py::class_<SpectralPlan>(m, "SpectralPlan")
        .def_readonly("band_min_nm", &SpectralPlan::band_min_nm)
        .def_readonly("band_max_nm", &SpectralPlan::band_max_nm)
        .def_readonly("reference_peak_nm", &SpectralPlan::reference_peak_nm)
        .def_readonly("guard_band_nm", &SpectralPlan::guard_band_nm)
        .def_readonly("assignments_nm", &SpectralPlan::assignments_nm);

    py::class_<SensorLayout>(m, "SensorLayout")
        .def_readonly("sensors", &SensorLayout::sensors)
        .def_readonly("plan", &SensorLayout::plan)
        .def("sensor", &SensorLayout::sensor, py::return_value_policy::reference_internal)
        .def("count", &SensorLayout::count);

    py::class_<Violation>(m, "Violation")
        .def_readonly("rule", &Violation::rule)
        .def_readonly("detail", &Violation::detail)
        .def_readonly("sensor_id", &Violation::sensor_id);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("violations", &ValidationReport::violations)
        .def_readonly("min_bend_radius_mm", &ValidationReport::min_bend_radius_mm)
        .def("valid", &ValidationReport::valid);

    py::class_<HeadroomEntry>(m, "HeadroomEntry")
        .def_readonly("sensor_id", &HeadroomEntry::sensor_id)
        .def_readonly("worst_shift_nm", &HeadroomEntry::worst_shift_nm)
        .def_readonly("collision", &HeadroomEntry::collision);

    py::class_<HeadroomReport>(m, "HeadroomReport")
        .def_readonly("entries", &HeadroomReport::entries)
        .def_readonly("guard_band_nm", &HeadroomReport::guard_band_nm)
        .def("any_collision", &HeadroomReport::any_collision);

    m.def("build_default_layout", &build_default_layout);
    m.def("validate_layout", &validate_layout);
    m.def("plan_spectrum", &plan_spectrum, py::arg("n_sensors"),
          py::arg("band_min_nm") = kBandMinNm, py::arg("band_max_nm") = kBandMaxNm);
    m.def("check_spectral_headroom", &check_spectral_headroom);
    m.def("layout_to_json", &layout_to_json);
    m.def("layout_from_json", &layout_from_json);

    // --- physics ----------------------------------------------------------
    py::class_<GaitScenario>(m, "GaitScenario")
        .def(py::init<>())
        .def_readwrite("body_mass_kg", &GaitScenario::body_mass_kg)
        .def_readwrite("cadence_hz", &GaitScenario::cadence_hz)
        .def_readwrite("duration_s", &GaitScenario::duration_s)
        .def_readwrite("sample_rate_hz", &GaitScenario::sample_rate_hz)
        .def_readwrite("ambient_temp_c", &GaitScenario::ambient_temp_c)
        .def_readwrite("steady_foot_temp_c", &GaitScenario::steady_foot_temp_c)
        .def_readwrite("warmup_time_constant_s", &GaitScenario::warmup_time_constant_s)
        .def_readwrite("left_offsets_c", &GaitScenario::left_offsets_c)
        .def_readwrite("right_offsets_c", &GaitScenario::right_offsets_c)
        .def_readwrite("noise_rms_microstrain", &GaitScenario::noise_rms_microstrain)
        .def_readwrite("seated", &GaitScenario::seated)
        .def("frame_count", &GaitScenario::frame_count)
        .def("validate", &GaitScenario::validate);

    py::class_<FootTemplate>(m, "FootTemplate")
        .def_readonly("cell_mm", &FootTemplate::cell_mm)
        .def_readonly("nx", &FootTemplate::nx)
        .def_readonly("ny", &FootTemplate::ny)
        .def_readonly("mask", &FootTemplate::mask)
        .def_static("from_insole",
                    [](double cell_mm) {
                        return FootTemplate::from_insole(InsoleTemplate::standard(), cell_mm);
                    },
                    py::arg("cell_mm") = kDefaultCellMm);

    py::class_<PlantarField>(m, "PlantarField")
        .def_readonly("tmpl", &PlantarField::tmpl)
        .def_readonly("pressure_kpa", &PlantarField::pressure_kpa)
        .def_readonly("temperature_c", &PlantarField::temperature_c)
        .def_readonly("t_s", &PlantarField::t_s)
        .def_readonly("side", &PlantarField::side);

    py::class_<SensorSample>(m, "SensorSample")
        .def(py::init<>())
        .def_readwrite("load_gf", &SensorSample::load_gf)
        .def_readwrite("temp_c", &SensorSample::temp_c);

    py::class_<SensorState>(m, "SensorState")
        .def_readonly("sensor_id", &SensorState::sensor_id)
        .def_readonly("load_gf", &SensorState::load_gf)
        .def_readonly("temp_c", &SensorState::temp_c)
        .def_readonly("strain_microstrain", &SensorState::strain_microstrain)
        .def_readonly("reflected_nm", &SensorState::reflected_nm);

    py::class_<SpectrumFrame>(m, "SpectrumFrame")
        .def_readonly("wavelength_nm", &SpectrumFrame::wavelength_nm)
        .def_readonly("amplitude", &SpectrumFrame::amplitude);

    m.def("bragg_wavelength", &bragg_wavelength);
    m.def("mass_to_strain", &mass_to_strain);
    m.def("within_calibration_range", &within_calibration_range);
    m.def("kpa_to_newtons", &kpa_to_newtons, py::arg("kpa"),
          py::arg("area_mm2") = kFsrActiveAreaMm2);
    m.def("kpa_to_grams_force", &kpa_to_grams_force, py::arg("kpa"),
          py::arg("area_mm2") = kFsrActiveAreaMm2);
    m.def("fsr_output_voltage", &fsr_output_voltage);
    m.def("fsr_resistance_from_voltage", &fsr_resistance_from_voltage);
    m.def("fsr_resistance_from_mass", &fsr_resistance_from_mass);
    m.def("mass_from_fsr_resistance", &mass_from_fsr_resistance);
    m.def("thermistor_temperature_k", &thermistor_temperature_k);
    m.def("thermistor_resistance_ohm", &thermistor_resistance_ohm);
    m.def("adc_to_temperature_eq4_verbatim", &adc_to_temperature_eq4_verbatim);
    m.def("synth_gait_field",
          [](const GaitScenario& sc, double t_s, Side side) {
              return synth_gait_field(sc, t_s, side);
          },
          py::arg("scenario"), py::arg("t_s"), py::arg("side") = Side::Left);
    m.def("ideal_combined_vgrf_gf", &ideal_combined_vgrf_gf);
    m.def("sample_at_sensors", &sample_at_sensors);
    m.def("make_sensor_states",
          [](const SensorLayout& layout, const std::vector<SensorSample>& samples,
             double base_c) { return make_sensor_states(layout, samples, base_c); });
    m.def("synth_spectrum",
          [](const SensorLayout& layout, const std::vector<SensorState>& states) {
              return synth_spectrum(layout, states);
          });

    // --- dsp --------------------------------------------------------------
    py::class_<PeakEstimate>(m, "PeakEstimate")
        .def_readonly("center_nm", &PeakEstimate::center_nm)
        .def_readonly("amplitude", &PeakEstimate::amplitude)
        .def_readonly("assigned_sensor", &PeakEstimate::assigned_sensor);

    py::class_<PeakAssignment>(m, "PeakAssignment")
        .def_readonly("wavelength_by_sensor", &PeakAssignment::wavelength_by_sensor)
        .def_readonly("unassigned", &PeakAssignment::unassigned);

    py::enum_<CalibrationModel>(m, "CalibrationModel")
        .value("LogMassStrain", CalibrationModel::LogMassStrain)
        .value("LinearTempWavelength", CalibrationModel::LinearTempWavelength);

    py::class_<CalibrationFit>(m, "CalibrationFit")
        .def_readonly("model", &CalibrationFit::model)
        .def_readonly("a", &CalibrationFit::a)
        .def_readonly("b", &CalibrationFit::b)
        .def_readonly("r_squared", &CalibrationFit::r_squared);

    py::class_<GaitCycle>(m, "GaitCycle")
        .def_readonly("heel_strike", &GaitCycle::heel_strike)
        .def_readonly("toe_off", &GaitCycle::toe_off)
        .def_readonly("next_heel_strike", &GaitCycle::next_heel_strike);

    py::class_<AsymmetryReport>(m, "AsymmetryReport")
        .def_readonly("delta_t_c", &AsymmetryReport::delta_t_c)
        .def_readonly("flagged", &AsymmetryReport::flagged)
        .def_readonly("threshold_c", &AsymmetryReport::threshold_c);

    m.def("detect_peaks", &detect_peaks, py::arg("frame"), py::arg("plan"),
          py::arg("amplitude_threshold") = 0.1);
    m.def("assign_peaks",
          [](const std::vector<PeakEstimate>& peaks, const SpectralPlan& plan) {
              return assign_peaks(peaks, plan);
          });
    m.def("wavelength_to_strain", &wavelength_to_strain);
    m.def("wavelength_to_temperature_delta", &wavelength_to_temperature_delta);
    m.def("compensate", &compensate, py::arg("raw_strain_microstrain"), py::arg("t_now_c"),
          py::arg("t_ref_c"),
          py::arg("cross_microstrain_per_c") = kCrossSensitivityMicrostrainPerC);
    m.def("strain_to_mass", &strain_to_mass);
    m.def("lowpass",
          [](const std::vector<double>& series, double fc, double fs) {
              bool clamped = false;
              auto out = lowpass(series, fc, fs, &clamped);
              return py::make_tuple(out, clamped);
          },
          "Returns (filtered, clamped)");
    m.def("segment_gait",
          [](const std::vector<double>& combined, double fs, double mass) {
              return segment_gait(combined, fs, mass);
          });
    m.def("fit_calibration",
          [](const std::vector<std::pair<double, double>>& xy, CalibrationModel model) {
              std::vector<Point> points;
              points.reserve(xy.size());
              for (const auto& [x, y] : xy) points.push_back({x, y});
              return fit_calibration(points, model);
          });
    m.def("asymmetry_analysis", &asymmetry_analysis, py::arg("left"),
          py::arg("right_mirrored"), py::arg("threshold_c") = kAsymmetryThresholdC);

    // --- maps ---------------------------------------------------------------
    py::enum_<MapKind>(m, "MapKind")
        .value("Pressure", MapKind::Pressure)
        .value("Temperature", MapKind::Temperature);
    py::enum_<MapFormat>(m, "MapFormat")
        .value("CsvGrid", MapFormat::CsvGrid)
        .value("Pgm", MapFormat::Pgm);

    py::class_<FootMap>(m, "FootMap")
        .def_readonly("tmpl", &FootMap::tmpl)
        .def_readonly("values", &FootMap::values)
        .def_readonly("kind", &FootMap::kind)
        .def_readonly("unit", &FootMap::unit)
        .def_readonly("t_s", &FootMap::t_s)
        .def_readonly("side", &FootMap::side);

    m.def("interpolate_map",
          [](const std::vector<std::pair<std::pair<double, double>, double>>& samples,
             const FootTemplate& tmpl, MapKind kind) {
              std::vector<MapSample> converted;
              converted.reserve(samples.size());
              for (const auto& [pos, value] : samples) {
                  converted.push_back({{pos.first, pos.second}, value});
              }
              return interpolate_map(converted, tmpl, kind);
          },
          "samples are ((x_mm, y_mm), value) pairs");
    m.def("mirror_map", &mirror_map);
    m.def("export_map", [](const FootMap& map, MapFormat format) {
        return py::bytes(export_map(map, format));
    });
    m.def("map_pearson", &map_pearson);
    m.def("map_rmse", &map_rmse);
    m.def("map_mae", &map_mae);

    // --- gateway --------------------------------------------------------------
    py::enum_<ReadingMode>(m, "ReadingMode")
        .value("Strain", ReadingMode::Strain)
        .value("Temperature", ReadingMode::Temperature)
        .value("Compensation", ReadingMode::Compensation);

    py::class_<SensorReading>(m, "SensorReading")
        .def(py::init<>())
        .def_readwrite("sensor_id", &SensorReading::sensor_id)
        .def_readwrite("mode", &SensorReading::mode)
        .def_readwrite("value", &SensorReading::value);

    py::class_<TelemetryFrame>(m, "TelemetryFrame")
        .def(py::init<>())
        .def_readwrite("seq", &TelemetryFrame::seq)
        .def_readwrite("t_ms", &TelemetryFrame::t_ms)
        .def_readwrite("readings", &TelemetryFrame::readings)
        .def("__eq__", [](const TelemetryFrame& a, const TelemetryFrame& b) { return a == b; });

    py::enum_<ParseCode>(m, "ParseCode")
        .value("Ok", ParseCode::Ok)
        .value("BadMagic", ParseCode::BadMagic)
        .value("BadCrc", ParseCode::BadCrc)
        .value("BadFieldCount", ParseCode::BadFieldCount)
        .value("BadMode", ParseCode::BadMode)
        .value("NonFiniteInSorTMode", ParseCode::NonFiniteInSorTMode);

    py::class_<ParseError>(m, "ParseError")
        .def_readonly("code", &ParseError::code)
        .def_readonly("byte_offset", &ParseError::byte_offset)
        .def_readonly("detail", &ParseError::detail);

    py::class_<DecodeResult>(m, "DecodeResult")
        .def_readonly("frame", &DecodeResult::frame)
        .def_readonly("error", &DecodeResult::error)
        .def("ok", &DecodeResult::ok);

    py::class_<GapReport>(m, "GapReport")
        .def_readonly("missing", &GapReport::missing)
        .def_readonly("duplicates", &GapReport::duplicates)
        .def_readonly("out_of_order", &GapReport::out_of_order);

    py::class_<IngestResult>(m, "IngestResult")
        .def_readonly("frames", &IngestResult::frames)
        .def_readonly("gaps", &IngestResult::gaps)
        .def_readonly("parse_errors", &IngestResult::parse_errors);

    m.def("quantize_reading", &quantize_reading);
    m.def("encode_frame", [](const TelemetryFrame& f) { return py::bytes(encode_frame(f)); });
    m.def("decode_frame", [](const std::string& data) { return decode_frame(data); });
    m.def("ingest_datagrams",
          [](const std::vector<std::string>& datagrams, std::size_t window) {
              return ingest_datagrams(datagrams, window);
          },
          py::arg("datagrams"), py::arg("window") = 8);
    m.def("nominal_t_ms", &nominal_t_ms);
}
