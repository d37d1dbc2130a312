#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbgsole/geometry.hpp"

namespace fbgsole {

// Cross-sensitivity of the strain reading to temperature, in microstrain
// per degree Celsius. The default sensitivities below are chosen so that
// temp_sensitivity / strain_sensitivity reproduces this number exactly.
inline constexpr double kCrossSensitivityMicrostrainPerC = 13.138;
inline constexpr double kDefaultStrainSensitivity = 0.78;           // per unit strain
inline constexpr double kDefaultTempSensitivity =
    kDefaultStrainSensitivity * kCrossSensitivityMicrostrainPerC * 1e-6;  // per degC

inline constexpr double kBandMinNm = 808.0;
inline constexpr double kBandMaxNm = 880.0;
inline constexpr int kMaxSensorsPerFiber = 30;
inline constexpr double kMinBendRadiusMm = 10.0;

inline constexpr double kLogCalibSlope = 26.873;       // microstrain per ln(gram)
inline constexpr double kLogCalibIntercept = -58.809;  // microstrain

enum class SensorRole { Pressure, Temperature };

enum class Side { Left, Right };

/// Six-region foot partition used for temperature offsets and asymmetry
/// analysis. Regions are template-relative rectangles (heel at x=0).
enum class FootRegion {
    MedialHeel = 0,
    LateralHeel = 1,
    Midfoot = 2,
    MedialForefoot = 3,
    LateralForefoot = 4,
    Hallux = 5,
};
inline constexpr int kNumFootRegions = 6;

const char* foot_region_name(FootRegion r);

struct InsoleTemplate {
    double length_mm = 259.0;
    double width_mm = 88.0;
    std::vector<Point> outline;  // closed polygon, heel at origin, toe toward +x

    bool contains(const Point& p) const { return point_in_polygon(p, outline); }

    /// EU-42 template: 259 x 88 mm with chamfered corners, symmetric about
    /// the long axis so mirrored maps share the mask.
    static InsoleTemplate standard();
};

/// Partition rectangle for one region of the given template.
Rect foot_region_rect(FootRegion region, const InsoleTemplate& tmpl);

/// Region containing a template-space point.
FootRegion foot_region_of(const Point& p, const InsoleTemplate& tmpl);

struct FbgSensorSpec {
    int id = 0;  // 0 = nearest the guard
    SensorRole role = SensorRole::Pressure;
    Point position_mm;
    double lambda_nominal_nm = 850.0;
    double strain_sensitivity = kDefaultStrainSensitivity;  // S_eps, per unit strain
    double temp_sensitivity = kDefaultTempSensitivity;      // S_T, per degC
    double calib_a = kLogCalibSlope;
    double calib_b = kLogCalibIntercept;
};

struct FiberPath {
    std::vector<Point> polyline_mm;
    double guard_length_mm = 400.0;
    double total_length_mm = 0.0;

    double on_insole_length_mm() const { return polyline_length(polyline_mm); }
};

struct SpectralPlan {
    double band_min_nm = kBandMinNm;
    double band_max_nm = kBandMaxNm;
    double reference_peak_nm = kBandMinNm;  // isolated interrogator marker
    double guard_band_nm = 0.0;
    std::vector<double> assignments_nm;  // index = sensor id
};

struct SensorLayout {
    InsoleTemplate insole;
    FiberPath fiber;
    SpectralPlan plan;
    std::vector<FbgSensorSpec> sensors;

    const FbgSensorSpec& sensor(int id) const;
    int count(SensorRole role) const;
};

struct Violation {
    std::string rule;
    std::string detail;
    int sensor_id = -1;  // -1 when not sensor-specific
};

struct ValidationReport {
    std::vector<Violation> violations;
    double min_bend_radius_mm = 0.0;

    bool valid() const { return violations.empty(); }
};

struct HeadroomEntry {
    int sensor_id = 0;
    double worst_shift_nm = 0.0;
    bool collision = false;
};

struct HeadroomReport {
    std::vector<HeadroomEntry> entries;
    double guard_band_nm = 0.0;

    bool any_collision() const;
};

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 20-sensor layout (15 pressure + 5 temperature, temperature ids
/// {6,10,13,16,17}) on a serpentine fiber with 400 mm guard; pressure
/// sensors denser near heel and toe.
SensorLayout build_default_layout();

/// Checks manufacturer constraints: bend radius >= 10 mm, sensor count
/// <= 30, positions inside the outline, fiber length consistency, unique
/// ids. Violations are data, not failures.
ValidationReport validate_layout(const SensorLayout& layout);

/// Equidistant wavelength assignments over [band_min + offset, band_max]
/// with the reference peak at band_min. The offset is the smallest whole
/// nanometre that keeps the reference at least two guard bands away from
/// the first assignment. Throws CapacityError for more than 30 sensors.
SpectralPlan plan_spectrum(int n_sensors, double band_min_nm = kBandMinNm,
                           double band_max_nm = kBandMaxNm);

/// Worst-case |d lambda| per sensor for the given perturbation envelope;
/// flags sensors whose excursion exceeds the plan's guard band.
HeadroomReport check_spectral_headroom(const SpectralPlan& plan, const SensorLayout& layout,
                                       double max_strain_microstrain, double max_dt_c);

}  // namespace fbgsole
