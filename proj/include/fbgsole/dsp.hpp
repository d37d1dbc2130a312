#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "fbgsole/layout.hpp"
#include "fbgsole/maps.hpp"
#include "fbgsole/physics.hpp"

namespace fbgsole {

inline constexpr double kAsymmetryThresholdC = 2.22;  // 4 degF
inline constexpr double kStanceThresholdFrac = 0.05;  // of body weight
inline constexpr double kStanceHysteresisFrac = 0.02;
inline constexpr double kMinStanceS = 0.2;

struct InterrogatorAbsentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AmbiguityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PeakEstimate {
    double center_nm = 0.0;
    double amplitude = 0.0;
    int assigned_sensor = -1;  // -1 = unassigned
};

/// Local maxima above the amplitude threshold, refined by a three-point
/// parabola on log amplitude (exact for Gaussian profiles). The reference
/// peak is identified and removed from the returned list; if it is missing
/// the interrogator is assumed absent and InterrogatorAbsentError is thrown.
std::vector<PeakEstimate> detect_peaks(const SpectrumFrame& frame, const SpectralPlan& plan,
                                       double amplitude_threshold = 0.1);

struct PeakAssignment {
    std::map<int, double> wavelength_by_sensor;
    std::vector<PeakEstimate> unassigned;
};

/// Nearest-nominal assignment within the guard band. Two peaks claiming
/// one sensor raise AmbiguityError naming the sensor.
PeakAssignment assign_peaks(std::span<const PeakEstimate> peaks, const SpectralPlan& plan);

/// Inverse of the strain term of the Bragg relation (thermal part left to
/// compensate()).
double wavelength_to_strain(const FbgSensorSpec& sensor, double lambda_nm);

/// Temperature change from a temperature-mode sensor's wavelength.
double wavelength_to_temperature_delta(const FbgSensorSpec& sensor, double lambda_nm);

/// Removes the thermal cross-sensitivity from a raw strain reading.
double compensate(double raw_strain_microstrain, double t_now_c, double t_ref_c,
                  double cross_microstrain_per_c = kCrossSensitivityMicrostrainPerC);

/// Inverse log calibration, mass = exp((strain - b)/a).
double strain_to_mass(const FbgSensorSpec& sensor, double strain_microstrain);

/// First-order Butterworth low-pass (bilinear transform with prewarped
/// cutoff, DC gain exactly 1, zero-initialized state). Cutoffs at or above
/// Nyquist are clamped to 0.45*fs and flagged.
class ButterworthLowpass {
public:
    ButterworthLowpass(double fc_hz, double fs_hz);

    double step(double x);
    void reset();

    bool clamped() const { return clamped_; }
    double effective_fc_hz() const { return fc_hz_; }

private:
    double b0_ = 0.0, b1_ = 0.0, a1_ = 0.0;
    double x1_ = 0.0, y1_ = 0.0;
    double fc_hz_ = 0.0;
    bool clamped_ = false;
};

std::vector<double> lowpass(std::span<const double> series, double fc_hz, double fs_hz,
                            bool* clamped = nullptr);

struct GaitCycle {
    std::size_t heel_strike = 0;
    std::size_t toe_off = 0;
    std::size_t next_heel_strike = 0;
};

struct GaitRecord {
    std::vector<std::vector<double>> per_sensor_gf;  // filtered, pressure sensors
    std::vector<int> sensor_ids;
    std::vector<double> combined_gf;  // sum of raw per-sensor series, then filtered
    std::vector<GaitCycle> cycles;
    double cadence_hz = 0.0;
    double sample_rate_hz = 0.0;
};

/// Heel strike = upward crossing of 5% body weight, toe off = downward
/// crossing of the 2%-hysteresis release level; a cycle needs a stance of
/// at least 0.2 s and the next heel strike. No crossings -> empty list.
std::vector<GaitCycle> segment_gait(std::span<const double> combined_gf, double fs_hz,
                                    double body_mass_kg,
                                    double threshold_frac = kStanceThresholdFrac,
                                    double hysteresis_frac = kStanceHysteresisFrac,
                                    double min_stance_s = kMinStanceS);

enum class CalibrationModel { LogMassStrain, LinearTempWavelength };

struct CalibrationFit {
    CalibrationModel model = CalibrationModel::LogMassStrain;
    double a = 0.0;  // slope (on ln x for the log model)
    double b = 0.0;  // intercept
    double r_squared = 0.0;
};

/// Least squares on (ln x, y) or (x, y). Throws FitError for fewer than
/// two points, repeated abscissae, or x <= 0 under the log model.
CalibrationFit fit_calibration(std::span<const Point> points, CalibrationModel model);

struct AsymmetryReport {
    std::array<double, kNumFootRegions> delta_t_c{};  // left minus mirrored right
    std::vector<FootRegion> flagged;
    double threshold_c = kAsymmetryThresholdC;
};

/// Region-averaged temperature difference between a left-foot map and a
/// right-foot map already mirrored onto the left template. Regions at or
/// above the threshold are flagged. Throws std::invalid_argument on
/// mismatched templates or units.
AsymmetryReport asymmetry_analysis(const FootMap& left, const FootMap& right_mirrored,
                                   double threshold_c = kAsymmetryThresholdC);

}  // namespace fbgsole
