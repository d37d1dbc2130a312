#include "fbgsole/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbgsole/util.hpp"

namespace fbgsole {

namespace {

// Vertex abscissa of the parabola through three points with equally spaced
// x; returns the offset from the middle point in units of the spacing.
double parabola_vertex_offset(double y0, double y1, double y2) {
    const double denom = y0 - 2.0 * y1 + y2;
    if (denom == 0.0) return 0.0;
    return 0.5 * (y0 - y2) / denom;
}

}  // namespace

std::vector<PeakEstimate> detect_peaks(const SpectrumFrame& frame, const SpectralPlan& plan,
                                       double amplitude_threshold) {
    const auto& x = frame.wavelength_nm;
    const auto& a = frame.amplitude;
    const std::size_t n = a.size();
    std::vector<PeakEstimate> peaks;
    if (n < 3) return peaks;

    const auto refine = [&](std::size_t i0, std::size_t i1, std::size_t i2,
                            std::size_t anchor) -> PeakEstimate {
        PeakEstimate p;
        const double step = x[1] - x[0];
        if (a[i0] > 0.0 && a[i1] > 0.0 && a[i2] > 0.0) {
            // log of a Gaussian is an exact parabola; three samples pin the vertex
            const double l0 = std::log(a[i0]);
            const double l1 = std::log(a[i1]);
            const double l2 = std::log(a[i2]);
            const double off = parabola_vertex_offset(l0, l1, l2);
            p.center_nm = x[i1] + off * step;
            p.amplitude = std::exp(l1 - 0.25 * (l0 - l2) * off);
        } else {
            p.center_nm = x[anchor];
            p.amplitude = a[anchor];
        }
        return p;
    };

    // The threshold applies to the refined peak height, not the raw bin:
    // a peak pushed against (or just past) the grid edge still shows its
    // true height through the fitted vertex.
    const double raw_floor = 1e-9;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = i == 0 ? a[i] > a[i + 1] : a[i] > a[i - 1];
        const bool right_ok = i == n - 1 ? a[i] > a[i - 1] : a[i] >= a[i + 1];
        if (!(left_ok && right_ok) || a[i] < raw_floor) continue;

        // Boundary maxima use the nearest interior triple; the parabola is
        // still exact for a Gaussian.
        PeakEstimate p;
        if (i == 0) {
            p = refine(0, 1, 2, 0);
        } else if (i == n - 1) {
            p = refine(n - 3, n - 2, n - 1, n - 1);
        } else {
            p = refine(i - 1, i, i + 1, i);
        }
        if (p.amplitude >= amplitude_threshold) peaks.push_back(p);
    }

    // Identify and strip the reference marker; without it the interrogator
    // is presumed missing.
    const double ref_tolerance = std::max(plan.guard_band_nm, 0.5);
    auto ref = peaks.end();
    double best = ref_tolerance;
    for (auto it = peaks.begin(); it != peaks.end(); ++it) {
        const double d = std::abs(it->center_nm - plan.reference_peak_nm);
        if (d <= best) {
            best = d;
            ref = it;
        }
    }
    if (ref == peaks.end()) {
        throw InterrogatorAbsentError(
            "reference peak not found; verify the presence of the interrogator");
    }
    peaks.erase(ref);
    return peaks;
}

PeakAssignment assign_peaks(std::span<const PeakEstimate> peaks, const SpectralPlan& plan) {
    PeakAssignment out;
    for (const auto& peak : peaks) {
        int best_id = -1;
        double best_d = plan.guard_band_nm;
        for (std::size_t id = 0; id < plan.assignments_nm.size(); ++id) {
            const double d = std::abs(peak.center_nm - plan.assignments_nm[id]);
            if (d <= best_d) {
                best_d = d;
                best_id = static_cast<int>(id);
            }
        }
        if (best_id < 0) {
            out.unassigned.push_back(peak);
            continue;
        }
        if (out.wavelength_by_sensor.count(best_id)) {
            throw AmbiguityError(
                strf("two peaks within the guard band of sensor %d", best_id));
        }
        out.wavelength_by_sensor[best_id] = peak.center_nm;
    }
    return out;
}

double wavelength_to_strain(const FbgSensorSpec& sensor, double lambda_nm) {
    return (lambda_nm / sensor.lambda_nominal_nm - 1.0) / sensor.strain_sensitivity * 1e6;
}

double wavelength_to_temperature_delta(const FbgSensorSpec& sensor, double lambda_nm) {
    return (lambda_nm / sensor.lambda_nominal_nm - 1.0) / sensor.temp_sensitivity;
}

double compensate(double raw_strain_microstrain, double t_now_c, double t_ref_c,
                  double cross_microstrain_per_c) {
    return raw_strain_microstrain - cross_microstrain_per_c * (t_now_c - t_ref_c);
}

double strain_to_mass(const FbgSensorSpec& sensor, double strain_microstrain) {
    return std::exp((strain_microstrain - sensor.calib_b) / sensor.calib_a);
}

ButterworthLowpass::ButterworthLowpass(double fc_hz, double fs_hz) {
    if (fc_hz <= 0.0 || fs_hz <= 0.0) {
        throw std::invalid_argument("cutoff and sample rate must be positive");
    }
    if (fc_hz >= fs_hz / 2.0) {
        fc_hz = 0.45 * fs_hz;
        clamped_ = true;
    }
    fc_hz_ = fc_hz;
    const double c = std::tan(std::numbers::pi * fc_hz / fs_hz);  // prewarped
    b0_ = c / (1.0 + c);
    b1_ = b0_;
    a1_ = (c - 1.0) / (1.0 + c);
}

double ButterworthLowpass::step(double x) {
    const double y = b0_ * x + b1_ * x1_ - a1_ * y1_;
    x1_ = x;
    y1_ = y;
    return y;
}

void ButterworthLowpass::reset() {
    x1_ = 0.0;
    y1_ = 0.0;
}

std::vector<double> lowpass(std::span<const double> series, double fc_hz, double fs_hz,
                            bool* clamped) {
    ButterworthLowpass filter(fc_hz, fs_hz);
    if (clamped) *clamped = filter.clamped();
    std::vector<double> out;
    out.reserve(series.size());
    for (double x : series) out.push_back(filter.step(x));
    return out;
}

std::vector<GaitCycle> segment_gait(std::span<const double> combined_gf, double fs_hz,
                                    double body_mass_kg, double threshold_frac,
                                    double hysteresis_frac, double min_stance_s) {
    std::vector<GaitCycle> cycles;
    const double body_gf = body_mass_kg * 1000.0;
    const double thr_hi = threshold_frac * body_gf;
    const double thr_lo = (threshold_frac - hysteresis_frac) * body_gf;
    const std::size_t min_stance = static_cast<std::size_t>(min_stance_s * fs_hz);

    struct Stance {
        std::size_t heel_strike;
        std::size_t toe_off;
    };
    std::vector<Stance> stances;
    bool in_stance = false;
    std::size_t hs = 0;
    for (std::size_t k = 0; k < combined_gf.size(); ++k) {
        if (!in_stance && combined_gf[k] >= thr_hi) {
            in_stance = true;
            hs = k;
        } else if (in_stance && combined_gf[k] < thr_lo) {
            in_stance = false;
            if (k - hs >= min_stance) stances.push_back({hs, k});
        }
    }
    for (std::size_t i = 0; i + 1 < stances.size(); ++i) {
        cycles.push_back({stances[i].heel_strike, stances[i].toe_off,
                          stances[i + 1].heel_strike});
    }
    // Last completed stance still forms a cycle if one more heel strike
    // started before the series ended.
    if (!stances.empty() && in_stance && hs > stances.back().toe_off) {
        cycles.push_back({stances.back().heel_strike, stances.back().toe_off, hs});
    }
    return cycles;
}

CalibrationFit fit_calibration(std::span<const Point> points, CalibrationModel model) {
    if (points.size() < 2) throw FitError("at least two points required");

    std::vector<double> xs, ys;
    xs.reserve(points.size());
    ys.reserve(points.size());
    for (const auto& p : points) {
        if (model == CalibrationModel::LogMassStrain) {
            if (p.x <= 0.0) throw FitError("log model needs x > 0");
            xs.push_back(std::log(p.x));
        } else {
            xs.push_back(p.x);
        }
        ys.push_back(p.y);
    }

    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double vx = sxx - sx * sx / n;
    if (vx <= 1e-15 * std::max(1.0, sxx)) {
        throw FitError("degenerate fit: abscissae are not distinct");
    }

    CalibrationFit fit;
    fit.model = model;
    fit.a = (sxy - sx * sy / n) / vx;
    fit.b = (sy - fit.a * sx) / n;

    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double pred = fit.a * xs[i] + fit.b;
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    return fit;
}

AsymmetryReport asymmetry_analysis(const FootMap& left, const FootMap& right_mirrored,
                                   double threshold_c) {
    if (!left.tmpl.same_shape(right_mirrored.tmpl)) {
        throw std::invalid_argument("asymmetry maps must share a template");
    }
    if (left.kind != MapKind::Temperature || right_mirrored.kind != MapKind::Temperature) {
        throw std::invalid_argument("asymmetry analysis expects temperature maps");
    }

    // Region partition scales with the template the maps were built on.
    InsoleTemplate insole;
    insole.length_mm = left.tmpl.nx * left.tmpl.cell_mm;
    insole.width_mm = left.tmpl.ny * left.tmpl.cell_mm;

    std::array<double, kNumFootRegions> sum{};
    std::array<int, kNumFootRegions> count{};
    const FootTemplate& t = left.tmpl;
    for (int ix = 0; ix < t.nx; ++ix) {
        for (int iy = 0; iy < t.ny; ++iy) {
            const std::size_t i = t.index(ix, iy);
            if (!t.masked(ix, iy)) continue;
            const double l = left.values[i];
            const double r = right_mirrored.values[i];
            if (!std::isfinite(l) || !std::isfinite(r)) continue;
            const int region = static_cast<int>(foot_region_of(t.cell_center(ix, iy), insole));
            sum[region] += l - r;
            count[region] += 1;
        }
    }

    AsymmetryReport report;
    report.threshold_c = threshold_c;
    for (int r = 0; r < kNumFootRegions; ++r) {
        report.delta_t_c[r] = count[r] ? sum[r] / count[r] : 0.0;
        if (std::abs(report.delta_t_c[r]) >= threshold_c) {
            report.flagged.push_back(static_cast<FootRegion>(r));
        }
    }
    return report;
}

}  // namespace fbgsole
