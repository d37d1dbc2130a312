#include "fbgsole/layout.hpp"

#include "fbgsole/util.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace fbgsole {

namespace {

// Tangent-continuous path builder: straight runs and circular arcs,
// sampled densely enough that circumradius checks see the true arc radius.
class PathBuilder {
public:
    PathBuilder(Point start, double heading_rad) : pos_(start), heading_(heading_rad) {
        points_.push_back(pos_);
    }

    PathBuilder& line(double length_mm) {
        const int steps = std::max(1, static_cast<int>(std::ceil(length_mm / 2.0)));
        for (int i = 1; i <= steps; ++i) {
            const double d = length_mm * i / steps;
            points_.push_back({pos_.x + d * std::cos(heading_),
                               pos_.y + d * std::sin(heading_)});
        }
        pos_ = points_.back();
        return *this;
    }

    // Positive angle turns left, negative turns right.
    PathBuilder& arc(double radius_mm, double angle_rad) {
        const double side = angle_rad >= 0.0 ? 1.0 : -1.0;
        const Point center{pos_.x - side * radius_mm * std::sin(heading_),
                           pos_.y + side * radius_mm * std::cos(heading_)};
        const double start_angle = std::atan2(pos_.y - center.y, pos_.x - center.x);
        const int steps = std::max(2, static_cast<int>(std::ceil(std::abs(angle_rad) / 0.12)));
        for (int i = 1; i <= steps; ++i) {
            const double a = start_angle + angle_rad * i / steps;
            points_.push_back({center.x + radius_mm * std::cos(a),
                               center.y + radius_mm * std::sin(a)});
        }
        pos_ = points_.back();
        heading_ += angle_rad;
        return *this;
    }

    std::vector<Point> take() { return std::move(points_); }

private:
    Point pos_;
    double heading_;
    std::vector<Point> points_;
};

constexpr double kPi = std::numbers::pi;

}  // namespace

const char* foot_region_name(FootRegion r) {
    switch (r) {
        case FootRegion::MedialHeel: return "medial_heel";
        case FootRegion::LateralHeel: return "lateral_heel";
        case FootRegion::Midfoot: return "midfoot";
        case FootRegion::MedialForefoot: return "medial_forefoot";
        case FootRegion::LateralForefoot: return "lateral_forefoot";
        case FootRegion::Hallux: return "hallux";
    }
    return "?";
}

InsoleTemplate InsoleTemplate::standard() {
    InsoleTemplate t;
    t.length_mm = 259.0;
    t.width_mm = 88.0;
    t.outline = {{20, 0}, {239, 0}, {259, 20}, {259, 68},
                 {239, 88}, {20, 88}, {0, 68}, {0, 20}};
    return t;
}

Rect foot_region_rect(FootRegion region, const InsoleTemplate& tmpl) {
    const double L = tmpl.length_mm;
    const double W = tmpl.width_mm;
    const double mid = W / 2.0;
    const double heel_end = 75.0 / 259.0 * L;
    const double fore_start = 150.0 / 259.0 * L;
    const double hallux_start = 210.0 / 259.0 * L;
    switch (region) {
        case FootRegion::MedialHeel: return {0, mid, heel_end, W};
        case FootRegion::LateralHeel: return {0, 0, heel_end, mid};
        case FootRegion::Midfoot: return {heel_end, 0, fore_start, W};
        case FootRegion::MedialForefoot: return {fore_start, mid, hallux_start, W};
        case FootRegion::LateralForefoot: return {fore_start, 0, L, mid};
        case FootRegion::Hallux: return {hallux_start, mid, L, W};
    }
    return {};
}

FootRegion foot_region_of(const Point& p, const InsoleTemplate& tmpl) {
    const double W = tmpl.width_mm;
    const double mid = W / 2.0;
    const double heel_end = 75.0 / 259.0 * tmpl.length_mm;
    const double fore_start = 150.0 / 259.0 * tmpl.length_mm;
    const double hallux_start = 210.0 / 259.0 * tmpl.length_mm;
    if (p.x < heel_end) {
        return p.y >= mid ? FootRegion::MedialHeel : FootRegion::LateralHeel;
    }
    if (p.x < fore_start) return FootRegion::Midfoot;
    if (p.x >= hallux_start && p.y >= mid) return FootRegion::Hallux;
    return p.y >= mid ? FootRegion::MedialForefoot : FootRegion::LateralForefoot;
}

const FbgSensorSpec& SensorLayout::sensor(int id) const {
    for (const auto& s : sensors) {
        if (s.id == id) return s;
    }
    throw std::out_of_range(strf("no sensor with id %d", id));
}

int SensorLayout::count(SensorRole role) const {
    return static_cast<int>(
        std::count_if(sensors.begin(), sensors.end(),
                      [role](const FbgSensorSpec& s) { return s.role == role; }));
}

bool HeadroomReport::any_collision() const {
    return std::any_of(entries.begin(), entries.end(),
                       [](const HeadroomEntry& e) { return e.collision; });
}

SensorLayout build_default_layout() {
    SensorLayout layout;
    layout.insole = InsoleTemplate::standard();

    // Serpentine over the insole: three longitudinal rows joined by
    // semicircular turns. On-insole length ~630 mm; with the 400 mm guard
    // the total comes out around 1030 mm.
    PathBuilder pb({22, 16}, 0.0);
    pb.line(184.0)          // row 1, y=16, heel -> toe
        .arc(14.0, kPi)     // toe turn up to y=44
        .line(176.0)        // row 2, y=44, toe -> heel
        .arc(14.0, -kPi)    // heel turn up to y=72
        .line(182.0);       // row 3, y=72, heel -> toe
    layout.fiber.polyline_mm = pb.take();
    layout.fiber.guard_length_mm = 400.0;
    layout.fiber.total_length_mm =
        layout.fiber.guard_length_mm + layout.fiber.on_insole_length_mm();

    // Arc-length stations of the 20 gratings along the fiber (id 0 nearest
    // the guard). Pressure stations cluster at the heel and toe ends;
    // temperature sensors (ids 6,10,13,16,17) sit on the middle and top rows.
    struct Station {
        double s;
        SensorRole role;
    };
    const Station stations[] = {
        {4, SensorRole::Pressure},    {60, SensorRole::Pressure},
        {74, SensorRole::Pressure},   {120, SensorRole::Pressure},
        {194, SensorRole::Pressure},     // toe, on the turn
        {254, SensorRole::Pressure},     // central forefoot
        {286, SensorRole::Temperature},
        {322, SensorRole::Pressure},  {372, SensorRole::Pressure},
        {386, SensorRole::Pressure},     // central heel
        {400, SensorRole::Temperature},
        {426, SensorRole::Pressure},     // heel apex
        {442, SensorRole::Pressure},
        {468, SensorRole::Temperature},
        {492, SensorRole::Pressure},  {540, SensorRole::Pressure},
        {566, SensorRole::Temperature},
        {580, SensorRole::Temperature},
        {594, SensorRole::Pressure},  {626, SensorRole::Pressure},
    };

    layout.plan = plan_spectrum(static_cast<int>(std::size(stations)));

    int id = 0;
    for (const auto& st : stations) {
        FbgSensorSpec s;
        s.id = id;
        s.role = st.role;
        s.position_mm = point_at_arc_length(layout.fiber.polyline_mm, st.s);
        s.lambda_nominal_nm = layout.plan.assignments_nm[id];
        layout.sensors.push_back(s);
        ++id;
    }
    return layout;
}

ValidationReport validate_layout(const SensorLayout& layout) {
    ValidationReport report;
    report.min_bend_radius_mm = min_bend_radius(layout.fiber.polyline_mm);

    if (report.min_bend_radius_mm < kMinBendRadiusMm) {
        report.violations.push_back(
            {"bend_radius",
             strf("bend radius %.3f mm below the %.0f mm limit",
                  report.min_bend_radius_mm, kMinBendRadiusMm)});
    }
    if (layout.sensors.size() > static_cast<std::size_t>(kMaxSensorsPerFiber)) {
        report.violations.push_back(
            {"sensor_count",
             strf("sensor count %zu exceeds maximum of %d", layout.sensors.size(),
                  kMaxSensorsPerFiber)});
    }
    for (const auto& s : layout.sensors) {
        if (!layout.insole.contains(s.position_mm)) {
            report.violations.push_back(
                {"position_outside_outline",
                 strf("sensor %d at (%.1f, %.1f) outside the outline", s.id,
                      s.position_mm.x, s.position_mm.y),
                 s.id});
        }
    }
    const double expected =
        layout.fiber.guard_length_mm + layout.fiber.on_insole_length_mm();
    if (std::abs(layout.fiber.total_length_mm - expected) > 1.0) {
        report.violations.push_back(
            {"fiber_length",
             strf("total length %.1f mm inconsistent with guard + arc = %.1f mm",
                  layout.fiber.total_length_mm, expected)});
    }
    std::set<int> ids;
    for (const auto& s : layout.sensors) {
        if (!ids.insert(s.id).second) {
            report.violations.push_back(
                {"duplicate_id", strf("sensor id %d appears more than once", s.id),
                 s.id});
        }
    }
    return report;
}

SpectralPlan plan_spectrum(int n_sensors, double band_min_nm, double band_max_nm) {
    if (n_sensors > kMaxSensorsPerFiber) {
        throw CapacityError(
            strf("%d sensors requested; the interrogator handles a maximum of %d per fiber",
                 n_sensors, kMaxSensorsPerFiber));
    }
    if (n_sensors < 1 || band_max_nm <= band_min_nm) {
        throw std::invalid_argument("need at least one sensor and a non-empty band");
    }

    SpectralPlan plan;
    plan.band_min_nm = band_min_nm;
    plan.band_max_nm = band_max_nm;
    plan.reference_peak_nm = band_min_nm;

    const double width = band_max_nm - band_min_nm;
    // Smallest whole-nm offset with offset >= spacing, i.e. the reference
    // stays at least two guard bands clear of the first assignment.
    const double offset = std::ceil(width / n_sensors);
    if (n_sensors == 1) {
        plan.assignments_nm = {band_max_nm};
        plan.guard_band_nm = offset / 2.0;
        return plan;
    }
    const double spacing = (width - offset) / (n_sensors - 1);
    plan.guard_band_nm = spacing / 2.0;
    plan.assignments_nm.resize(n_sensors);
    for (int k = 0; k < n_sensors; ++k) {
        plan.assignments_nm[k] = band_min_nm + offset + k * spacing;
    }
    return plan;
}

HeadroomReport check_spectral_headroom(const SpectralPlan& plan, const SensorLayout& layout,
                                       double max_strain_microstrain, double max_dt_c) {
    HeadroomReport report;
    report.guard_band_nm = plan.guard_band_nm;
    for (std::size_t id = 0; id < plan.assignments_nm.size(); ++id) {
        const FbgSensorSpec& s = layout.sensor(static_cast<int>(id));
        HeadroomEntry e;
        e.sensor_id = s.id;
        e.worst_shift_nm =
            s.lambda_nominal_nm * (s.strain_sensitivity * max_strain_microstrain * 1e-6 +
                                   s.temp_sensitivity * max_dt_c);
        e.collision = e.worst_shift_nm > plan.guard_band_nm;
        report.entries.push_back(e);
    }
    return report;
}

}  // namespace fbgsole
