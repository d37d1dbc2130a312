#include "fbgsole/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fbgsole {

namespace {

using nlohmann::json;

json point_to_json(const Point& p) { return json::array({p.x, p.y}); }

Point point_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json points_to_json(const std::vector<Point>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(point_to_json(p));
    return arr;
}

std::vector<Point> points_from_json(const json& j) {
    std::vector<Point> pts;
    for (const auto& e : j) pts.push_back(point_from_json(e));
    return pts;
}

json offsets_to_json(const std::array<double, kNumFootRegions>& offsets) {
    json obj = json::object();
    for (int r = 0; r < kNumFootRegions; ++r) {
        if (offsets[r] != 0.0) {
            obj[foot_region_name(static_cast<FootRegion>(r))] = offsets[r];
        }
    }
    return obj;
}

std::array<double, kNumFootRegions> offsets_from_json(const json& obj) {
    std::array<double, kNumFootRegions> offsets{};
    if (obj.is_null()) return offsets;
    for (int r = 0; r < kNumFootRegions; ++r) {
        const char* name = foot_region_name(static_cast<FootRegion>(r));
        if (obj.contains(name)) offsets[r] = obj.at(name).get<double>();
    }
    return offsets;
}

}  // namespace

std::string layout_to_json(const SensorLayout& layout) {
    json doc;
    doc["template"] = {
        {"length_mm", layout.insole.length_mm},
        {"width_mm", layout.insole.width_mm},
        {"outline", points_to_json(layout.insole.outline)},
    };
    doc["fiber"] = {
        {"guard_length_mm", layout.fiber.guard_length_mm},
        {"total_length_mm", layout.fiber.total_length_mm},
        {"polyline", points_to_json(layout.fiber.polyline_mm)},
    };
    doc["spectral_plan"] = {
        {"band_nm", {layout.plan.band_min_nm, layout.plan.band_max_nm}},
        {"reference_peak_nm", layout.plan.reference_peak_nm},
        {"guard_band_nm", layout.plan.guard_band_nm},
        {"assignments_nm", layout.plan.assignments_nm},
    };
    json regions = json::object();
    for (int r = 0; r < kNumFootRegions; ++r) {
        const Rect rect = foot_region_rect(static_cast<FootRegion>(r), layout.insole);
        regions[foot_region_name(static_cast<FootRegion>(r))] =
            json::array({rect.x_min, rect.y_min, rect.x_max, rect.y_max});
    }
    doc["regions"] = regions;
    json sensors = json::array();
    for (const auto& s : layout.sensors) {
        sensors.push_back({
            {"id", s.id},
            {"role", s.role == SensorRole::Pressure ? "pressure" : "temperature"},
            {"position_mm", point_to_json(s.position_mm)},
            {"lambda_nominal_nm", s.lambda_nominal_nm},
            {"strain_sensitivity", s.strain_sensitivity},
            {"temp_sensitivity", s.temp_sensitivity},
            {"calib_a", s.calib_a},
            {"calib_b", s.calib_b},
        });
    }
    doc["sensors"] = sensors;
    return doc.dump(2) + "\n";
}

SensorLayout layout_from_json(const std::string& text) {
    const json doc = json::parse(text);
    SensorLayout layout;
    const json& t = doc.at("template");
    layout.insole.length_mm = t.at("length_mm").get<double>();
    layout.insole.width_mm = t.at("width_mm").get<double>();
    layout.insole.outline = points_from_json(t.at("outline"));

    const json& f = doc.at("fiber");
    layout.fiber.guard_length_mm = f.at("guard_length_mm").get<double>();
    layout.fiber.total_length_mm = f.at("total_length_mm").get<double>();
    layout.fiber.polyline_mm = points_from_json(f.at("polyline"));

    const json& p = doc.at("spectral_plan");
    layout.plan.band_min_nm = p.at("band_nm").at(0).get<double>();
    layout.plan.band_max_nm = p.at("band_nm").at(1).get<double>();
    layout.plan.reference_peak_nm = p.at("reference_peak_nm").get<double>();
    layout.plan.guard_band_nm = p.at("guard_band_nm").get<double>();
    layout.plan.assignments_nm = p.at("assignments_nm").get<std::vector<double>>();

    for (const auto& js : doc.at("sensors")) {
        FbgSensorSpec s;
        s.id = js.at("id").get<int>();
        s.role = js.at("role").get<std::string>() == "temperature" ? SensorRole::Temperature
                                                                   : SensorRole::Pressure;
        s.position_mm = point_from_json(js.at("position_mm"));
        s.lambda_nominal_nm = js.at("lambda_nominal_nm").get<double>();
        s.strain_sensitivity = js.at("strain_sensitivity").get<double>();
        s.temp_sensitivity = js.at("temp_sensitivity").get<double>();
        s.calib_a = js.at("calib_a").get<double>();
        s.calib_b = js.at("calib_b").get<double>();
        layout.sensors.push_back(s);
    }
    return layout;
}

std::string scenario_to_json(const GaitScenario& sc) {
    json doc = {
        {"body_mass_kg", sc.body_mass_kg},
        {"cadence_hz", sc.cadence_hz},
        {"duration_s", sc.duration_s},
        {"sample_rate_hz", sc.sample_rate_hz},
        {"ambient_temp_c", sc.ambient_temp_c},
        {"steady_foot_temp_c", sc.steady_foot_temp_c},
        {"warmup_time_constant_s", sc.warmup_time_constant_s},
        {"left_offsets_c", offsets_to_json(sc.left_offsets_c)},
        {"right_offsets_c", offsets_to_json(sc.right_offsets_c)},
        {"noise_rms_microstrain", sc.noise_rms_microstrain},
        {"seated", sc.seated},
    };
    return doc.dump(2) + "\n";
}

GaitScenario scenario_from_json(const std::string& text) {
    const json doc = json::parse(text);
    GaitScenario sc;
    const auto get = [&](const char* key, double fallback) {
        return doc.contains(key) ? doc.at(key).get<double>() : fallback;
    };
    sc.body_mass_kg = get("body_mass_kg", sc.body_mass_kg);
    sc.cadence_hz = get("cadence_hz", sc.cadence_hz);
    sc.duration_s = get("duration_s", sc.duration_s);
    sc.sample_rate_hz = get("sample_rate_hz", sc.sample_rate_hz);
    sc.ambient_temp_c = get("ambient_temp_c", sc.ambient_temp_c);
    sc.steady_foot_temp_c = get("steady_foot_temp_c", sc.steady_foot_temp_c);
    sc.warmup_time_constant_s = get("warmup_time_constant_s", sc.warmup_time_constant_s);
    if (doc.contains("left_offsets_c")) {
        sc.left_offsets_c = offsets_from_json(doc.at("left_offsets_c"));
    }
    if (doc.contains("right_offsets_c")) {
        sc.right_offsets_c = offsets_from_json(doc.at("right_offsets_c"));
    }
    sc.noise_rms_microstrain = get("noise_rms_microstrain", sc.noise_rms_microstrain);
    if (doc.contains("seated")) sc.seated = doc.at("seated").get<bool>();
    sc.validate();
    return sc;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
}

}  // namespace fbgsole
