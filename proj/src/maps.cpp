#include "fbgsole/maps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fbgsole/util.hpp"

namespace fbgsole {

FootTemplate FootTemplate::from_insole(const InsoleTemplate& insole, double cell_mm) {
    FootTemplate t;
    t.cell_mm = cell_mm;
    t.nx = static_cast<int>(std::ceil(insole.length_mm / cell_mm));
    t.ny = static_cast<int>(std::ceil(insole.width_mm / cell_mm));
    t.mask.assign(t.size(), 0);
    for (int ix = 0; ix < t.nx; ++ix) {
        for (int iy = 0; iy < t.ny; ++iy) {
            // symmetrized across the long axis so a mirrored map shares the
            // mask and mirroring is an exact involution
            const Point c = t.cell_center(ix, iy);
            const Point partner = t.cell_center(ix, t.ny - 1 - iy);
            t.mask[t.index(ix, iy)] =
                insole.contains(c) && insole.contains(partner) ? 1 : 0;
        }
    }
    return t;
}

std::optional<std::pair<int, int>> FootTemplate::cell_of(const Point& p) const {
    const int ix = static_cast<int>(std::floor(p.x / cell_mm));
    const int iy = static_cast<int>(std::floor(p.y / cell_mm));
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return std::nullopt;
    return std::make_pair(ix, iy);
}

FootMap interpolate_map(std::span<const MapSample> samples, const FootTemplate& tmpl,
                        MapKind kind, double radius_mm) {
    bool any_inside = false;
    for (const auto& [pos, value] : samples) {
        const auto cell = tmpl.cell_of(pos);
        if (cell && tmpl.masked(cell->first, cell->second)) {
            any_inside = true;
            break;
        }
    }
    if (samples.empty() || !any_inside) {
        throw std::invalid_argument("interpolate_map needs at least one sample inside the mask");
    }

    FootMap map;
    map.tmpl = tmpl;
    map.kind = kind;
    map.unit = kind == MapKind::Pressure ? "gf" : "degC";
    map.values.assign(tmpl.size(), FootMap::no_data());

    // Cells that contain a sample take the sample value exactly (mean when
    // several samples share a cell).
    std::vector<double> exact_sum(tmpl.size(), 0.0);
    std::vector<int> exact_n(tmpl.size(), 0);
    for (const auto& [pos, value] : samples) {
        if (const auto cell = tmpl.cell_of(pos)) {
            const std::size_t i = tmpl.index(cell->first, cell->second);
            exact_sum[i] += value;
            exact_n[i] += 1;
        }
    }

    for (int ix = 0; ix < tmpl.nx; ++ix) {
        for (int iy = 0; iy < tmpl.ny; ++iy) {
            if (!tmpl.masked(ix, iy)) continue;
            const std::size_t i = tmpl.index(ix, iy);
            if (exact_n[i] > 0) {
                map.values[i] = exact_sum[i] / exact_n[i];
                continue;
            }
            const Point c = tmpl.cell_center(ix, iy);
            double wsum = 0.0, vsum = 0.0;
            double nearest_d = std::numeric_limits<double>::infinity();
            double nearest_v = FootMap::no_data();
            for (const auto& [pos, value] : samples) {
                const double d = distance(c, pos);
                if (d < nearest_d) {
                    nearest_d = d;
                    nearest_v = value;
                }
                if (d <= radius_mm) {
                    const double w = 1.0 / std::pow(d, kIdwPower);
                    wsum += w;
                    vsum += w * value;
                }
            }
            if (wsum > 0.0) {
                map.values[i] = vsum / wsum;
            } else if (kind == MapKind::Temperature) {
                map.values[i] = nearest_v;
            }
        }
    }
    return map;
}

FootMap mirror_map(const FootMap& map) {
    // The mask is symmetric across the long axis by construction, so the
    // template is shared and mirroring twice restores the original.
    FootMap out = map;
    out.side = map.side == Side::Left ? Side::Right : Side::Left;
    for (int ix = 0; ix < map.tmpl.nx; ++ix) {
        for (int iy = 0; iy < map.tmpl.ny; ++iy) {
            out.values[map.tmpl.index(ix, iy)] =
                map.values[map.tmpl.index(ix, map.tmpl.ny - 1 - iy)];
        }
    }
    return out;
}

std::string export_map(const FootMap& map, MapFormat format) {
    const FootTemplate& t = map.tmpl;
    if (format == MapFormat::CsvGrid) {
        std::ostringstream out;
        for (int ix = 0; ix < t.nx; ++ix) {
            for (int iy = 0; iy < t.ny; ++iy) {
                if (iy > 0) out << ',';
                const double v = map.values[t.index(ix, iy)];
                if (std::isfinite(v)) out << strf("%.3f", v);
            }
            out << '\n';
        }
        return out.str();
    }
    if (format == MapFormat::Pgm) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int ix = 0; ix < t.nx; ++ix) {
            for (int iy = 0; iy < t.ny; ++iy) {
                const double v = map.values[t.index(ix, iy)];
                if (t.masked(ix, iy) && std::isfinite(v)) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
        }
        // a flat map (hi == lo up to rounding noise) renders as full white
        const double span = hi - lo;
        const bool flat =
            !(span > 1e-9 * std::max({std::abs(hi), std::abs(lo), 1.0}));
        std::string out = strf("P5\n%d %d\n255\n", t.ny, t.nx);
        for (int ix = 0; ix < t.nx; ++ix) {
            for (int iy = 0; iy < t.ny; ++iy) {
                const double v = map.values[t.index(ix, iy)];
                unsigned char g = 0;
                if (std::isfinite(v) && hi >= lo) {
                    g = flat ? 255
                             : static_cast<unsigned char>(
                                   std::lround(255.0 * (v - lo) / span));
                }
                out.push_back(static_cast<char>(g));
            }
        }
        return out;
    }
    throw std::invalid_argument("unsupported map format");
}

FootMap import_map_csv(const std::string& csv, const FootTemplate& tmpl, MapKind kind) {
    FootMap map;
    map.tmpl = tmpl;
    map.kind = kind;
    map.unit = kind == MapKind::Pressure ? "gf" : "degC";
    map.values.assign(tmpl.size(), FootMap::no_data());
    std::istringstream in(csv);
    std::string line;
    int ix = 0;
    while (std::getline(in, line) && ix < tmpl.nx) {
        std::istringstream row(line);
        std::string field;
        int iy = 0;
        while (std::getline(row, field, ',') && iy < tmpl.ny) {
            if (!field.empty()) {
                map.values[tmpl.index(ix, iy)] = std::stod(field);
            }
            ++iy;
        }
        ++ix;
    }
    return map;
}

namespace {

template <typename F>
void for_each_common_cell(const FootMap& a, const FootMap& b, F&& fn) {
    if (!a.tmpl.same_shape(b.tmpl)) {
        throw std::invalid_argument("maps do not share a template");
    }
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (a.tmpl.mask[i] && std::isfinite(a.values[i]) && std::isfinite(b.values[i])) {
            fn(a.values[i], b.values[i]);
        }
    }
}

}  // namespace

double map_pearson(const FootMap& a, const FootMap& b) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    std::size_t n = 0;
    for_each_common_cell(a, b, [&](double x, double y) {
        sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
        ++n;
    });
    if (n < 2) return 0.0;
    const double cov = sxy - sx * sy / n;
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    if (vx <= 0.0 || vy <= 0.0) return 0.0;
    return cov / std::sqrt(vx * vy);
}

double map_rmse(const FootMap& a, const FootMap& b) {
    double se = 0.0;
    std::size_t n = 0;
    for_each_common_cell(a, b, [&](double x, double y) {
        se += (x - y) * (x - y);
        ++n;
    });
    return n ? std::sqrt(se / n) : 0.0;
}

double map_mae(const FootMap& a, const FootMap& b) {
    double ae = 0.0;
    std::size_t n = 0;
    for_each_common_cell(a, b, [&](double x, double y) {
        ae += std::abs(x - y);
        ++n;
    });
    return n ? ae / n : 0.0;
}

std::optional<std::pair<int, int>> map_argmax(const FootMap& map) {
    std::optional<std::pair<int, int>> best;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int ix = 0; ix < map.tmpl.nx; ++ix) {
        for (int iy = 0; iy < map.tmpl.ny; ++iy) {
            const double v = map.values[map.tmpl.index(ix, iy)];
            if (map.tmpl.masked(ix, iy) && std::isfinite(v) && v > best_v) {
                best_v = v;
                best = std::make_pair(ix, iy);
            }
        }
    }
    return best;
}

}  // namespace fbgsole
