#include "fbgsole/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fbgsole {

double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

bool point_in_polygon(const Point& p, std::span<const Point> polygon) {
    const std::size_t n = polygon.size();
    if (n < 3) return false;

    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = polygon[j];
        const Point& b = polygon[i];

        // on-edge check: treat boundary points as inside
        const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        const double dot = (p.x - a.x) * (p.x - b.x) + (p.y - a.y) * (p.y - b.y);
        if (std::abs(cross) < 1e-9 && dot <= 1e-9) return true;

        if ((b.y > p.y) != (a.y > p.y)) {
            const double x_int = (a.x - b.x) * (p.y - b.y) / (a.y - b.y) + b.x;
            if (p.x < x_int) inside = !inside;
        }
    }
    return inside;
}

double circumradius(const Point& a, const Point& b, const Point& c) {
    const double ab = distance(a, b);
    const double bc = distance(b, c);
    const double ca = distance(c, a);
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    const double area2 = std::abs(cross);  // 2 * triangle area
    const double scale = std::max({ab, bc, ca});
    if (area2 <= 1e-12 * scale * scale) {
        return std::numeric_limits<double>::infinity();
    }
    return ab * bc * ca / (2.0 * area2);
}

double polyline_length(std::span<const Point> polyline) {
    double len = 0.0;
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        len += distance(polyline[i - 1], polyline[i]);
    }
    return len;
}

Point point_at_arc_length(std::span<const Point> polyline, double s) {
    if (polyline.empty()) return {};
    if (s <= 0.0) return polyline.front();
    double walked = 0.0;
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        const double seg = distance(polyline[i - 1], polyline[i]);
        if (walked + seg >= s && seg > 0.0) {
            const double f = (s - walked) / seg;
            return {polyline[i - 1].x + f * (polyline[i].x - polyline[i - 1].x),
                    polyline[i - 1].y + f * (polyline[i].y - polyline[i - 1].y)};
        }
        walked += seg;
    }
    return polyline.back();
}

double min_bend_radius(std::span<const Point> polyline) {
    double r_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 2; i < polyline.size(); ++i) {
        r_min = std::min(r_min, circumradius(polyline[i - 2], polyline[i - 1], polyline[i]));
    }
    return r_min;
}

}  // namespace fbgsole
