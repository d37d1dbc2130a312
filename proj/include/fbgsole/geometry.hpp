#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fbgsole {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Rect {
    double x_min = 0.0, y_min = 0.0;
    double x_max = 0.0, y_max = 0.0;

    bool contains(const Point& p) const {
        return p.x >= x_min && p.x < x_max && p.y >= y_min && p.y < y_max;
    }
};

double distance(const Point& a, const Point& b);

/// Even-odd point-in-polygon test; points on an edge count as inside.
bool point_in_polygon(const Point& p, std::span<const Point> polygon);

/// Circumradius of the circle through three points. Collinear triples
/// return +infinity.
double circumradius(const Point& a, const Point& b, const Point& c);

double polyline_length(std::span<const Point> polyline);

/// Point at arc length s along the polyline (clamped to its ends).
Point point_at_arc_length(std::span<const Point> polyline, double s);

/// Minimum circumradius over consecutive point triples; +infinity for a
/// straight (or too short) polyline.
double min_bend_radius(std::span<const Point> polyline);

}  // namespace fbgsole
