#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fbgsole/layout.hpp"

namespace fbgsole {

inline constexpr double kDefaultCellMm = 5.0;
inline constexpr double kIdwRadiusMm = 60.0;
inline constexpr double kIdwPower = 2.0;

enum class MapKind { Pressure, Temperature };
enum class MapFormat { CsvGrid, Pgm };

/// Rasterized insole: nx cells along the foot (heel at row 0), ny across.
/// Default 52x18 of 5 mm gives ~936 masked cells, comparable to the dense
/// commercial reference grid.
struct FootTemplate {
    double cell_mm = kDefaultCellMm;
    int nx = 0;
    int ny = 0;
    std::vector<std::uint8_t> mask;  // nx*ny, row-major over x

    static FootTemplate from_insole(const InsoleTemplate& insole,
                                    double cell_mm = kDefaultCellMm);

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(ix) * ny + iy; }
    bool masked(int ix, int iy) const { return mask[index(ix, iy)] != 0; }
    Point cell_center(int ix, int iy) const {
        return {(ix + 0.5) * cell_mm, (iy + 0.5) * cell_mm};
    }
    /// Cell containing a point, or nullopt when the point lies off the grid.
    std::optional<std::pair<int, int>> cell_of(const Point& p) const;

    bool same_shape(const FootTemplate& other) const {
        return nx == other.nx && ny == other.ny && cell_mm == other.cell_mm &&
               mask == other.mask;
    }
};

struct FootMap {
    FootTemplate tmpl;
    std::vector<double> values;  // no-data cells hold NaN
    MapKind kind = MapKind::Pressure;
    std::string unit;  // "gf" or "degC"
    double t_s = 0.0;
    Side side = Side::Left;

    static constexpr double no_data() { return std::numeric_limits<double>::quiet_NaN(); }
};

using MapSample = std::pair<Point, double>;

/// Inverse-distance-weighted rasterization (power 2, 60 mm radius). A cell
/// containing a sample takes that sample's value exactly. Cells with no
/// sample in radius stay no-data for pressure and copy the nearest sample
/// for temperature. Throws std::invalid_argument when no sample falls
/// inside the mask.
FootMap interpolate_map(std::span<const MapSample> samples, const FootTemplate& tmpl,
                        MapKind kind, double radius_mm = kIdwRadiusMm);

/// Reflect across the long axis and flip the side label.
FootMap mirror_map(const FootMap& map);

/// CsvGrid: nx rows by ny comma-separated columns, no-data printed as an
/// empty field. Pgm: binary 8-bit grayscale, min-max normalized over
/// masked cells, no-data as 0.
std::string export_map(const FootMap& map, MapFormat format);

/// Parses a CsvGrid export back onto the template (test and tooling aid).
FootMap import_map_csv(const std::string& csv, const FootTemplate& tmpl, MapKind kind);

// Scores over cells where both maps carry data.
double map_pearson(const FootMap& a, const FootMap& b);
double map_rmse(const FootMap& a, const FootMap& b);
double map_mae(const FootMap& a, const FootMap& b);

/// Masked cell with the largest value (no-data ignored).
std::optional<std::pair<int, int>> map_argmax(const FootMap& map);

}  // namespace fbgsole
