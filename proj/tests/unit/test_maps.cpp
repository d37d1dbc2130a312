#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fbgsole/maps.hpp"

using namespace fbgsole;

TEST_CASE("the standard template rasterizes to 52x18 five-millimetre cells") {
    const FootTemplate tmpl = FootTemplate::from_insole(InsoleTemplate::standard());
    CHECK(tmpl.nx == 52);
    CHECK(tmpl.ny == 18);
    CHECK(tmpl.cell_mm == doctest::Approx(5.0));
    int masked = 0;
    for (auto m : tmpl.mask) masked += m;
    CHECK(masked > 800);  // ~936 minus the chamfered corners
    CHECK(masked <= 52 * 18);
}

TEST_CASE("IDW is exact at a sample's cell, which attains the map maximum") {
    const FootTemplate tmpl = FootTemplate::from_insole(InsoleTemplate::standard());
    const Point heel{40.0, 40.0};
    const std::vector<MapSample> samples = {{heel, 123.456}};
    const FootMap map = interpolate_map(samples, tmpl, MapKind::Pressure);
    const auto cell = tmpl.cell_of(heel);
    REQUIRE(cell.has_value());
    const double at_cell = map.values[tmpl.index(cell->first, cell->second)];
    CHECK(at_cell == doctest::Approx(123.456));
    // a lone sample under normalized IDW yields a plateau; the sample cell
    // sits at the (shared) maximum and nothing exceeds it
    for (double v : map.values) {
        if (std::isfinite(v)) CHECK(v <= at_cell + 1e-12);
    }
    // with smaller samples ringing it, every nearby cell mixes and the
    // argmax is unique at the big sample's cell
    const std::vector<MapSample> ring = {
        {heel, 123.456}, {{15.0, 20.0}, 1.0}, {{15.0, 70.0}, 1.0}, {{90.0, 40.0}, 1.0}};
    const FootMap map2 = interpolate_map(ring, tmpl, MapKind::Pressure);
    const auto argmax = map_argmax(map2);
    REQUIRE(argmax.has_value());
    CHECK(*argmax == *cell);
}

TEST_CASE("two equal samples give their value at equidistant cells") {
    const FootTemplate tmpl = FootTemplate::from_insole(InsoleTemplate::standard());
    const std::vector<MapSample> samples = {{{100.0, 30.0}, 7.0}, {{140.0, 30.0}, 7.0}};
    const FootMap map = interpolate_map(samples, tmpl, MapKind::Pressure);
    // the midline x=120 is equidistant; any covered cell there reads 7
    const auto cell = tmpl.cell_of({120.0, 30.0});
    REQUIRE(cell.has_value());
    CHECK(map.values[tmpl.index(cell->first, cell->second)] == doctest::Approx(7.0));
}

TEST_CASE("IDW values stay inside the sample range wherever data exists") {
    const FootTemplate tmpl = FootTemplate::from_insole(InsoleTemplate::standard());
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> x(10.0, 250.0), y(5.0, 83.0), v(-40.0, 90.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<MapSample> samples;
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < 12; ++i) {
            const double value = v(rng);
            samples.push_back({{x(rng), y(rng)}, value});
            lo = std::min(lo, value);
            hi = std::max(hi, value);
        }
        const FootMap map = interpolate_map(samples, tmpl, MapKind::Temperature);
        for (double cell : map.values) {
            if (std::isfinite(cell)) {
                CHECK(cell >= lo - 1e-9);
                CHECK(cell <= hi + 1e-9);
            }
        }
    }
}

TEST_CASE("IDW is invariant under sample permutation") {
    const FootTemplate tmpl = FootTemplate::from_insole(InsoleTemplate::standard());
    std::vector<MapSample> samples = {
        {{30.0, 20.0}, 5.0}, {{120.0, 44.0}, 9.0}, {{200.0, 60.0}, 2.0}, {{70.0, 70.0}, 7.5}};
    const FootMap forward = interpolate_map(samples, tmpl, MapKind::Pressure);
    std::reverse(samples.begin(), samples.end());
    const FootMap backward = interpolate_map(samples, tmpl, MapKind::Pressure);
    for (std::size_t i = 0; i < forward.values.size(); ++i) {
        if (std::isfinite(forward.values[i])) {
            CHECK(forward.values[i] == doctest::Approx(backward.values[i]).epsilon(1e-12));
        } else {
            CHECK(!std::isfinite(backward.values[i]));
        }
    }
}

TEST_CASE("pressure maps leave uncovered cells as no-data; temperature fills nearest") {
    const FootTemplate tmpl = FootTemplate::from_insole(InsoleTemplate::standard());
    const std::vector<MapSample> samples = {{{30.0, 44.0}, 11.0}};
    const FootMap pressure = interpolate_map(samples, tmpl, MapKind::Pressure);
    const FootMap temperature = interpolate_map(samples, tmpl, MapKind::Temperature);
    const auto toe_cell = tmpl.cell_of({250.0, 44.0});
    REQUIRE(toe_cell.has_value());
    REQUIRE(tmpl.masked(toe_cell->first, toe_cell->second));
    CHECK(!std::isfinite(pressure.values[tmpl.index(toe_cell->first, toe_cell->second)]));
    CHECK(temperature.values[tmpl.index(toe_cell->first, toe_cell->second)] ==
          doctest::Approx(11.0));
}

TEST_CASE("empty sample lists are rejected") {
    const FootTemplate tmpl = FootTemplate::from_insole(InsoleTemplate::standard());
    CHECK_THROWS_AS(interpolate_map({}, tmpl, MapKind::Pressure), std::invalid_argument);
    const std::vector<MapSample> outside = {{{-50.0, -50.0}, 1.0}};
    CHECK_THROWS_AS(interpolate_map(outside, tmpl, MapKind::Pressure), std::invalid_argument);
}

TEST_CASE("mirroring is an involution that swaps the edges") {
    const FootTemplate tmpl = FootTemplate::from_insole(InsoleTemplate::standard());
    const std::vector<MapSample> samples = {{{60.0, 10.0}, 3.0}, {{60.0, 78.0}, 8.0}};
    const FootMap map = interpolate_map(samples, tmpl, MapKind::Temperature);
    const FootMap mirrored = mirror_map(map);
    CHECK(mirrored.side == Side::Right);

    const FootMap twice = mirror_map(mirrored);
    CHECK(twice.side == Side::Left);
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (std::isfinite(map.values[i])) {
            CHECK(twice.values[i] == doctest::Approx(map.values[i]).epsilon(1e-12));
        }
    }

    // the low-edge sample value appears at the grid-mirrored cell
    const auto low = tmpl.cell_of({60.0, 10.0});
    REQUIRE(low.has_value());
    CHECK(mirrored.values[tmpl.index(low->first, tmpl.ny - 1 - low->second)] ==
          doctest::Approx(map.values[tmpl.index(low->first, low->second)]));
}

TEST_CASE("CSV export has one row per x cell and one column per y cell") {
    const FootTemplate tmpl = FootTemplate::from_insole(InsoleTemplate::standard());
    const std::vector<MapSample> samples = {{{120.0, 44.0}, 42.0}};
    const FootMap map = interpolate_map(samples, tmpl, MapKind::Temperature);
    const std::string csv = export_map(map, MapFormat::CsvGrid);

    std::istringstream in(csv);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 17);  // 18 columns
        ++rows;
    }
    CHECK(rows == 52);

    const FootMap parsed = import_map_csv(csv, tmpl, MapKind::Temperature);
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        if (std::isfinite(map.values[i])) {
            CHECK(parsed.values[i] == doctest::Approx(map.values[i]).epsilon(1e-3));
        }
    }
}

TEST_CASE("a uniform map exports as a single gray level inside the mask") {
    const FootTemplate tmpl = FootTemplate::from_insole(InsoleTemplate::standard());
    const std::vector<MapSample> samples = {{{60.0, 44.0}, 5.0}, {{180.0, 44.0}, 5.0}};
    const FootMap map = interpolate_map(samples, tmpl, MapKind::Temperature);
    const std::string pgm = export_map(map, MapFormat::Pgm);
    CHECK(pgm.substr(0, 3) == "P5\n");
    const std::size_t header_end = pgm.find("255\n") + 4;
    std::vector<unsigned char> levels;
    for (std::size_t i = header_end; i < pgm.size(); ++i) {
        levels.push_back(static_cast<unsigned char>(pgm[i]));
    }
    REQUIRE(levels.size() == tmpl.size());
    for (int ix = 0; ix < tmpl.nx; ++ix) {
        for (int iy = 0; iy < tmpl.ny; ++iy) {
            const unsigned char g = levels[static_cast<std::size_t>(ix) * tmpl.ny + iy];
            if (tmpl.masked(ix, iy)) {
                CHECK(g == 255);  // flat maps render as one full-scale level
            } else {
                CHECK(g == 0);
            }
        }
    }
}

TEST_CASE("map scores: identity map has rmse 0, pearson 1") {
    const FootTemplate tmpl = FootTemplate::from_insole(InsoleTemplate::standard());
    std::vector<MapSample> samples;
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> v(0.0, 100.0);
    for (int i = 0; i < 10; ++i) {
        samples.push_back({{20.0 + i * 22.0, 30.0 + (i % 3) * 12.0}, v(rng)});
    }
    const FootMap map = interpolate_map(samples, tmpl, MapKind::Pressure);
    CHECK(map_rmse(map, map) == doctest::Approx(0.0));
    CHECK(map_pearson(map, map) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(map_mae(map, map) == doctest::Approx(0.0));
}
