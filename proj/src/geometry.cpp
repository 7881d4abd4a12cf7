#include "mrsim/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace mrsim {

const char* to_string(Team team) { return team == Team::A ? "A" : "B"; }

const char* to_string(Color color) { return color == Color::Red ? "red" : "blue"; }

Team opponent(Team team) { return team == Team::A ? Team::B : Team::A; }

namespace {

int band(double value, double extent) {
    const int b = static_cast<int>(value * 3.0 / extent);
    return std::clamp(b, 0, 2);
}

}  // namespace

Sector sector_of(Vec2 p, const FieldGeometry& geometry) {
    if (!geometry.contains(p))
        throw std::domain_error("sector_of: point outside field bounds");
    const int x_band = band(p.x, geometry.width);   // 0 at own goal (x = 0)
    const int y_band = band(p.y, geometry.height);
    return {3 - x_band, y_band + 1};
}

Sector sector_for_team(Vec2 p, const FieldGeometry& geometry, Team team) {
    if (team == Team::A) return sector_of(p, geometry);
    return sector_of({geometry.width - p.x, geometry.height - p.y}, geometry);
}

Vec2 sector_center(Sector sector, const FieldGeometry& geometry, Team team) {
    if (sector.row < 1 || sector.row > 3 || sector.col < 1 || sector.col > 3)
        throw std::domain_error("sector_center: sector indices must be in 1..3");
    const double x = ((3 - sector.row) + 0.5) * geometry.width / 3.0;
    const double y = ((sector.col - 1) + 0.5) * geometry.height / 3.0;
    if (team == Team::A) return {x, y};
    return {geometry.width - x, geometry.height - y};
}

}  // namespace mrsim
