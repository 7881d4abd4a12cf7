#pragma once

#include <map>
#include <optional>

#include "mrsim/vec2.hpp"

namespace mrsim {

enum class Team { A, B };
enum class Color { Red, Blue };

const char* to_string(Team team);
const char* to_string(Color color);
Team opponent(Team team);

struct GoalSegment {
    Vec2 a;
    Vec2 b;
    Vec2 center() const { return (a + b) * 0.5; }
};

// Rectangular field with the origin at one corner. Team A defends the goal
// on the x = 0 edge, team B the one on x = width. Foraging fields carry the
// two delivery bins and the shared home base instead of goals.
struct FieldGeometry {
    double width = 20.0;
    double height = 20.0;
    std::map<Color, Vec2> bins;
    std::map<Team, GoalSegment> goals;
    Vec2 home_base;

    bool contains(Vec2 p) const {
        return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
    }
};

struct Sector {
    int row = 0;  // 1 = opponent-goal third ... 3 = own-goal third
    int col = 0;  // 1..3 across the field
    bool operator==(const Sector&) const = default;
    auto operator<=>(const Sector&) const = default;
};

/// 3x3 cell of `p` in the reference (team A) orientation: row 3 is the third
/// adjoining x = 0, row 1 the third adjoining x = width; columns follow y.
/// Out-of-bounds points are a domain error.
Sector sector_of(Vec2 p, const FieldGeometry& geometry);

/// Same grid seen from `team`; team B's view is the 180-degree rotation.
Sector sector_for_team(Vec2 p, const FieldGeometry& geometry, Team team);

/// Center point of a sector in `team`'s orientation.
Vec2 sector_center(Sector sector, const FieldGeometry& geometry, Team team);

}  // namespace mrsim
