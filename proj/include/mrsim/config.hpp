#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mrsim/geometry.hpp"
#include "mrsim/schemas.hpp"
#include "mrsim/vec2.hpp"

namespace mrsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { Foraging, Soccer };

const char* to_string(ScenarioKind kind);

struct RobotSpec {
    Team team = Team::A;
    Role role = Role::Forager;
    Vec2 start;
};

// Full description of one runnable scenario. Everything physical lives
// here; the library hardcodes no scales.
struct ScenarioConfig {
    int schema_version = 1;
    ScenarioKind kind = ScenarioKind::Foraging;

    double width = 20.0;
    double height = 20.0;
    double dt = 0.05;
    long step_limit = 50000;
    double max_speed = 2.0;
    double max_accel = 4.0;
    double robot_radius = 0.2;

    std::vector<RobotSpec> robots;

    // foraging
    int red_attractors = 5;
    int blue_attractors = 5;
    Vec2 red_bin{8.0, 2.0};
    Vec2 blue_bin{12.0, 2.0};
    Vec2 home_base{10.0, 2.0};
    double placement_margin = 1.2;   // wall and bin clearance for placement
    double attractor_spacing = 0.8;  // min distance between placed attractors

    // soccer
    double goal_width = 4.0;
    double ball_radius = 0.15;
    double ball_friction = 0.8;          // per-second decay rate
    double kick_restitution = 1.2;       // ball normal speed = e * robot normal speed
    double ball_wall_restitution = 0.6;  // speed kept on wall bounce
    // Referee drop: a ball that travels less than stall_distance over
    // stall_window ticks is returned to the field center.
    int stall_window = 300;
    double stall_distance = 0.5;

    SchemaParams schema;

    /// Throws ConfigError on any out-of-range or inconsistent field.
    void validate() const;
};

/// Parses the sectioned key-value format. `path` only labels diagnostics.
/// Unknown sections or keys are errors, not warnings.
ScenarioConfig parse_config(const std::string& text, const std::string& path = "<config>");

/// parse_config over the file's contents; missing file is a ConfigError.
ScenarioConfig load_config(const std::string& path);

/// Field geometry implied by the config: bins and home for foraging, goal
/// segments for soccer.
FieldGeometry geometry_for(const ScenarioConfig& config);

}  // namespace mrsim
