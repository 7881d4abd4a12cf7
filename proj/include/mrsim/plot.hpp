#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mrsim/potential.hpp"
#include "mrsim/schemas.hpp"
#include "mrsim/trace.hpp"

namespace mrsim {

struct PlotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A frozen scene for force-field rendering: one probe robot executing one
// behavior against a ball and a set of obstacle robots. The grid sweeps the
// probe's position; its velocity is held at the snapshot value everywhere.
struct ForceSnapshot {
    double width = 18;
    double height = 12;
    double goal_width = 4;
    std::string behavior = "GO_TO_BALL";
    Team team = Team::A;
    KinematicState robot;
    KinematicState ball;
    std::vector<KinematicState> others;
    SchemaParams params;
    int nx = 24;
    int ny = 16;
};

ForceSnapshot parse_snapshot(const nlohmann::json& j);
ForceSnapshot load_snapshot(const std::string& path);

struct SnapshotField {
    std::vector<FieldArrow> arrows;  // grid samples of the behavior force
    Vec2 robot_force;                // force at the probe's own pose
    Vec2 target;                     // the behavior's attractive target
};

/// Evaluates the behavior force over the snapshot grid and at the robot.
SnapshotField evaluate_snapshot(const ForceSnapshot& snapshot);

std::string render_forcefield_svg(const ForceSnapshot& snapshot);

/// Per-robot polylines color-coded by behavior state, ball path, field
/// furniture. An empty record list yields the bare field frame.
std::string render_trajectory_svg(const std::vector<TraceRecord>& records);

}  // namespace mrsim
