#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrsim/fsm.hpp"
#include "mrsim/geometry.hpp"
#include "mrsim/potential.hpp"
#include "mrsim/vec2.hpp"

namespace mrsim {

enum class Role { Forager, Forward, GoalKeeper, CenterHalf, OutsideLeft, OutsideRight };

const char* to_string(Role role);
std::optional<Role> parse_role(std::string_view name);

struct SensedAttractor {
    Color color;
    Vec2 position;
    bool claimed = false;  // inside some robot's gripper
};

// Everything one robot can act on this tick. Built by the world from the
// pre-step snapshot; all sensed entities lie within sensor_range of self.
struct RobotView {
    KinematicState self;
    Team team = Team::A;
    Role role = Role::Forager;
    std::vector<SensedAttractor> attractors;
    std::optional<Color> gripper;
    std::optional<KinematicState> ball;
    std::vector<KinematicState> teammates;
    std::vector<KinematicState> opponents;
    const FieldGeometry* geometry = nullptr;
    std::vector<Sector> assigned_sectors;  // in the robot's team orientation
    Vec2 home;                             // anchor position (start pose)
    bool hit_latch = false;                // ball contact last step
    std::optional<std::string> lifecycle;  // injected "on" / "off" event
};

struct SchemaParams {
    double sensor_range = 5.0;
    double grip_radius = 0.3;
    double bin_radius = 0.5;
    double ball_close_radius = 1.0;
    double ball_near_goal_radius = 2.0;
    double behind_offset = 0.8;
    int wander_period = 40;  // steps between wander heading resamples
    double wander_gain = 1.0;
    AttractiveParams attr;
    RepulsiveParams rep;       // robot obstacles
    RepulsiveParams wall_rep;  // wall obstacles
    void validate() const;
};

/// Wander randomness handle: the heading is addressed by (seed, tick), so
/// the force stays a pure function and replays exactly.
struct WanderRng {
    std::uint64_t seed = 0;
    long tick = 0;
};

/// The releasers of the robot's machine whose predicates hold on `view`, in
/// priority order: the current state's alternatives in compiled source
/// order first, then the rest of the alphabet.
std::vector<std::string> evaluate_releasers(const RobotView& view, const SchemaParams& params,
                                            const StateId& current);

struct TargetSpec {
    Vec2 p;
    Vec2 v;
};

/// The attractive target a behavior steers toward, if it has one. WANDER
/// and OFF have none; ball-directed behaviors fall back to the home anchor
/// when the ball is out of view; ACQUIRE with nothing visible has none.
std::optional<TargetSpec> schema_target(const std::string& state_label, const RobotView& view,
                                        const SchemaParams& params);

/// Steering force for the behavior named by `state_label`. All behaviors
/// except OFF include repulsion from visible robots and from the four
/// walls.
Vec2 schema_force(const std::string& state_label, const RobotView& view,
                  const SchemaParams& params, const WanderRng& rng);

/// The compiled machine that sequences this role's behaviors. All field
/// players share the forward machine.
const Fsm& assemblage_for_role(Role role);

/// Activity sectors for a soccer role; empty for foragers.
const std::vector<Sector>& sectors_for_role(Role role);

/// Notation source text the role's machine is compiled from.
std::string_view assemblage_source_for_role(Role role);

/// Wander heading (unit vector) for the given handle and resample period.
Vec2 wander_heading(const WanderRng& rng, int period);

}  // namespace mrsim
