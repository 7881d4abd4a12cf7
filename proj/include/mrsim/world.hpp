#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrsim/config.hpp"
#include "mrsim/fsm.hpp"
#include "mrsim/geometry.hpp"
#include "mrsim/schemas.hpp"
#include "mrsim/vec2.hpp"

namespace mrsim {

struct RobotState {
    int id = 0;
    Team team = Team::A;
    Role role = Role::Forager;
    KinematicState kin;
    StateId fsm_state;
    std::optional<int> gripper;  // attractor id
    std::uint64_t wander_seed = 0;
    bool contact_latch = false;  // ball contact last step
    Vec2 home;
    double distance = 0.0;  // odometer
};

enum class AttractorStatus { Free, Held, Delivered };

const char* to_string(AttractorStatus status);

struct AttractorState {
    int id = 0;
    Color color = Color::Red;
    Vec2 position;
    AttractorStatus status = AttractorStatus::Free;
    int holder = -1;  // robot id while held
};

struct WorldEvent {
    std::string type;  // pickup | delivered | hit_ball | goal | complete
    int robot = -1;
    int attractor = -1;
    std::optional<Color> color;
    std::optional<Team> team;
    Vec2 normal;               // hit_ball: unit contact normal, robot -> ball
    double speed_before = 0;   // hit_ball: ball speed along normal before
    double speed_after = 0;    // hit_ball: and after
};

// Complete simulation state. A plain value: copy it to branch a timeline.
struct WorldState {
    long tick = 0;
    std::vector<RobotState> robots;
    std::vector<AttractorState> attractors;
    std::optional<KinematicState> ball;
    std::map<Team, int> score;
    FieldGeometry geometry;
    ScenarioConfig config;
    std::uint64_t seed = 0;
    std::optional<std::string> pending_lifecycle;  // releaser injected next step
    std::vector<WorldEvent> events;                // events of the last step
    Vec2 stall_anchor;                             // ball position at last stall check
    long stall_anchor_tick = 0;
    bool complete = false;// foraging: all delivered
};

/// Seeded initial world. Robots start at their configured poses in the
/// machine's start state; foraging attractors are placed by a dedicated
/// PRNG stream, uniform and non-overlapping, clear of walls, bins and
/// robots. The first step injects `on` to every robot.
WorldState init_world(const ScenarioConfig& config, std::uint64_t seed);

/// The view world `robot_id` perceives of the CURRENT world state: entities
/// within sensor range, the pending lifecycle releaser, and its own latch.
RobotView view_for(const WorldState& world, int robot_id);

/// One synchronous step in place. Order: decide every robot from the same
/// pre-step snapshot (releasers -> FSM -> force), then integrate robots,
/// project into walls, resolve grippers, then the ball (kicks, friction,
/// motion, goals, bounces), then terminal checks.
void advance(WorldState& world);

/// Value-returning flavor of advance.
WorldState step_world(const WorldState& world);

/// free + held + delivered counts, for conservation checks.
std::map<AttractorStatus, int> attractor_census(const WorldState& world);

}  // namespace mrsim
