#include "mrsim/schemas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include "mrsim/assemblage.hpp"
#include "mrsim/rng.hpp"

namespace mrsim {

namespace {

// Source texts. The foraging machine is the published block; the two
// soccer machines are reconstructed from their transition tables, with
// alternatives listed in table row order (that order is the transition
// priority).
constexpr std::string_view kForagingSource =
    "HOM_FOR      = OFF,\n"
    "OFF          = (on->WANDER),\n"
    "WANDER       = (red_visible->ACQUIRE_RED\n"
    "               |blue_visible->ACQUIRE_BLUE\n"
    "               |off->OFF),\n"
    "ACQUIRE_RED = (red_in_gripper->DELIVER_RED\n"
    "               |not_red_visible->WANDER),\n"
    "DELIVER_RED  = (close_to_red_bin->WANDER),\n"
    "ACQUIRE_BLUE = (blue_in_gripper->DELIVER_BLUE\n"
    "                |not_blue_visible->WANDER),\n"
    "DELIVER_BLUE = (close_to_blue_bin->WANDER).\n";

constexpr std::string_view kForwardSource =
    "FORWARD = OFF,\n"
    "OFF = (on->WANDER),\n"
    "GO_TO_BALL = (close_to_ball->BEHIND_BALL),\n"
    "BEHIND_BALL = (hit_ball->WANDER),\n"
    "WANDER = (ball_visible->GO_TO_BALL\n"
    "         |close_to_ball->BEHIND_BALL\n"
    "         |off->OFF).\n";

constexpr std::string_view kGoalKeeperSource =
    "GOAL_KEEPER = OFF,\n"
    "OFF = (on->WANDER),\n"
    "GO_TO_BALL = (hit_ball->WANDER),\n"
    "DEFEND = (ball_close->GO_TO_BALL),\n"
    "WANDER = (ball_visible->DEFEND\n"
    "         |ball_close->GO_TO_BALL\n"
    "         |off->OFF).\n";

bool attractor_visible(const RobotView& view, const SchemaParams& params, Color color) {
    for (const auto& a : view.attractors) {
        if (a.color != color || a.claimed) continue;
        if ((a.position - view.self.p).norm() <= params.sensor_range) return true;
    }
    return false;
}

std::optional<Vec2> nearest_attractor(const RobotView& view, Color color) {
    std::optional<Vec2> best;
    double best_d = 0.0;
    for (const auto& a : view.attractors) {
        if (a.color != color || a.claimed) continue;
        double d = (a.position - view.self.p).norm();
        if (!best || d < best_d) {
            best = a.position;
            best_d = d;
        }
    }
    return best;
}

std::optional<Vec2> goal_center(const RobotView& view, Team team) {
    if (!view.geometry) return std::nullopt;
    auto it = view.geometry->goals.find(team);
    if (it == view.geometry->goals.end()) return std::nullopt;
    return it->second.center();
}

// Unit vector pointing from the opponent goal through the ball: the side a
// robot must reach before it can push the ball toward that goal.
Vec2 behind_direction(const KinematicState& ball, Vec2 opp_goal, Team team) {
    Vec2 away = ball.p - opp_goal;
    // Degenerate ball-on-goal-center geometry: push straight out from the
    // goal line instead.
    if (away.norm() < 1e-9) return {team == Team::A ? -1.0 : 1.0, 0.0};
    return away.normalized();
}

// True when the robot already sits inside a 45-degree cone behind the ball,
// close enough in bearing that pushing forward sends the ball goalward.
bool behind_ball_aligned(Vec2 self, const KinematicState& ball, Vec2 behind_dir) {
    Vec2 offset = self - ball.p;
    double d = offset.norm();
    if (d < 1e-9) return true;
    return offset.dot(behind_dir) / d >= std::cos(std::numbers::pi / 4.0);
}

bool ball_in_assigned_sectors(const RobotView& view) {
    if (!view.ball || !view.geometry || view.assigned_sectors.empty()) return false;
    if (!view.geometry->contains(view.ball->p)) return false;
    Sector s = sector_for_team(view.ball->p, *view.geometry, view.team);
    return std::find(view.assigned_sectors.begin(), view.assigned_sectors.end(), s) !=
           view.assigned_sectors.end();
}

bool releaser_holds(const std::string& name, const RobotView& view, const SchemaParams& params) {
    if (name == "on") return view.lifecycle && *view.lifecycle == "on";
    if (name == "off") return view.lifecycle && *view.lifecycle == "off";
    if (name == "red_visible") return attractor_visible(view, params, Color::Red);
    if (name == "blue_visible") return attractor_visible(view, params, Color::Blue);
    if (name == "not_red_visible") return !attractor_visible(view, params, Color::Red);
    if (name == "not_blue_visible") return !attractor_visible(view, params, Color::Blue);
    if (name == "red_in_gripper") return view.gripper == Color::Red;
    if (name == "blue_in_gripper") return view.gripper == Color::Blue;
    if (name == "close_to_red_bin" || name == "close_to_blue_bin") {
        if (!view.geometry) return false;
        Color color = name == "close_to_red_bin" ? Color::Red : Color::Blue;
        auto it = view.geometry->bins.find(color);
        if (it == view.geometry->bins.end()) return false;
        return (it->second - view.self.p).norm() <= params.bin_radius;
    }
    if (name == "ball_visible") {
        if (!view.ball) return false;
        if ((view.ball->p - view.self.p).norm() > params.sensor_range) return false;
        return ball_in_assigned_sectors(view);
    }
    if (name == "close_to_ball") {
        return view.ball && (view.ball->p - view.self.p).norm() <= params.ball_close_radius;
    }
    if (name == "ball_close") {
        if (!view.ball) return false;
        auto own = goal_center(view, view.team);
        return own && (view.ball->p - *own).norm() <= params.ball_near_goal_radius;
    }
    if (name == "hit_ball") return view.hit_latch;
    return false;
}

// Four wall obstacles: the nearest boundary point on each edge, stationary.
std::vector<KinematicState> wall_obstacles(const RobotView& view) {
    std::vector<KinematicState> walls;
    if (!view.geometry) return walls;
    const auto& g = *view.geometry;
    Vec2 p = view.self.p;
    walls.push_back({{p.x, 0.0}, {}});
    walls.push_back({{p.x, g.height}, {}});
    walls.push_back({{0.0, p.y}, {}});
    walls.push_back({{g.width, p.y}, {}});
    return walls;
}

Vec2 repulsion_sum(const RobotView& view, const SchemaParams& params) {
    // Exactly coincident entities have no defined push direction; skip them.
    auto push = [&](const KinematicState& obstacle, const RepulsiveParams& rep) {
        if ((obstacle.p - view.self.p).norm() < 1e-12) return Vec2{};
        return repulsive_force(view.self, obstacle, rep).force;
    };
    Vec2 sum;
    for (const auto& other : view.teammates) sum += push(other, params.rep);
    for (const auto& other : view.opponents) sum += push(other, params.rep);
    for (const auto& wall : wall_obstacles(view)) sum += push(wall, params.wall_rep);
    return sum;
}

Vec2 attraction_to(const RobotView& view, const SchemaParams& params, Vec2 target_p,
                   Vec2 target_v = {}) {
    if ((target_p - view.self.p).norm() < 1e-12 && (target_v - view.self.v).norm() < 1e-12)
        return {};
    return attractive_force(view.self, {target_p, target_v}, params.attr);
}

}  // namespace

const char* to_string(Role role) {
    switch (role) {
        case Role::Forager: return "forager";
        case Role::Forward: return "forward";
        case Role::GoalKeeper: return "goal_keeper";
        case Role::CenterHalf: return "center_half";
        case Role::OutsideLeft: return "outside_left";
        case Role::OutsideRight: return "outside_right";
    }
    throw std::logic_error("bad role");
}

std::optional<Role> parse_role(std::string_view name) {
    for (Role r : {Role::Forager, Role::Forward, Role::GoalKeeper, Role::CenterHalf,
                   Role::OutsideLeft, Role::OutsideRight}) {
        if (name == to_string(r)) return r;
    }
    return std::nullopt;
}

void SchemaParams::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
    };
    positive(sensor_range, "sensor_range");
    positive(grip_radius, "grip_radius");
    positive(bin_radius, "bin_radius");
    positive(ball_close_radius, "ball_close_radius");
    positive(ball_near_goal_radius, "ball_near_goal_radius");
    positive(behind_offset, "behind_offset");
    positive(wander_gain, "wander_gain");
    if (wander_period <= 0) throw std::invalid_argument("wander_period must be positive");
    attr.validate();
    rep.validate();
    wall_rep.validate();
}

std::vector<std::string> evaluate_releasers(const RobotView& view, const SchemaParams& params,
                                            const StateId& current) {
    const Fsm& fsm = assemblage_for_role(view.role);
    std::vector<std::string> active;
    std::unordered_set<std::string> seen;
    auto emit = [&](const std::string& name) {
        if (seen.insert(name).second && releaser_holds(name, view, params)) active.push_back(name);
    };
    for (const Transition& t : fsm.outgoing(current.index)) emit(t.releaser);
    for (const std::string& name : fsm.alphabet) emit(name);
    return active;
}

Vec2 wander_heading(const WanderRng& rng, int period) {
    if (period <= 0) throw std::invalid_argument("wander period must be positive");
    std::uint64_t counter = static_cast<std::uint64_t>(rng.tick / period);
    double angle = 2.0 * std::numbers::pi * stream_unit(rng.seed, counter);
    return {std::cos(angle), std::sin(angle)};
}

std::optional<TargetSpec> schema_target(const std::string& state_label, const RobotView& view,
                                        const SchemaParams& params) {
    if (state_label == "OFF" || state_label == "WANDER") return std::nullopt;
    if (state_label == "ACQUIRE_RED" || state_label == "ACQUIRE_BLUE") {
        Color color = state_label == "ACQUIRE_RED" ? Color::Red : Color::Blue;
        if (auto target = nearest_attractor(view, color)) return TargetSpec{*target, {}};
        return std::nullopt;
    }
    if (state_label == "DELIVER_RED" || state_label == "DELIVER_BLUE") {
        Color color = state_label == "DELIVER_RED" ? Color::Red : Color::Blue;
        if (!view.geometry) return std::nullopt;
        auto it = view.geometry->bins.find(color);
        if (it == view.geometry->bins.end()) return std::nullopt;
        return TargetSpec{it->second, {}};
    }
    // Ball-directed behaviors pursue only a ball sensed inside the robot's
    // own zone; otherwise they fall back to the home anchor. Pursuit is
    // gated by where the BALL is, so an out-of-zone ball is the neighbor's
    // problem and nobody death-follows a cleared ball across the field.
    if (state_label == "GO_TO_BALL") {
        if (ball_in_assigned_sectors(view)) return TargetSpec{view.ball->p, view.ball->v};
        return TargetSpec{view.home, {}};
    }
    if (state_label == "DEFEND") {
        auto own = goal_center(view, view.team);
        if (ball_in_assigned_sectors(view) && own)
            return TargetSpec{(view.ball->p + *own) * 0.5, view.ball->v * 0.5};
        return TargetSpec{view.home, {}};
    }
    if (state_label == "BEHIND_BALL") {
        auto opp = goal_center(view, opponent(view.team));
        if (ball_in_assigned_sectors(view) && opp) {
            Vec2 dir = behind_direction(*view.ball, *opp, view.team);
            // Once lined up behind the ball, drive into it to kick it
            // goalward; until then aim for the staging point behind it.
            if (behind_ball_aligned(view.self.p, *view.ball, dir))
                return TargetSpec{view.ball->p, view.ball->v};
            return TargetSpec{view.ball->p + dir * params.behind_offset, view.ball->v};
        }
        return TargetSpec{view.home, {}};
    }
    throw std::invalid_argument("unknown behavior state: " + state_label);
}

Vec2 schema_force(const std::string& state_label, const RobotView& view,
                  const SchemaParams& params, const WanderRng& rng) {
    if (state_label == "OFF") return {};

    Vec2 force = repulsion_sum(view, params);
    if (auto target = schema_target(state_label, view, params))
        force += attraction_to(view, params, target->p, target->v);

    if (state_label == "WANDER") {
        force += wander_heading(rng, params.wander_period) * params.wander_gain;
        // Off-zone soccer players drift back to their anchor instead of
        // chasing; foragers roam freely.
        if (view.role != Role::Forager && !ball_in_assigned_sectors(view))
            force += attraction_to(view, params, view.home);
    } else if (state_label == "BEHIND_BALL" && ball_in_assigned_sectors(view) &&
               (view.ball->p - view.self.p).norm() >= 1e-12) {
        // While still on the wrong side, the ball itself repels: the
        // approach must bend around it rather than push it toward our own
        // half. Once aligned the repulsion drops so contact can happen.
        auto opp = goal_center(view, opponent(view.team));
        Vec2 dir = opp ? behind_direction(*view.ball, *opp, view.team)
                       : Vec2{view.team == Team::A ? -1.0 : 1.0, 0.0};
        if (!behind_ball_aligned(view.self.p, *view.ball, dir))
            force += repulsive_force(view.self, *view.ball, params.rep).force;
    }
    return force;
}

const Fsm& assemblage_for_role(Role role) {
    static const Fsm foraging = compile_source(std::string(kForagingSource), "foraging");
    static const Fsm forward = compile_source(std::string(kForwardSource), "forward");
    static const Fsm keeper = compile_source(std::string(kGoalKeeperSource), "goal_keeper");
    switch (role) {
        case Role::Forager: return foraging;
        case Role::GoalKeeper: return keeper;
        case Role::Forward:
        case Role::CenterHalf:
        case Role::OutsideLeft:
        case Role::OutsideRight: return forward;
    }
    throw std::invalid_argument("unknown role");
}

const std::vector<Sector>& sectors_for_role(Role role) {
    static const std::vector<Sector> none;
    static const std::vector<Sector> forward{{1, 1}, {1, 2}, {1, 3}};
    static const std::vector<Sector> outside_left{{2, 3}, {3, 3}};
    static const std::vector<Sector> outside_right{{2, 1}, {3, 1}};
    static const std::vector<Sector> center_half{{2, 2}};
    static const std::vector<Sector> goal_keeper{{3, 2}};
    switch (role) {
        case Role::Forager: return none;
        case Role::Forward: return forward;
        case Role::OutsideLeft: return outside_left;
        case Role::OutsideRight: return outside_right;
        case Role::CenterHalf: return center_half;
        case Role::GoalKeeper: return goal_keeper;
    }
    throw std::invalid_argument("unknown role");
}

std::string_view assemblage_source_for_role(Role role) {
    switch (role) {
        case Role::Forager: return kForagingSource;
        case Role::GoalKeeper: return kGoalKeeperSource;
        case Role::Forward:
        case Role::CenterHalf:
        case Role::OutsideLeft:
        case Role::OutsideRight: return kForwardSource;
    }
    throw std::invalid_argument("unknown role");
}

}  // namespace mrsim
