#include "mrsim/world.hpp"

#include <algorithm>
#include <cmath>

#include "mrsim/rng.hpp"

namespace mrsim {

namespace {

Vec2 place_attractor(SplitMix64& rng, const ScenarioConfig& config,
                     const std::vector<AttractorState>& placed) {
    const double margin = config.placement_margin;
    const double x_lo = margin, x_hi = config.width - margin;
    const double y_lo = margin, y_hi = config.height - margin;
    if (!(x_hi > x_lo) || !(y_hi > y_lo))
        throw ConfigError("attractor placement: margins exceed the field");

    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vec2 p{rng.next_in(x_lo, x_hi), rng.next_in(y_lo, y_hi)};
        bool ok = (p - config.red_bin).norm() > config.schema.bin_radius + margin &&
                  (p - config.blue_bin).norm() > config.schema.bin_radius + margin;
        for (const auto& robot : config.robots)
            ok = ok && (p - robot.start).norm() > margin;
        for (const auto& other : placed)
            ok = ok && (p - other.position).norm() > config.attractor_spacing;
        if (ok) return p;
    }
    throw ConfigError("attractor placement: no feasible position after 1000 attempts");
}

void check_all_delivered(WorldState& w) {
    if (w.config.kind != ScenarioKind::Foraging || w.complete) return;
    bool all = std::all_of(w.attractors.begin(), w.attractors.end(), [](const AttractorState& a) {
        return a.status == AttractorStatus::Delivered;
    });
    if (all) {
        w.complete = true;
        WorldEvent e;
        e.type = "complete";
        w.events.push_back(e);
    }
}

struct BallGoalHit {
    Team scorer;
};

// Goal when the ball touches the goal plane between the posts; otherwise the
// wall bounces it back with the configured restitution.
std::optional<BallGoalHit> resolve_ball_bounds(WorldState& w, KinematicState& ball) {
    const double r = w.config.ball_radius;
    const auto in_mouth = [&](Team defender) {
        const GoalSegment& goal = w.geometry.goals.at(defender);
        const double lo = std::min(goal.a.y, goal.b.y);
        const double hi = std::max(goal.a.y, goal.b.y);
        return ball.p.y >= lo && ball.p.y <= hi;
    };
    if (ball.p.x <= r && in_mouth(Team::A)) return BallGoalHit{Team::B};
    if (ball.p.x >= w.geometry.width - r && in_mouth(Team::B)) return BallGoalHit{Team::A};

    const double e = w.config.ball_wall_restitution;
    if (ball.p.x < r) {
        ball.p.x = r;
        ball.v.x = std::abs(ball.v.x) * e;
    } else if (ball.p.x > w.geometry.width - r) {
        ball.p.x = w.geometry.width - r;
        ball.v.x = -std::abs(ball.v.x) * e;
    }
    if (ball.p.y < r) {
        ball.p.y = r;
        ball.v.y = std::abs(ball.v.y) * e;
    } else if (ball.p.y > w.geometry.height - r) {
        ball.p.y = w.geometry.height - r;
        ball.v.y = -std::abs(ball.v.y) * e;
    }
    return std::nullopt;
}

}  // namespace

const char* to_string(AttractorStatus status) {
    switch (status) {
        case AttractorStatus::Free: return "free";
        case AttractorStatus::Held: return "held";
        case AttractorStatus::Delivered: return "delivered";
    }
    return "?";
}

WorldState init_world(const ScenarioConfig& config, std::uint64_t seed) {
    config.validate();
    WorldState w;
    w.config = config;
    w.geometry = geometry_for(config);
    w.seed = seed;
    w.pending_lifecycle = "on";

    for (size_t i = 0; i < config.robots.size(); ++i) {
        const RobotSpec& spec = config.robots[i];
        RobotState r;
        r.id = static_cast<int>(i);
        r.team = spec.team;
        r.role = spec.role;
        r.kin = {spec.start, {}};
        r.home = spec.start;
        const Fsm& fsm = assemblage_for_role(spec.role);
        r.fsm_state = fsm.state_id(fsm.start);
        r.wander_seed = derive_seed(seed, StreamPurpose::RobotWander, r.id);
        w.robots.push_back(std::move(r));
    }

    if (config.kind == ScenarioKind::Foraging) {
        SplitMix64 rng(derive_seed(seed, StreamPurpose::AttractorPlacement));
        const int total = config.red_attractors + config.blue_attractors;
        for (int i = 0; i < total; ++i) {
            AttractorState a;
            a.id = i;
            a.color = i < config.red_attractors ? Color::Red : Color::Blue;
            a.position = place_attractor(rng, config, w.attractors);
            w.attractors.push_back(a);
        }
        check_all_delivered(w);  // zero-attractor tasks are born complete
    } else {
        w.ball = KinematicState{{config.width / 2, config.height / 2}, {}};
        w.score[Team::A] = 0;
        w.score[Team::B] = 0;
        w.stall_anchor = w.ball->p;
        w.stall_anchor_tick = 0;
    }
    return w;
}

RobotView view_for(const WorldState& world, int robot_id) {
    const RobotState& self = world.robots.at(robot_id);
    const double range = world.config.schema.sensor_range;

    RobotView view;
    view.self = self.kin;
    view.team = self.team;
    view.role = self.role;
    view.geometry = &world.geometry;
    view.assigned_sectors = sectors_for_role(self.role);
    view.home = self.home;
    view.hit_latch = self.contact_latch;
    view.lifecycle = world.pending_lifecycle;
    if (self.gripper) view.gripper = world.attractors.at(*self.gripper).color;

    for (const auto& a : world.attractors) {
        if ((a.position - self.kin.p).norm() > range) continue;
        view.attractors.push_back({a.color, a.position, a.status != AttractorStatus::Free});
    }
    for (const auto& other : world.robots) {
        if (other.id == self.id) continue;
        if ((other.kin.p - self.kin.p).norm() > range) continue;
        (other.team == self.team ? view.teammates : view.opponents).push_back(other.kin);
    }
    if (world.ball && (world.ball->p - self.kin.p).norm() <= range) view.ball = *world.ball;
    return view;
}

void advance(WorldState& w) {
    const ScenarioConfig& cfg = w.config;
    w.events.clear();

    // Decision phase: every robot reads the same pre-step state.
    struct Decision {
        StateId next_state;
        Vec2 force;
    };
    std::vector<Decision> decisions(w.robots.size());
    for (const RobotState& robot : w.robots) {
        RobotView view = view_for(w, robot.id);
        std::vector<std::string> active = evaluate_releasers(view, cfg.schema, robot.fsm_state);
        const Fsm& fsm = assemblage_for_role(robot.role);
        StepRecord rec = step_fsm(fsm, robot.fsm_state.index, active, w.tick);
        WanderRng rng{robot.wander_seed, w.tick};
        decisions[robot.id] = {rec.to, schema_force(rec.to.label, view, cfg.schema, rng)};
    }
    w.pending_lifecycle.reset();

    // Apply phase: states, latches, synchronous integration, walls.
    for (RobotState& robot : w.robots) {
        robot.fsm_state = decisions[robot.id].next_state;
        robot.contact_latch = false;

        Vec2 a = clamp_norm(decisions[robot.id].force, cfg.max_accel);
        robot.kin.v = clamp_norm(robot.kin.v + a * cfg.dt, cfg.max_speed);
        Vec2 before = robot.kin.p;
        robot.kin.p += robot.kin.v * cfg.dt;

        const double r = cfg.robot_radius;
        if (robot.kin.p.x < r) { robot.kin.p.x = r; robot.kin.v.x = 0; }
        if (robot.kin.p.x > cfg.width - r) { robot.kin.p.x = cfg.width - r; robot.kin.v.x = 0; }
        if (robot.kin.p.y < r) { robot.kin.p.y = r; robot.kin.v.y = 0; }
        if (robot.kin.p.y > cfg.height - r) { robot.kin.p.y = cfg.height - r; robot.kin.v.y = 0; }
        robot.distance += (robot.kin.p - before).norm();
    }

    // Held attractors ride their holder.
    for (AttractorState& a : w.attractors)
        if (a.status == AttractorStatus::Held) a.position = w.robots.at(a.holder).kin.p;

    // Grippers: attach in id order (lowest id wins contested objects), then
    // release into bins. A robot that just entered DELIVER keeps its load;
    // one that just entered ACQUIRE may grab immediately.
    for (RobotState& robot : w.robots) {
        const std::string& state = robot.fsm_state.label;
        bool acquiring = state == "ACQUIRE_RED" || state == "ACQUIRE_BLUE";
        if (acquiring && !robot.gripper) {
            Color want = state == "ACQUIRE_RED" ? Color::Red : Color::Blue;
            int best = -1;
            double best_d = 0;
            for (const AttractorState& a : w.attractors) {
                if (a.status != AttractorStatus::Free || a.color != want) continue;
                double d = (a.position - robot.kin.p).norm();
                if (d <= cfg.schema.grip_radius && (best < 0 || d < best_d)) {
                    best = a.id;
                    best_d = d;
                }
            }
            if (best >= 0) {
                AttractorState& a = w.attractors[best];
                a.status = AttractorStatus::Held;
                a.holder = robot.id;
                a.position = robot.kin.p;
                robot.gripper = best;
                WorldEvent e;
                e.type = "pickup";
                e.robot = robot.id;
                e.attractor = best;
                e.color = a.color;
                w.events.push_back(e);
            }
        }
        bool delivering = state == "DELIVER_RED" || state == "DELIVER_BLUE";
        if (delivering && robot.gripper) {
            Color want = state == "DELIVER_RED" ? Color::Red : Color::Blue;
            AttractorState& a = w.attractors.at(*robot.gripper);
            Vec2 bin = want == Color::Red ? cfg.red_bin : cfg.blue_bin;
            if (a.color == want && (robot.kin.p - bin).norm() <= cfg.schema.bin_radius) {
                a.status = AttractorStatus::Delivered;
                a.holder = -1;
                a.position = robot.kin.p;
                robot.gripper.reset();
                WorldEvent e;
                e.type = "delivered";
                e.robot = robot.id;
                e.attractor = a.id;
                e.color = a.color;
                w.events.push_back(e);
            }
        }
    }

    // Ball: kicks against post-integration robots, then friction, motion,
    // goal detection and wall bounces.
    if (w.ball) {
        KinematicState& ball = *w.ball;
        for (RobotState& robot : w.robots) {
            Vec2 offset = ball.p - robot.kin.p;
            double dist = offset.norm();
            double touch = cfg.robot_radius + cfg.ball_radius;
            if (dist > touch || dist == 0.0) continue;
            Vec2 n = offset / dist;
            double s = robot.kin.v.dot(n);
            double b = ball.v.dot(n);
            // A driving robot boosts the ball ahead of it; a ball rolling
            // into a body rebounds off it. Either way the contact latches
            // the robot's hit condition.
            robot.contact_latch = true;
            double after = std::max(cfg.kick_restitution * s,
                                    -cfg.ball_wall_restitution * std::min(b, 0.0));
            if (after > b) {
                ball.v += n * (after - b);
                WorldEvent e;
                e.type = "hit_ball";
                e.robot = robot.id;
                e.normal = n;
                e.speed_before = b;
                e.speed_after = after;
                w.events.push_back(e);
            }
            ball.p = robot.kin.p + n * touch;  // push out of overlap either way
        }
        ball.v *= std::max(0.0, 1.0 - cfg.ball_friction * cfg.dt);
        ball.p += ball.v * cfg.dt;

        if (auto goal = resolve_ball_bounds(w, ball)) {
            w.score[goal->scorer] += 1;
            WorldEvent e;
            e.type = "goal";
            e.team = goal->scorer;
            w.events.push_back(e);
            ball = {{cfg.width / 2, cfg.height / 2}, {}};
            w.stall_anchor = ball.p;
            w.stall_anchor_tick = w.tick;
        }

        // Referee drop: a ball that has gone nowhere for a whole stall
        // window (wedged in a pile or resting beyond every sensor) returns
        // to the center so play resumes.
        if (w.tick - w.stall_anchor_tick >= cfg.stall_window) {
            if ((ball.p - w.stall_anchor).norm() < cfg.stall_distance) {
                ball = {{cfg.width / 2, cfg.height / 2}, {}};
                WorldEvent e;
                e.type = "ball_reset";
                w.events.push_back(e);
            }
            w.stall_anchor = ball.p;
            w.stall_anchor_tick = w.tick;
        }
    }

    check_all_delivered(w);
    w.tick += 1;
}

WorldState step_world(const WorldState& world) {
    WorldState next = world;
    advance(next);
    return next;
}

std::map<AttractorStatus, int> attractor_census(const WorldState& world) {
    std::map<AttractorStatus, int> census{{AttractorStatus::Free, 0},
                                          {AttractorStatus::Held, 0},
                                          {AttractorStatus::Delivered, 0}};
    for (const auto& a : world.attractors) census[a.status] += 1;
    return census;
}

}  // namespace mrsim
