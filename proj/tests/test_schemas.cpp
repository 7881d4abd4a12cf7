#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mrsim/assemblage.hpp"
#include "mrsim/rng.hpp"
#include "mrsim/schemas.hpp"

using namespace mrsim;
using doctest::Approx;

namespace {

FieldGeometry foraging_field() {
    FieldGeometry g;
    g.width = 20;
    g.height = 20;
    g.bins = {{Color::Red, {8, 2}}, {Color::Blue, {12, 2}}};
    g.home_base = {10, 2};
    return g;
}

FieldGeometry soccer_field() {
    FieldGeometry g;
    g.width = 18;
    g.height = 12;
    g.goals = {{Team::A, {{0, 4}, {0, 8}}}, {Team::B, {{18, 4}, {18, 8}}}};
    return g;
}

RobotView forager_view(const FieldGeometry& g) {
    RobotView v;
    v.self = {{10, 10}, {0, 0}};
    v.role = Role::Forager;
    v.geometry = &g;
    v.home = {10, 2};
    return v;
}

RobotView forward_view(const FieldGeometry& g) {
    RobotView v;
    v.self = {{14, 7}, {0, 0}};
    v.team = Team::A;
    v.role = Role::Forward;
    v.geometry = &g;
    v.assigned_sectors = sectors_for_role(Role::Forward);
    v.home = {14.5, 7.5};
    return v;
}

bool holds(const RobotView& view, const SchemaParams& params, const std::string& name,
           int state = 0) {
    auto active = evaluate_releasers(view, params, {state});
    return std::find(active.begin(), active.end(), name) != active.end();
}

std::string file_bytes(const std::string& relative) {
    std::ifstream in(std::string(MRSIM_SOURCE_ROOT) + "/" + relative, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("role names round-trip") {
    for (Role r : {Role::Forager, Role::Forward, Role::GoalKeeper, Role::CenterHalf,
                   Role::OutsideLeft, Role::OutsideRight}) {
        auto back = parse_role(to_string(r));
        REQUIRE(back.has_value());
        CHECK(*back == r);
    }
    CHECK_FALSE(parse_role("striker").has_value());
    CHECK_FALSE(parse_role("").has_value());
}

TEST_CASE("field players share one machine, keeper and forager have their own") {
    const Fsm& fwd = assemblage_for_role(Role::Forward);
    CHECK(&assemblage_for_role(Role::CenterHalf) == &fwd);
    CHECK(&assemblage_for_role(Role::OutsideLeft) == &fwd);
    CHECK(&assemblage_for_role(Role::OutsideRight) == &fwd);
    CHECK(&assemblage_for_role(Role::GoalKeeper) != &fwd);
    CHECK(assemblage_for_role(Role::Forager).states.size() == 6);
    CHECK(fwd.states.size() == 4);
    CHECK(assemblage_for_role(Role::GoalKeeper).states.size() == 4);
}

TEST_CASE("embedded sources match the shipped notation files") {
    CHECK(assemblage_source_for_role(Role::Forager) ==
          file_bytes("data/assemblages/hom_for.asm.txt"));
    CHECK(assemblage_source_for_role(Role::Forward) ==
          file_bytes("data/assemblages/forward.asm.txt"));
    CHECK(assemblage_source_for_role(Role::GoalKeeper) ==
          file_bytes("data/assemblages/goal_keeper.asm.txt"));
    CHECK(assemblage_source_for_role(Role::CenterHalf) ==
          assemblage_source_for_role(Role::Forward));
}

TEST_CASE("role sectors") {
    CHECK(sectors_for_role(Role::Forager).empty());
    CHECK(sectors_for_role(Role::Forward) == std::vector<Sector>{{1, 1}, {1, 2}, {1, 3}});
    CHECK(sectors_for_role(Role::OutsideLeft) == std::vector<Sector>{{2, 3}, {3, 3}});
    CHECK(sectors_for_role(Role::OutsideRight) == std::vector<Sector>{{2, 1}, {3, 1}});
    CHECK(sectors_for_role(Role::CenterHalf) == std::vector<Sector>{{2, 2}});
    CHECK(sectors_for_role(Role::GoalKeeper) == std::vector<Sector>{{3, 2}});
}

TEST_CASE("wander heading is unit length and resamples per period block") {
    WanderRng rng{42, 0};
    Vec2 first = wander_heading(rng, 40);
    CHECK(first.norm() == Approx(1.0));
    for (long t = 0; t < 40; ++t) {
        rng.tick = t;
        CHECK(wander_heading(rng, 40) == first);
    }
    rng.tick = 40;
    CHECK(wander_heading(rng, 40) != first);
    CHECK(wander_heading({43, 0}, 40) != first);
    CHECK_THROWS_AS(wander_heading(rng, 0), std::invalid_argument);
}

TEST_CASE("lifecycle and attractor releasers") {
    FieldGeometry g = foraging_field();
    RobotView v = forager_view(g);
    SchemaParams params;

    CHECK_FALSE(holds(v, params, "on"));
    v.lifecycle = "on";
    CHECK(holds(v, params, "on"));
    CHECK_FALSE(holds(v, params, "off"));
    v.lifecycle = "off";
    CHECK(holds(v, params, "off"));

    // No attractors in sight: the negated forms hold.
    CHECK_FALSE(holds(v, params, "red_visible"));
    CHECK(holds(v, params, "not_red_visible"));

    v.attractors.push_back({Color::Red, {12, 10}});
    CHECK(holds(v, params, "red_visible"));
    CHECK_FALSE(holds(v, params, "not_red_visible"));
    CHECK_FALSE(holds(v, params, "blue_visible"));

    // Claimed attractors and ones beyond sensor range do not count.
    v.attractors[0].claimed = true;
    CHECK_FALSE(holds(v, params, "red_visible"));
    v.attractors[0] = {Color::Blue, {10, 10 + params.sensor_range + 0.1}};
    CHECK_FALSE(holds(v, params, "blue_visible"));

    CHECK_FALSE(holds(v, params, "red_in_gripper"));
    v.gripper = Color::Red;
    CHECK(holds(v, params, "red_in_gripper"));
    CHECK_FALSE(holds(v, params, "blue_in_gripper"));

    CHECK_FALSE(holds(v, params, "close_to_red_bin"));
    v.self.p = {8.2, 2};  // within bin_radius 0.5 of the red bin
    CHECK(holds(v, params, "close_to_red_bin"));
    CHECK_FALSE(holds(v, params, "close_to_blue_bin"));
}

TEST_CASE("visibility negations are exact complements") {
    SplitMix64 rng(555);
    FieldGeometry g = foraging_field();
    SchemaParams params;
    for (int i = 0; i < 200; ++i) {
        RobotView v = forager_view(g);
        v.self.p = {rng.next_in(0, 20), rng.next_in(0, 20)};
        int count = static_cast<int>(rng.next_below(5));
        for (int k = 0; k < count; ++k) {
            v.attractors.push_back({rng.next_unit() < 0.5 ? Color::Red : Color::Blue,
                                    {rng.next_in(0, 20), rng.next_in(0, 20)},
                                    rng.next_unit() < 0.3});
        }
        CHECK(holds(v, params, "red_visible") != holds(v, params, "not_red_visible"));
        CHECK(holds(v, params, "blue_visible") != holds(v, params, "not_blue_visible"));
    }
}

TEST_CASE("ball releasers gate on zone membership and distance") {
    FieldGeometry g = soccer_field();
    SchemaParams params;
    params.sensor_range = 6;
    RobotView v = forward_view(g);

    CHECK_FALSE(holds(v, params, "ball_visible"));  // no ball sensed
    v.ball = KinematicState{{14, 6}, {0, 0}};       // sector (1,2) for team A
    CHECK(holds(v, params, "ball_visible"));

    // Same distance, but the ball sits in midfield: out of the forward's zone.
    v.ball->p = {9, 6};
    v.self.p = {9.5, 6};
    CHECK_FALSE(holds(v, params, "ball_visible"));
    // close_to_ball is pure proximity, no zone gate.
    CHECK(holds(v, params, "close_to_ball"));
    v.ball->p = {9.5 - params.ball_close_radius - 0.01, 6};
    CHECK_FALSE(holds(v, params, "close_to_ball"));

    // hit_ball reflects the contact latch.
    CHECK_FALSE(holds(v, params, "hit_ball"));
    v.hit_latch = true;
    CHECK(holds(v, params, "hit_ball"));

    // ball_close keys on the ball's distance to the robot's own goal.
    RobotView keeper = forward_view(g);
    keeper.role = Role::GoalKeeper;
    keeper.assigned_sectors = sectors_for_role(Role::GoalKeeper);
    keeper.self.p = {2, 6};
    keeper.ball = KinematicState{{1.2, 6}, {0, 0}};  // 1.2 from goal center (0,6)
    params.ball_near_goal_radius = 1.5;
    CHECK(holds(keeper, params, "ball_close"));
    keeper.ball->p = {4, 6};
    CHECK_FALSE(holds(keeper, params, "ball_close"));
}

TEST_CASE("active releasers come in transition-priority order") {
    FieldGeometry g = foraging_field();
    RobotView v = forager_view(g);
    SchemaParams params;
    v.lifecycle = "off";
    v.attractors.push_back({Color::Red, {11, 10}});
    v.attractors.push_back({Color::Blue, {9, 10}});

    const Fsm& fsm = assemblage_for_role(Role::Forager);
    auto active = evaluate_releasers(v, params, fsm.state_id(*fsm.index_of("WANDER")));
    // WANDER's alternatives fire first in source order; nothing else holds.
    CHECK(active == std::vector<std::string>{"red_visible", "blue_visible", "off"});

    active = evaluate_releasers(v, params, fsm.state_id(*fsm.index_of("OFF")));
    // From OFF the outgoing "on" fails, so alphabet order decides.
    CHECK(active == std::vector<std::string>{"red_visible", "blue_visible", "off"});
}

TEST_CASE("targets for foraging behaviors") {
    FieldGeometry g = foraging_field();
    RobotView v = forager_view(g);
    SchemaParams params;

    CHECK_FALSE(schema_target("OFF", v, params).has_value());
    CHECK_FALSE(schema_target("WANDER", v, params).has_value());
    CHECK_FALSE(schema_target("ACQUIRE_RED", v, params).has_value());

    v.attractors.push_back({Color::Red, {12, 10}});
    v.attractors.push_back({Color::Red, {11, 10}});
    v.attractors.push_back({Color::Red, {10.5, 10}, true});  // claimed: skipped
    v.attractors.push_back({Color::Blue, {10.2, 10}});
    auto t = schema_target("ACQUIRE_RED", v, params);
    REQUIRE(t.has_value());
    CHECK(t->p == Vec2{11, 10});  // nearest unclaimed red
    CHECK(t->v == Vec2{0, 0});

    t = schema_target("DELIVER_BLUE", v, params);
    REQUIRE(t.has_value());
    CHECK(t->p == Vec2{12, 2});

    CHECK_THROWS_AS((void)schema_target("JUGGLE", v, params), std::invalid_argument);
}

TEST_CASE("ball pursuit targets respect the zone gate") {
    FieldGeometry g = soccer_field();
    SchemaParams params;
    RobotView v = forward_view(g);
    v.ball = KinematicState{{14, 6}, {0.3, -0.2}};

    auto t = schema_target("GO_TO_BALL", v, params);
    REQUIRE(t.has_value());
    CHECK(t->p == v.ball->p);
    CHECK(t->v == v.ball->v);

    // Ball out of the forward's sectors: fall back to the home anchor.
    v.ball->p = {9, 6};
    t = schema_target("GO_TO_BALL", v, params);
    REQUIRE(t.has_value());
    CHECK(t->p == v.home);
    CHECK(t->v == Vec2{0, 0});

    // No ball sensed at all: same fallback.
    v.ball.reset();
    t = schema_target("BEHIND_BALL", v, params);
    REQUIRE(t.has_value());
    CHECK(t->p == v.home);
}

TEST_CASE("defend midpoint between ball and own goal") {
    FieldGeometry g = soccer_field();
    SchemaParams params;
    RobotView v = forward_view(g);
    v.role = Role::GoalKeeper;
    v.assigned_sectors = sectors_for_role(Role::GoalKeeper);
    v.self.p = {2, 6};
    v.ball = KinematicState{{4, 6}, {1, 0}};  // sector (3,2) for team A

    auto t = schema_target("DEFEND", v, params);
    REQUIRE(t.has_value());
    CHECK(t->p == Vec2{2, 6});  // midpoint of (4,6) and goal center (0,6)
    CHECK(t->v == Vec2{0.5, 0});

    v.ball->p = {9, 3};  // out of the keeper's sector
    t = schema_target("DEFEND", v, params);
    REQUIRE(t.has_value());
    CHECK(t->p == v.home);
}

TEST_CASE("behind-ball staging flips to the ball once aligned") {
    FieldGeometry g = soccer_field();
    SchemaParams params;
    params.behind_offset = 1.0;
    RobotView v = forward_view(g);
    v.ball = KinematicState{{14, 6}, {0, 0}};
    // Opponent goal center (18,6); staging direction from goal through ball
    // is (-1,0), so the staging point is one unit short of the ball.

    v.self.p = {14, 9};  // beside the ball: not aligned
    auto t = schema_target("BEHIND_BALL", v, params);
    REQUIRE(t.has_value());
    CHECK(t->p == Vec2{13, 6});

    v.self.p = {13, 6.1};  // within the 45-degree cone behind the ball
    t = schema_target("BEHIND_BALL", v, params);
    REQUIRE(t.has_value());
    CHECK(t->p == v.ball->p);
}

TEST_CASE("off produces exactly zero force") {
    FieldGeometry g = soccer_field();
    SchemaParams params;
    RobotView v = forward_view(g);
    v.ball = KinematicState{{14, 6}, {0, 0}};
    v.teammates.push_back({{14.5, 7}, {0, 0}});
    CHECK(schema_force("OFF", v, params, {1, 0}) == Vec2{0, 0});
}

TEST_CASE("acquire force points at the attractor when nothing else intrudes") {
    RobotView v;  // no geometry: no walls
    v.self = {{3, 3}, {0, 0}};
    v.role = Role::Forager;
    v.attractors.push_back({Color::Blue, {6, 7}});
    SchemaParams params;
    Vec2 f = schema_force("ACQUIRE_BLUE", v, params, {9, 0});
    Vec2 dir = (Vec2{6, 7} - v.self.p).normalized();
    CHECK(f.norm() > 0.0);
    CHECK(f.normalized().x == Approx(dir.x));
    CHECK(f.normalized().y == Approx(dir.y));
}

TEST_CASE("wander force is the scaled heading for an unobstructed forager") {
    RobotView v;
    v.self = {{3, 3}, {0, 0}};
    v.role = Role::Forager;
    SchemaParams params;
    params.wander_gain = 2.5;
    WanderRng rng{7, 120};
    Vec2 expected = wander_heading(rng, params.wander_period) * params.wander_gain;
    Vec2 f = schema_force("WANDER", v, params, rng);
    CHECK(f.x == Approx(expected.x));
    CHECK(f.y == Approx(expected.y));
    CHECK(schema_force("WANDER", v, params, rng) == f);  // pure in (seed, tick)
}

TEST_CASE("off-zone players wandering feel the home pull, foragers do not") {
    FieldGeometry g = soccer_field();
    SchemaParams params;
    RobotView v = forward_view(g);
    v.self = {{9, 6}, {0, 0}};  // midfield, outside the forward rows
    v.home = {14.5, 7.5};
    WanderRng rng{11, 0};

    Vec2 soccer_f = schema_force("WANDER", v, params, rng);
    Vec2 base = wander_heading(rng, params.wander_period) * params.wander_gain;
    Vec2 pull = soccer_f - base;
    // The residue beyond the wander heading points home.
    CHECK(pull.norm() > 0.1);
    Vec2 dir = (v.home - v.self.p).normalized();
    CHECK(pull.normalized().x == Approx(dir.x));
    CHECK(pull.normalized().y == Approx(dir.y));

    RobotView forager;
    forager.self = v.self;
    forager.role = Role::Forager;
    forager.home = v.home;
    Vec2 forager_f = schema_force("WANDER", forager, params, rng);
    CHECK(forager_f.x == Approx(base.x));
    CHECK(forager_f.y == Approx(base.y));
}

TEST_CASE("unaligned behind-ball approach is repelled by the ball") {
    FieldGeometry g = soccer_field();
    SchemaParams params;
    RobotView v = forward_view(g);
    v.ball = KinematicState{{14, 6}, {0, 0}};
    v.self = {{14, 7}, {0, -0.5}};  // closing on the ball from the side

    auto target = schema_target("BEHIND_BALL", v, params);
    REQUIRE(target.has_value());
    Vec2 expected = attractive_force(v.self, {target->p, target->v}, params.attr) +
                    repulsive_force(v.self, *v.ball, params.rep).force;
    Vec2 f = schema_force("BEHIND_BALL", v, params, {0, 0});
    CHECK(f.x == Approx(expected.x));
    CHECK(f.y == Approx(expected.y));

    // Aligned: the repulsion drops so the robot can reach the ball.
    v.self = {{13.3, 6.1}, {0, 0}};
    target = schema_target("BEHIND_BALL", v, params);
    REQUIRE(target.has_value());
    CHECK(target->p == v.ball->p);
    expected = attractive_force(v.self, {target->p, target->v}, params.attr);
    f = schema_force("BEHIND_BALL", v, params, {0, 0});
    CHECK(f.x == Approx(expected.x));
    CHECK(f.y == Approx(expected.y));
}

TEST_CASE("nearby robots repel while walls stay quiet far from the edge") {
    FieldGeometry g = soccer_field();
    SchemaParams params;
    RobotView v = forward_view(g);
    v.self = {{14, 6.5}, {0, -0.5}};
    v.ball = KinematicState{{14, 5}, {0, 0}};
    v.opponents.push_back({{14, 6}, {0, 0}});  // directly in the approach path

    Vec2 with_block = schema_force("GO_TO_BALL", v, params, {0, 0});
    v.opponents.clear();
    Vec2 clear_path = schema_force("GO_TO_BALL", v, params, {0, 0});
    Vec2 diff = with_block - clear_path;
    CHECK(diff.norm() > 0.0);
    CHECK(diff.y > 0.0);  // the block pushes the robot back up
    Vec2 manual = repulsive_force(v.self, {{14, 6}, {0, 0}}, params.rep).force;
    CHECK(diff.x == Approx(manual.x));
    CHECK(diff.y == Approx(manual.y));
}

TEST_CASE("schema params validate their knobs") {
    SchemaParams params;
    CHECK_NOTHROW(params.validate());
    params.wander_period = 0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params = {};
    params.sensor_range = -1;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params = {};
    params.attr.alpha_p = 0;
    CHECK_THROWS_AS(params.validate(), std::domain_error);
}
