#include "mrsim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "mrsim/svg.hpp"

namespace mrsim {

namespace {

using nlohmann::json;

KinematicState parse_kin(const json& j, const char* what) {
    if (!j.is_object() || !j.contains("x") || !j.contains("y"))
        throw PlotError(std::string("snapshot: ") + what + " needs numeric x and y");
    KinematicState k;
    k.p = {j.at("x").get<double>(), j.at("y").get<double>()};
    k.v = {j.value("vx", 0.0), j.value("vy", 0.0)};
    return k;
}

void parse_params(const json& j, SchemaParams& params) {
    params.sensor_range = j.value("sensor_range", params.sensor_range);
    params.behind_offset = j.value("behind_offset", params.behind_offset);
    params.ball_close_radius = j.value("ball_close_radius", params.ball_close_radius);
    params.ball_near_goal_radius = j.value("ball_near_goal_radius", params.ball_near_goal_radius);
    params.wander_gain = j.value("wander_gain", params.wander_gain);
    params.wander_period = j.value("wander_period", params.wander_period);
    if (j.contains("attractive")) {
        const json& a = j.at("attractive");
        params.attr.alpha_p = a.value("alpha_p", params.attr.alpha_p);
        params.attr.alpha_v = a.value("alpha_v", params.attr.alpha_v);
        params.attr.m = a.value("m", params.attr.m);
        params.attr.n = a.value("n", params.attr.n);
    }
    auto rep_block = [&](const char* key, RepulsiveParams& r) {
        if (!j.contains(key)) return;
        const json& b = j.at(key);
        r.eta = b.value("eta", r.eta);
        r.rho0 = b.value("rho0", r.rho0);
        r.a_max = b.value("a_max", r.a_max);
        r.f_max = b.value("f_max", r.f_max);
    };
    rep_block("repulsive", params.rep);
    rep_block("wall_repulsive", params.wall_rep);
}

FieldGeometry snapshot_geometry(const ForceSnapshot& s) {
    FieldGeometry g;
    g.width = s.width;
    g.height = s.height;
    const double lo = s.height / 2 - s.goal_width / 2;
    const double hi = s.height / 2 + s.goal_width / 2;
    g.goals[Team::A] = {{0.0, lo}, {0.0, hi}};
    g.goals[Team::B] = {{s.width, lo}, {s.width, hi}};
    g.home_base = {s.width / 2, s.height / 2};
    return g;
}

RobotView snapshot_view(const ForceSnapshot& s, const FieldGeometry& geometry,
                        const KinematicState& self) {
    RobotView view;
    view.self = self;
    view.team = s.team;
    view.role = Role::Forward;
    view.geometry = &geometry;
    view.assigned_sectors = sectors_for_role(view.role);
    view.home = s.robot.p;
    if ((s.ball.p - self.p).norm() <= s.params.sensor_range) view.ball = s.ball;
    for (const auto& other : s.others)
        if ((other.p - self.p).norm() <= s.params.sensor_range) view.opponents.push_back(other);
    return view;
}

const std::string& state_color(const std::string& state) {
    static const std::map<std::string, std::string> palette{
        {"OFF", "#888888"},          {"WANDER", "#1f77b4"},
        {"ACQUIRE_RED", "#d62728"},  {"ACQUIRE_BLUE", "#17becf"},
        {"DELIVER_RED", "#8c2d04"},  {"DELIVER_BLUE", "#084594"},
        {"GO_TO_BALL", "#2ca02c"},   {"BEHIND_BALL", "#9467bd"},
        {"DEFEND", "#ff7f0e"},
    };
    static const std::string fallback = "#000000";
    auto it = palette.find(state);
    return it == palette.end() ? fallback : it->second;
}

constexpr double kScale = 40.0;   // pixels per meter
constexpr double kMargin = 24.0;  // page border

struct Page {
    double width, height;  // field size in meters
    Vec2 map(Vec2 world) const {
        return {kMargin + world.x * kScale, kMargin + (height - world.y) * kScale};
    }
};

void draw_goals(SvgWriter& svg, const Page& page, const FieldGeometry& g) {
    for (const auto& [team, goal] : g.goals)
        svg.line(page.map(goal.a), page.map(goal.b), "#444444", 5.0);
}

}  // namespace

ForceSnapshot parse_snapshot(const json& j) {
    if (!j.is_object()) throw PlotError("snapshot: top level must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "schema_version" && key != "field" && key != "behavior" && key != "team" &&
            key != "robot" && key != "ball" && key != "others" && key != "grid" &&
            key != "params")
            throw PlotError("snapshot: unknown key '" + key + "'");
    }
    ForceSnapshot s;
    if (j.value("schema_version", 1) != 1) throw PlotError("snapshot: unsupported schema_version");
    if (j.contains("field")) {
        const json& f = j.at("field");
        s.width = f.value("width", s.width);
        s.height = f.value("height", s.height);
        s.goal_width = f.value("goal_width", s.goal_width);
    }
    if (!j.contains("behavior")) throw PlotError("snapshot: missing 'behavior'");
    s.behavior = j.at("behavior").get<std::string>();
    const std::string team = j.value("team", "A");
    if (team != "A" && team != "B") throw PlotError("snapshot: team must be 'A' or 'B'");
    s.team = team == "A" ? Team::A : Team::B;
    if (!j.contains("robot")) throw PlotError("snapshot: missing 'robot'");
    s.robot = parse_kin(j.at("robot"), "robot");
    if (!j.contains("ball")) throw PlotError("snapshot: missing 'ball'");
    s.ball = parse_kin(j.at("ball"), "ball");
    if (j.contains("others"))
        for (const auto& o : j.at("others")) s.others.push_back(parse_kin(o, "others entry"));
    if (j.contains("grid")) {
        s.nx = j.at("grid").value("nx", s.nx);
        s.ny = j.at("grid").value("ny", s.ny);
    }
    if (s.nx < 1 || s.ny < 1) throw PlotError("snapshot: grid must be at least 1x1");
    if (!(s.width > 0) || !(s.height > 0)) throw PlotError("snapshot: field must be positive");
    if (j.contains("params")) parse_params(j.at("params"), s.params);
    try {
        s.params.validate();
    } catch (const std::exception& e) {
        throw PlotError(std::string("snapshot: ") + e.what());
    }
    return s;
}

ForceSnapshot load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PlotError("cannot open snapshot file: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw PlotError(path + ": not valid JSON");
    return parse_snapshot(j);
}

SnapshotField evaluate_snapshot(const ForceSnapshot& s) {
    FieldGeometry geometry = snapshot_geometry(s);
    SnapshotField field;

    RobotView at_robot = snapshot_view(s, geometry, s.robot);
    field.robot_force = schema_force(s.behavior, at_robot, s.params, WanderRng{});
    auto target = schema_target(s.behavior, at_robot, s.params);
    field.target = target ? target->p : s.robot.p;

    const double cell_x = s.width / s.nx;
    const double cell_y = s.height / s.ny;
    for (int iy = 0; iy < s.ny; ++iy) {
        for (int ix = 0; ix < s.nx; ++ix) {
            Vec2 p{(ix + 0.5) * cell_x, (iy + 0.5) * cell_y};
            bool blocked = (p - s.ball.p).norm() < 1e-6;
            for (const auto& other : s.others) blocked = blocked || (p - other.p).norm() < 1e-6;
            if (blocked) continue;
            RobotView probe = snapshot_view(s, geometry, {p, s.robot.v});
            Vec2 f = schema_force(s.behavior, probe, s.params, WanderRng{});
            field.arrows.push_back({p.x, p.y, f.x, f.y});
        }
    }
    return field;
}

std::string render_forcefield_svg(const ForceSnapshot& s) {
    SnapshotField field = evaluate_snapshot(s);
    FieldGeometry geometry = snapshot_geometry(s);
    Page page{s.width, s.height};
    SvgWriter svg(s.width * kScale + 2 * kMargin, s.height * kScale + 2 * kMargin);

    svg.rect(page.map({0, s.height}), s.width * kScale, s.height * kScale, "#000000", "#ffffff");
    draw_goals(svg, page, geometry);

    double strongest = 0.0;
    for (const auto& a : field.arrows) strongest = std::max(strongest, std::hypot(a.fx, a.fy));
    const double cell_px = kScale * std::min(s.width / s.nx, s.height / s.ny);
    for (const auto& a : field.arrows) {
        double magnitude = std::hypot(a.fx, a.fy);
        if (magnitude < 1e-12 || strongest < 1e-12) continue;
        double length = 0.45 * cell_px * (magnitude / strongest);
        Vec2 dir{a.fx / magnitude, -a.fy / magnitude};  // page y is flipped
        Vec2 from = page.map({a.x, a.y});
        svg.arrow(from, from + dir * length, "#3366cc", 1.0);
    }

    for (const auto& other : s.others) svg.circle(page.map(other.p), 6.0, "#999999");
    svg.circle(page.map(s.ball.p), 5.0, "#000000");
    svg.circle(page.map(s.robot.p), 7.0, "#cc2222");
    svg.circle(page.map(field.target), 4.0, "#22aa22");
    if (s.robot.v.norm() > 1e-9) {
        Vec2 from = page.map(s.robot.p);
        Vec2 v{s.robot.v.x, -s.robot.v.y};
        svg.arrow(from, from + v * (0.5 * kScale), "#cc2222", 1.5);
    }
    svg.text({kMargin, kMargin - 8}, s.behavior + " force field", 14.0, "#000000");
    return svg.str();
}

std::string render_trajectory_svg(const std::vector<TraceRecord>& records) {
    double width = 20.0, height = 20.0;
    nlohmann::ordered_json scenario;
    if (!records.empty())
        for (const auto& e : records.front().at("events"))
            if (e.value("type", "") == "scenario") {
                scenario = e;
                width = e.at("width").get<double>();
                height = e.at("height").get<double>();
            }

    Page page{width, height};
    const double legend_width = 170.0;
    SvgWriter svg(width * kScale + 2 * kMargin + legend_width, height * kScale + 2 * kMargin);
    svg.rect(page.map({0, height}), width * kScale, height * kScale, "#000000", "#ffffff");

    if (!scenario.is_null() && scenario.value("kind", "") == "foraging") {
        double r = scenario.value("bin_radius", 0.5) * kScale;
        auto bin = [&](const char* key, const std::string& color) {
            if (!scenario.contains(key)) return;
            Vec2 c{scenario.at(key)[0].get<double>(), scenario.at(key)[1].get<double>()};
            svg.circle(page.map(c), r, color);
        };
        bin("red_bin", "#f4b6b6");
        bin("blue_bin", "#b6c8f4");
    }
    if (!scenario.is_null() && scenario.value("kind", "") == "soccer") {
        double gw = scenario.value("goal_width", 4.0);
        FieldGeometry g;
        g.width = width;
        g.height = height;
        g.goals[Team::A] = {{0, height / 2 - gw / 2}, {0, height / 2 + gw / 2}};
        g.goals[Team::B] = {{width, height / 2 - gw / 2}, {width, height / 2 + gw / 2}};
        draw_goals(svg, page, g);
    }

    // Gather per-robot paths, split into runs of one state.
    struct Run {
        std::string state;
        std::vector<Vec2> points;
    };
    std::map<int, std::vector<Run>> paths;
    std::vector<Vec2> ball_path;
    std::vector<std::string> states_seen;
    for (const auto& rec : records) {
        for (const auto& r : rec.at("robots")) {
            int id = r.at("id").get<int>();
            Vec2 p = page.map({r.at("x").get<double>(), r.at("y").get<double>()});
            std::string state = r.at("state").get<std::string>();
            auto& runs = paths[id];
            if (runs.empty() || runs.back().state != state) {
                Run run;
                run.state = state;
                if (!runs.empty()) run.points.push_back(runs.back().points.back());
                runs.push_back(std::move(run));
            }
            runs.back().points.push_back(p);
            if (std::find(states_seen.begin(), states_seen.end(), state) == states_seen.end())
                states_seen.push_back(state);
        }
        if (rec.contains("ball"))
            ball_path.push_back(page.map(
                {rec.at("ball").at("x").get<double>(), rec.at("ball").at("y").get<double>()}));
    }

    svg.polyline(ball_path, "#aaaaaa", 1.0);
    for (const auto& [id, runs] : paths) {
        for (const auto& run : runs) svg.polyline(run.points, state_color(run.state), 1.5);
        if (!runs.empty() && !runs.front().points.empty()) {
            svg.circle(runs.front().points.front(), 3.0, "#ffffff");
            svg.circle(runs.back().points.back(), 3.0, state_color(runs.back().state));
        }
    }

    Vec2 legend{width * kScale + 2 * kMargin, kMargin + 10};
    svg.text(legend, "states", 12.0, "#000000");
    for (size_t i = 0; i < states_seen.size(); ++i) {
        Vec2 at{legend.x, legend.y + 18.0 * (i + 1)};
        svg.circle({at.x + 4, at.y - 4}, 4.0, state_color(states_seen[i]));
        svg.text({at.x + 14, at.y}, states_seen[i], 11.0, "#000000");
    }
    return svg.str();
}

}  // namespace mrsim
