#include "mrsim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mrsim {

namespace {

std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string_view::npos) return "";
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& message) {
    throw ConfigError(path + ":" + std::to_string(line) + ": " + message);
}

double parse_number(const std::string& value, const std::string& path, int line) {
    try {
        size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) fail(path, line, "trailing characters in number '" + value + "'");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail(path, line, "expected a number, got '" + value + "'");
    }
}

long parse_integer(const std::string& value, const std::string& path, int line) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        fail(path, line, "expected an integer, got '" + value + "'");
    return v;
}

Vec2 parse_pair(const std::string& value, const std::string& path, int line) {
    std::istringstream in(value);
    std::string a, b, rest;
    if (!(in >> a >> b) || (in >> rest))
        fail(path, line, "expected two numbers 'x y', got '" + value + "'");
    return {parse_number(a, path, line), parse_number(b, path, line)};
}

}  // namespace

const char* to_string(ScenarioKind kind) {
    return kind == ScenarioKind::Foraging ? "foraging" : "soccer";
}

void ScenarioConfig::validate() const {
    auto require = [](bool ok, const std::string& message) {
        if (!ok) throw ConfigError("config: " + message);
    };
    require(schema_version == 1, "unsupported schema_version (expected 1)");
    require(width > 0 && height > 0, "field dimensions must be positive");
    require(dt > 0, "dt must be positive");
    require(step_limit >= 0, "step_limit must be nonnegative");
    require(max_speed > 0 && max_accel > 0, "max_speed and max_accel must be positive");
    require(robot_radius > 0 && robot_radius * 2 < std::min(width, height),
            "robot_radius must be positive and fit the field");
    require(!robots.empty(), "roster is empty");
    for (size_t i = 0; i < robots.size(); ++i) {
        const Vec2 p = robots[i].start;
        require(p.x >= robot_radius && p.x <= width - robot_radius && p.y >= robot_radius &&
                    p.y <= height - robot_radius,
                "robot " + std::to_string(i) + " starts outside the field");
    }
    try {
        schema.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: schema params: ") + e.what());
    }
    if (kind == ScenarioKind::Foraging) {
        require(red_attractors >= 0 && blue_attractors >= 0, "attractor counts must be >= 0");
        FieldGeometry g = geometry_for(*this);
        require(g.contains(red_bin) && g.contains(blue_bin) && g.contains(home_base),
                "bins and home base must lie inside the field");
        require(placement_margin >= 0 && attractor_spacing >= 0,
                "placement margins must be nonnegative");
        for (const auto& r : robots)
            require(r.role == Role::Forager, "foraging rosters accept only forager robots");
    } else {
        require(goal_width > 0 && goal_width <= height, "goal_width must fit the field height");
        require(ball_radius > 0, "ball_radius must be positive");
        require(ball_friction >= 0 && ball_friction * dt < 1,
                "ball_friction must be nonnegative and keep friction*dt below 1");
        require(kick_restitution > 0, "kick_restitution must be positive");
        require(ball_wall_restitution >= 0 && ball_wall_restitution <= 1,
                "ball_wall_restitution must be in [0, 1]");
        require(stall_window > 0, "stall_window must be positive");
        require(stall_distance >= 0, "stall_distance must be nonnegative");
        for (const auto& r : robots)
            require(r.role != Role::Forager, "soccer rosters accept only soccer roles");
    }
}

ScenarioConfig parse_config(const std::string& text, const std::string& path) {
    ScenarioConfig config;
    // Scenario files must spell out their roster; the struct defaults above
    // only back fill scalar knobs.
    config.robots.clear();

    std::istringstream in(text);
    std::string raw;
    int line = 0;
    std::string section;
    bool saw_version = false;

    while (std::getline(in, raw)) {
        ++line;
        std::string stripped = raw;
        if (size_t hash = stripped.find('#'); hash != std::string::npos)
            stripped.erase(hash);
        stripped = trim(stripped);
        if (stripped.empty()) continue;

        if (stripped.front() == '[') {
            if (stripped.back() != ']') fail(path, line, "unterminated section header");
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section != "scenario" && section != "field" && section != "foraging" &&
                section != "soccer" && section != "schema" && section != "attractive" &&
                section != "repulsive" && section != "wall_repulsive" && section != "robot")
                fail(path, line, "unknown section [" + section + "]");
            if (section == "robot") config.robots.push_back({});
            continue;
        }

        size_t eq = stripped.find('=');
        if (eq == std::string::npos) fail(path, line, "expected 'key = value'");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) fail(path, line, "empty key");
        if (value.empty()) fail(path, line, "empty value for '" + key + "'");

        auto num = [&] { return parse_number(value, path, line); };
        auto integer = [&] { return parse_integer(value, path, line); };
        auto pair = [&] { return parse_pair(value, path, line); };

        if (section.empty()) {
            if (key == "schema_version") {
                config.schema_version = static_cast<int>(integer());
                saw_version = true;
            } else {
                fail(path, line, "key '" + key + "' before any section (only schema_version)");
            }
        } else if (section == "scenario") {
            if (key == "kind") {
                if (value == "foraging")
                    config.kind = ScenarioKind::Foraging;
                else if (value == "soccer")
                    config.kind = ScenarioKind::Soccer;
                else
                    fail(path, line, "kind must be 'foraging' or 'soccer'");
            } else if (key == "dt")
                config.dt = num();
            else if (key == "step_limit")
                config.step_limit = integer();
            else if (key == "max_speed")
                config.max_speed = num();
            else if (key == "max_accel")
                config.max_accel = num();
            else
                fail(path, line, "unknown key '" + key + "' in [scenario]");
        } else if (section == "field") {
            if (key == "width")
                config.width = num();
            else if (key == "height")
                config.height = num();
            else if (key == "robot_radius")
                config.robot_radius = num();
            else
                fail(path, line, "unknown key '" + key + "' in [field]");
        } else if (section == "foraging") {
            if (key == "red_attractors")
                config.red_attractors = static_cast<int>(integer());
            else if (key == "blue_attractors")
                config.blue_attractors = static_cast<int>(integer());
            else if (key == "red_bin")
                config.red_bin = pair();
            else if (key == "blue_bin")
                config.blue_bin = pair();
            else if (key == "home_base")
                config.home_base = pair();
            else if (key == "placement_margin")
                config.placement_margin = num();
            else if (key == "attractor_spacing")
                config.attractor_spacing = num();
            else
                fail(path, line, "unknown key '" + key + "' in [foraging]");
        } else if (section == "soccer") {
            if (key == "goal_width")
                config.goal_width = num();
            else if (key == "ball_radius")
                config.ball_radius = num();
            else if (key == "ball_friction")
                config.ball_friction = num();
            else if (key == "kick_restitution")
                config.kick_restitution = num();
            else if (key == "ball_wall_restitution")
                config.ball_wall_restitution = num();
            else if (key == "stall_window")
                config.stall_window = static_cast<int>(num());
            else if (key == "stall_distance")
                config.stall_distance = num();
            else
                fail(path, line, "unknown key '" + key + "' in [soccer]");
        } else if (section == "schema") {
            auto& s = config.schema;
            if (key == "sensor_range")
                s.sensor_range = num();
            else if (key == "grip_radius")
                s.grip_radius = num();
            else if (key == "bin_radius")
                s.bin_radius = num();
            else if (key == "ball_close_radius")
                s.ball_close_radius = num();
            else if (key == "ball_near_goal_radius")
                s.ball_near_goal_radius = num();
            else if (key == "behind_offset")
                s.behind_offset = num();
            else if (key == "wander_period")
                s.wander_period = static_cast<int>(integer());
            else if (key == "wander_gain")
                s.wander_gain = num();
            else
                fail(path, line, "unknown key '" + key + "' in [schema]");
        } else if (section == "attractive") {
            auto& a = config.schema.attr;
            if (key == "alpha_p")
                a.alpha_p = num();
            else if (key == "alpha_v")
                a.alpha_v = num();
            else if (key == "m")
                a.m = num();
            else if (key == "n")
                a.n = num();
            else
                fail(path, line, "unknown key '" + key + "' in [attractive]");
        } else if (section == "repulsive" || section == "wall_repulsive") {
            auto& r = section == "repulsive" ? config.schema.rep : config.schema.wall_rep;
            if (key == "eta")
                r.eta = num();
            else if (key == "rho0")
                r.rho0 = num();
            else if (key == "a_max")
                r.a_max = num();
            else if (key == "f_max")
                r.f_max = num();
            else
                fail(path, line, "unknown key '" + key + "' in [" + section + "]");
        } else if (section == "robot") {
            if (config.robots.empty()) fail(path, line, "robot key outside a [robot] section");
            auto& robot = config.robots.back();
            if (key == "team") {
                if (value == "A")
                    robot.team = Team::A;
                else if (value == "B")
                    robot.team = Team::B;
                else
                    fail(path, line, "team must be 'A' or 'B'");
            } else if (key == "role") {
                auto role = parse_role(value);
                if (!role) fail(path, line, "unknown role '" + value + "'");
                robot.role = *role;
            } else if (key == "start") {
                robot.start = pair();
            } else {
                fail(path, line, "unknown key '" + key + "' in [robot]");
            }
        }
    }

    if (!saw_version) throw ConfigError(path + ": missing schema_version");
    try {
        config.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return config;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path);
}

FieldGeometry geometry_for(const ScenarioConfig& config) {
    FieldGeometry g;
    g.width = config.width;
    g.height = config.height;
    if (config.kind == ScenarioKind::Foraging) {
        g.bins[Color::Red] = config.red_bin;
        g.bins[Color::Blue] = config.blue_bin;
        g.home_base = config.home_base;
    } else {
        const double lo = config.height / 2 - config.goal_width / 2;
        const double hi = config.height / 2 + config.goal_width / 2;
        g.goals[Team::A] = {{0.0, lo}, {0.0, hi}};
        g.goals[Team::B] = {{config.width, lo}, {config.width, hi}};
        g.home_base = {config.width / 2, config.height / 2};
    }
    return g;
}

}  // namespace mrsim
