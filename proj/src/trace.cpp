#include "mrsim/trace.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace mrsim {

namespace {

using nlohmann::ordered_json;

ordered_json event_json(const WorldEvent& e) {
    ordered_json j;
    j["type"] = e.type;
    if (e.robot >= 0) j["robot"] = e.robot;
    if (e.attractor >= 0) j["attractor"] = e.attractor;
    if (e.color) j["color"] = to_string(*e.color);
    if (e.team) j["team"] = to_string(*e.team);
    if (e.type == "hit_ball") {
        j["nx"] = e.normal.x;
        j["ny"] = e.normal.y;
        j["before"] = e.speed_before;
        j["after"] = e.speed_after;
    }
    return j;
}

ordered_json meta_events(const WorldState& w) {
    ordered_json events = ordered_json::array();
    ordered_json scenario;
    scenario["type"] = "scenario";
    scenario["kind"] = to_string(w.config.kind);
    scenario["width"] = w.geometry.width;
    scenario["height"] = w.geometry.height;
    if (w.config.kind == ScenarioKind::Foraging) {
        scenario["attractors"] = static_cast<int>(w.attractors.size());
        scenario["red_bin"] = {w.config.red_bin.x, w.config.red_bin.y};
        scenario["blue_bin"] = {w.config.blue_bin.x, w.config.blue_bin.y};
        scenario["bin_radius"] = w.config.schema.bin_radius;
    } else {
        scenario["goal_width"] = w.config.goal_width;
    }
    events.push_back(std::move(scenario));

    ordered_json roster;
    roster["type"] = "roster";
    roster["robots"] = ordered_json::array();
    for (const RobotState& r : w.robots) {
        ordered_json entry;
        entry["id"] = r.id;
        entry["team"] = to_string(r.team);
        entry["role"] = to_string(r.role);
        roster["robots"].push_back(std::move(entry));
    }
    events.push_back(std::move(roster));
    return events;
}

[[noreturn]] void bad_line(const std::string& path, int line, const std::string& message) {
    throw TraceError(path + ":" + std::to_string(line) + ": " + message);
}

void check_record_shape(const ordered_json& j, const std::string& path, int line) {
    if (!j.is_object()) bad_line(path, line, "record is not a JSON object");
    if (!j.contains("tick") || !j["tick"].is_number_integer())
        bad_line(path, line, "missing integer 'tick'");
    if (!j.contains("robots") || !j["robots"].is_array())
        bad_line(path, line, "missing 'robots' array");
    for (const auto& r : j["robots"]) {
        for (const char* key : {"id", "x", "y", "vx", "vy"})
            if (!r.contains(key) || !r[key].is_number())
                bad_line(path, line, std::string("robot entry missing numeric '") + key + "'");
        if (!r.contains("state") || !r["state"].is_string())
            bad_line(path, line, "robot entry missing string 'state'");
    }
    if (!j.contains("events") || !j["events"].is_array())
        bad_line(path, line, "missing 'events' array");
}

struct RosterEntry {
    int id;
    Team team;
    Role role;
};

}  // namespace

TraceRecord trace_record(const WorldState& w) {
    ordered_json j;
    j["tick"] = w.tick;
    j["robots"] = ordered_json::array();
    for (const RobotState& r : w.robots) {
        ordered_json entry;
        entry["id"] = r.id;
        entry["x"] = r.kin.p.x;
        entry["y"] = r.kin.p.y;
        entry["vx"] = r.kin.v.x;
        entry["vy"] = r.kin.v.y;
        entry["state"] = r.fsm_state.label;
        if (r.gripper)
            entry["gripper"] = to_string(w.attractors.at(*r.gripper).color);
        else
            entry["gripper"] = nullptr;
        j["robots"].push_back(std::move(entry));
    }
    if (w.ball) {
        j["ball"] = {{"x", w.ball->p.x}, {"y", w.ball->p.y}, {"vx", w.ball->v.x},
                     {"vy", w.ball->v.y}};
        j["score"] = {{"A", w.score.at(Team::A)}, {"B", w.score.at(Team::B)}};
    }
    ordered_json events = w.tick == 0 ? meta_events(w) : ordered_json::array();
    for (const WorldEvent& e : w.events) events.push_back(event_json(e));
    j["events"] = std::move(events);
    return j;
}

void write_trace(const std::vector<TraceRecord>& records, std::ostream& out) {
    for (const TraceRecord& r : records) out << r.dump() << '\n';
}

std::vector<TraceRecord> read_trace(std::istream& in, const std::string& path) {
    std::vector<TraceRecord> records;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) bad_line(path, number, "blank line");
        TraceRecord j = TraceRecord::parse(line, nullptr, false);
        if (j.is_discarded()) bad_line(path, number, "not valid JSON");
        check_record_shape(j, path, number);
        records.push_back(std::move(j));
    }
    return records;
}

std::vector<TraceRecord> read_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TraceError("cannot open trace file: " + path);
    return read_trace(in, path);
}

nlohmann::ordered_json compute_metrics(const std::vector<TraceRecord>& records) {
    if (records.empty()) throw TraceError("empty trace");

    std::string kind;
    FieldGeometry geometry;
    std::vector<RosterEntry> roster;
    for (const auto& e : records.front()["events"]) {
        const std::string type = e.value("type", "");
        if (type == "scenario") {
            kind = e.at("kind").get<std::string>();
            geometry.width = e.at("width").get<double>();
            geometry.height = e.at("height").get<double>();
        } else if (type == "roster") {
            for (const auto& r : e.at("robots")) {
                RosterEntry entry;
                entry.id = r.at("id").get<int>();
                entry.team = r.at("team").get<std::string>() == "A" ? Team::A : Team::B;
                auto role = parse_role(r.at("role").get<std::string>());
                if (!role) throw TraceError("roster names unknown role");
                entry.role = *role;
                roster.push_back(entry);
            }
        }
    }
    if (kind.empty() || roster.empty())
        throw TraceError("trace lacks the scenario/roster metadata of the tick-0 record");

    std::map<int, double> distance;
    std::map<int, Vec2> last_pos;
    std::map<int, long> in_sector;
    std::map<std::string, long> delivered{{"red", 0}, {"blue", 0}};
    std::optional<long> completion_tick;
    std::map<std::string, long> possession{{"A", 0}, {"B", 0}, {"none", 0}};
    std::string owner = "none";

    auto team_of = [&](int robot) -> std::string {
        for (const auto& r : roster)
            if (r.id == robot) return to_string(r.team);
        throw TraceError("event names a robot absent from the roster");
    };

    for (const TraceRecord& rec : records) {
        for (const auto& r : rec["robots"]) {
            int id = r["id"].get<int>();
            Vec2 p{r["x"].get<double>(), r["y"].get<double>()};
            if (auto it = last_pos.find(id); it != last_pos.end())
                distance[id] += (p - it->second).norm();
            else
                distance[id] = 0.0;
            last_pos[id] = p;

            auto entry = std::find_if(roster.begin(), roster.end(),
                                      [&](const RosterEntry& e) { return e.id == id; });
            if (entry != roster.end() && !sectors_for_role(entry->role).empty() &&
                geometry.contains(p)) {
                Sector s = sector_for_team(p, geometry, entry->team);
                const auto& sectors = sectors_for_role(entry->role);
                if (std::find(sectors.begin(), sectors.end(), s) != sectors.end())
                    in_sector[id] += 1;
            }
        }
        for (const auto& e : rec["events"]) {
            const std::string type = e.value("type", "");
            if (type == "delivered") delivered[e.at("color").get<std::string>()] += 1;
            if (type == "complete" && !completion_tick)
                completion_tick = rec["tick"].get<long>();
            if (type == "hit_ball") owner = team_of(e.at("robot").get<int>());
            if (type == "goal" || type == "ball_reset") owner = "none";
        }
        possession[owner] += 1;
    }

    const auto n = static_cast<double>(records.size());
    nlohmann::ordered_json m;
    m["scenario"] = kind;
    m["ticks"] = records.back()["tick"].get<long>();
    if (kind == "foraging") {
        if (completion_tick)
            m["completion_tick"] = *completion_tick;
        else
            m["completion_tick"] = nullptr;
        m["delivered"] = {{"red", delivered["red"]}, {"blue", delivered["blue"]}};
        m["robots"] = nlohmann::ordered_json::array();
        for (const auto& r : roster)
            m["robots"].push_back({{"id", r.id}, {"distance", distance[r.id]}});
    } else {
        nlohmann::ordered_json score{{"A", 0}, {"B", 0}};
        if (records.back().contains("score")) score = records.back()["score"];
        m["score"] = std::move(score);
        m["possession"] = {{"A", possession["A"] / n},
                           {"B", possession["B"] / n},
                           {"none", possession["none"] / n}};
        m["robots"] = nlohmann::ordered_json::array();
        for (const auto& r : roster) {
            nlohmann::ordered_json entry;
            entry["id"] = r.id;
            entry["team"] = to_string(r.team);
            entry["role"] = to_string(r.role);
            entry["distance"] = distance[r.id];
            entry["sector_occupancy"] = in_sector[r.id] / n;
            m["robots"].push_back(std::move(entry));
        }
    }
    return m;
}

RunResult run_simulation(const ScenarioConfig& config, std::uint64_t seed) {
    WorldState w = init_world(config, seed);
    RunResult result;
    result.trace.push_back(trace_record(w));
    while (w.tick < config.step_limit && !w.complete) {
        advance(w);
        result.trace.push_back(trace_record(w));
    }
    result.metrics = compute_metrics(result.trace);
    return result;
}

}  // namespace mrsim
