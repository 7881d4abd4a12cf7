#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mrsim/world.hpp"

namespace mrsim {

struct TraceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One JSON-Lines record per tick:
//   {tick, robots:[{id,x,y,vx,vy,state,gripper}], ball?, score?, events:[..]}
// Keys keep insertion order and numbers print as shortest round-trip
// decimals, so identical runs serialize to identical bytes. The tick-0
// record opens with scenario and roster events carrying everything metrics
// needs, making a trace self-describing.
using TraceRecord = nlohmann::ordered_json;

/// Record for the world as it stands (tick 0 = initial snapshot).
TraceRecord trace_record(const WorldState& world);

/// One compact line per record, each newline-terminated.
void write_trace(const std::vector<TraceRecord>& records, std::ostream& out);

/// Parses a JSON-Lines trace; the first malformed line raises TraceError
/// with `path:line:` context. Blank lines are not tolerated.
std::vector<TraceRecord> read_trace(std::istream& in, const std::string& path = "<trace>");

std::vector<TraceRecord> read_trace_file(const std::string& path);

/// Recomputes the run metrics from trace records alone.
/// Foraging: {scenario, ticks, completion_tick, delivered{red,blue}, robots[{id,distance}]}
/// Soccer:   {scenario, ticks, score{A,B}, possession{A,B,none},
///            robots[{id,team,role,distance,sector_occupancy}]}
/// Possession at a tick belongs to the team of the most recent kick.
nlohmann::ordered_json compute_metrics(const std::vector<TraceRecord>& records);

struct RunResult {
    std::vector<TraceRecord> trace;
    nlohmann::ordered_json metrics;
};

/// init_world + advance until the step limit or the terminal condition,
/// collecting one record per tick plus the initial snapshot.
RunResult run_simulation(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace mrsim
