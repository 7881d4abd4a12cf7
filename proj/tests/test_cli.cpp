#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mrsim/assemblage.hpp"
#include "mrsim/cli.hpp"
#include "mrsim/trace.hpp"

using namespace mrsim;
namespace fs = std::filesystem;

namespace {

const std::string kRoot = MRSIM_SOURCE_ROOT;

struct CliResult {
    int status;
    std::string out;
    std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int status = run_cli(args, out, err);
    return {status, out.str(), err.str()};
}

// Fresh working directory per test, removed on scope exit.
struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("mrsim-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out << bytes;
}

}  // namespace

TEST_CASE("usage errors exit with status 2") {
    CHECK(cli({}).status == 2);
    CHECK(cli({"conquer"}).status == 2);
    CHECK(cli({"compile"}).status == 2);  // missing source
    CHECK(cli({"plot", "trajectory"}).status == 2);  // missing input and --out

    CliResult r = cli({"run", "--config", kRoot + "/data/foraging_micro.cfg"});
    CHECK(r.status == 2);
    CHECK(r.err.find("--seed or --seeds") != std::string::npos);

    r = cli({"run", "--config", kRoot + "/data/foraging_micro.cfg", "--seed", "1", "--seeds",
             "1..2"});
    CHECK(r.status == 2);  // mutually exclusive

    TempDir tmp;
    r = cli({"run", "--config", kRoot + "/data/foraging_micro.cfg", "--seeds", "5..1", "--out",
             tmp / "x"});
    CHECK(r.status == 2);
    CHECK(r.err.find("ascending range") != std::string::npos);

    spit(tmp / "m.asm", "P = A, A = (go->A).");
    r = cli({"compile", tmp / "m.asm", "--emit", "prose"});
    CHECK(r.status == 2);
    CHECK(r.err.find("table, canonical or diagram") != std::string::npos);
}

TEST_CASE("help prints to stdout and succeeds") {
    CliResult r = cli({"--help"});
    CHECK(r.status == 0);
    CHECK(r.out.find("compile") != std::string::npos);
    CHECK(r.out.find("run") != std::string::npos);
}

TEST_CASE("domain failures exit with status 1 and leave no artifacts") {
    TempDir tmp;
    CliResult r = cli({"run", "--config", tmp / "missing.cfg", "--seed", "1", "--out",
                       tmp / "out"});
    CHECK(r.status == 1);
    CHECK(r.err.find("cannot open config file") != std::string::npos);
    CHECK_FALSE(fs::exists(tmp / "out"));

    spit(tmp / "bad.cfg", "schema_version = 1\n[scenario]\nwarp = 9\n");
    r = cli({"run", "--config", tmp / "bad.cfg", "--seed", "1", "--out", tmp / "out"});
    CHECK(r.status == 1);
    CHECK(r.err.find("bad.cfg:3:") != std::string::npos);
    CHECK_FALSE(fs::exists(tmp / "out"));

    r = cli({"compile", tmp / "missing.asm"});
    CHECK(r.status == 1);

    r = cli({"metrics", tmp / "missing.jsonl"});
    CHECK(r.status == 1);
    CHECK(r.err.find("cannot open trace file") != std::string::npos);

    r = cli({"plot", "trajectory", tmp / "missing.jsonl", "--out", tmp / "t.svg"});
    CHECK(r.status == 1);
}

TEST_CASE("compile diagnostics carry source locations") {
    TempDir tmp;
    spit(tmp / "broken.asm", "P = A,\nA = (Go->A).");
    CliResult r = cli({"compile", tmp / "broken.asm"});
    CHECK(r.status == 1);
    CHECK(r.err.find("broken.asm:2:") != std::string::npos);

    spit(tmp / "dangling.asm", "P = A,\nA = (go->GHOST).");
    r = cli({"compile", tmp / "dangling.asm"});
    CHECK(r.status == 1);
    CHECK(r.err.find("undefined state reference: GHOST") != std::string::npos);

    // Structurally valid but unsound machines are rejected too.
    spit(tmp / "island.asm", "P = A,\nA = (go->A),\nB = (go->A).");
    r = cli({"compile", tmp / "island.asm"});
    CHECK(r.status == 1);
    CHECK(r.err.find("island.asm:") != std::string::npos);
    CHECK(r.err.find("unreachable") != std::string::npos);
}

TEST_CASE("compile reproduces the published transition tables") {
    auto table = [](const std::string& name) {
        return cli({"compile", kRoot + "/data/assemblages/" + name + ".asm.txt",
                    "--emit", "table"});
    };
    CliResult r = table("hom_for");
    CHECK(r.status == 0);
    CHECK(r.out == slurp(kRoot + "/tests/golden/table1_foraging.txt"));
    r = table("forward");
    CHECK(r.status == 0);
    CHECK(r.out == slurp(kRoot + "/tests/golden/table1_forward.txt"));
    r = table("goal_keeper");
    CHECK(r.status == 0);
    CHECK(r.out == slurp(kRoot + "/tests/golden/table1_goalkeeper.txt"));
}

TEST_CASE("compile artifact flavors") {
    TempDir tmp;
    // --out writes the same bytes a bare invocation prints.
    CliResult printed = cli({"compile", kRoot + "/data/assemblages/forward.asm.txt"});
    REQUIRE(printed.status == 0);
    CliResult r = cli({"compile", kRoot + "/data/assemblages/forward.asm.txt", "--out",
                       tmp / "fwd.txt"});
    REQUIRE(r.status == 0);
    CHECK(slurp(tmp / "fwd.txt") == printed.out);

    // Canonical text round-trips through the compiler.
    r = cli({"compile", kRoot + "/data/assemblages/forward.asm.txt", "--emit", "canonical"});
    REQUIRE(r.status == 0);
    Fsm reparsed = compile_source(r.out, "canonical");
    Fsm original = compile_source(slurp(kRoot + "/data/assemblages/forward.asm.txt"), "orig");
    CHECK(fsm_equal(reparsed, original));

    r = cli({"compile", kRoot + "/data/assemblages/forward.asm.txt", "--emit", "diagram"});
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("digraph", 0) == 0);
    CHECK(r.out.find("-> s") != std::string::npos);
}

TEST_CASE("run writes a replayable artifact set") {
    TempDir tmp;
    CliResult r = cli({"run", "--config", kRoot + "/data/foraging_micro.cfg", "--seed", "5",
                       "--out", tmp / "a"});
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("foraging seed=5 ticks=", 0) == 0);
    CHECK(r.err.empty());

    auto records = read_trace_file(tmp / "a/trace.jsonl");
    REQUIRE(!records.empty());
    CHECK(records.front()["tick"] == 0);
    // The tick-0 record is self-describing.
    bool saw_scenario = false, saw_roster = false;
    for (const auto& e : records.front()["events"]) {
        saw_scenario = saw_scenario || e["type"] == "scenario";
        saw_roster = saw_roster || e["type"] == "roster";
    }
    CHECK(saw_scenario);
    CHECK(saw_roster);

    // metrics.json is exactly the metrics recomputable from the trace.
    CHECK(slurp(tmp / "a/metrics.json") == compute_metrics(records).dump(2) + "\n");

    // The manifest hashes match the artifacts on disk.
    auto manifest = nlohmann::ordered_json::parse(slurp(tmp / "a/manifest.json"));
    CHECK(manifest["seed"] == 5);
    for (const auto& artifact : manifest["artifacts"]) {
        std::string bytes = slurp(tmp / ("a/" + artifact["name"].get<std::string>()));
        CHECK(artifact["fnv1a64"] == fnv1a64_hex(bytes));
        CHECK(artifact["bytes"] == bytes.size());
    }
}

TEST_CASE("same seed gives identical bytes, new seed gives new bytes") {
    TempDir tmp;
    auto run = [&](const std::string& dir, const std::string& seed) {
        CliResult r = cli({"run", "--config", kRoot + "/data/foraging_micro.cfg", "--seed", seed,
                           "--out", tmp / dir});
        REQUIRE(r.status == 0);
    };
    run("a", "5");
    run("b", "5");
    run("c", "6");
    CHECK(slurp(tmp / "a/trace.jsonl") == slurp(tmp / "b/trace.jsonl"));
    CHECK(slurp(tmp / "a/metrics.json") == slurp(tmp / "b/metrics.json"));
    CHECK(slurp(tmp / "a/trace.jsonl") != slurp(tmp / "c/trace.jsonl"));
}

TEST_CASE("seed ranges fan out into per-seed directories in order") {
    TempDir tmp;
    CliResult r = cli({"run", "--config", kRoot + "/data/foraging_micro.cfg", "--seeds", "3..5",
                       "--out", tmp / "batch"});
    REQUIRE(r.status == 0);

    std::istringstream lines(r.out);
    std::string line;
    std::vector<std::string> summaries;
    while (std::getline(lines, line)) summaries.push_back(line);
    REQUIRE(summaries.size() == 3);
    CHECK(summaries[0].rfind("foraging seed=3 ", 0) == 0);
    CHECK(summaries[1].rfind("foraging seed=4 ", 0) == 0);
    CHECK(summaries[2].rfind("foraging seed=5 ", 0) == 0);

    for (int s = 3; s <= 5; ++s) {
        fs::path dir = fs::path(tmp / "batch") / ("seed-" + std::to_string(s));
        CHECK(fs::exists(dir / "trace.jsonl"));
        CHECK(fs::exists(dir / "metrics.json"));
        CHECK(fs::exists(dir / "manifest.json"));
    }

    // A batch member is byte-identical to the same seed run alone.
    CliResult solo = cli({"run", "--config", kRoot + "/data/foraging_micro.cfg", "--seed", "4",
                          "--out", tmp / "solo"});
    REQUIRE(solo.status == 0);
    CHECK(slurp(tmp / "solo/trace.jsonl") == slurp(tmp / "batch/seed-4/trace.jsonl"));
}

TEST_CASE("metrics subcommand reproduces the run metrics") {
    TempDir tmp;
    REQUIRE(cli({"run", "--config", kRoot + "/data/foraging_micro.cfg", "--seed", "9", "--out",
                 tmp / "r"})
                .status == 0);

    CliResult to_file =
        cli({"metrics", tmp / "r/trace.jsonl", "--out", tmp / "recomputed.json"});
    REQUIRE(to_file.status == 0);
    CHECK(slurp(tmp / "recomputed.json") == slurp(tmp / "r/metrics.json"));

    CliResult to_stdout = cli({"metrics", tmp / "r/trace.jsonl"});
    REQUIRE(to_stdout.status == 0);
    CHECK(to_stdout.out == slurp(tmp / "r/metrics.json"));

    spit(tmp / "mangled.jsonl", "{\"tick\": 0}\n");
    CliResult bad = cli({"metrics", tmp / "mangled.jsonl"});
    CHECK(bad.status == 1);
    CHECK(bad.err.find("mangled.jsonl:1:") != std::string::npos);
}

TEST_CASE("plot renders traces and force-field snapshots") {
    TempDir tmp;
    REQUIRE(cli({"run", "--config", kRoot + "/data/foraging_micro.cfg", "--seed", "2", "--out",
                 tmp / "r"})
                .status == 0);

    CliResult r = cli({"plot", "trajectory", tmp / "r/trace.jsonl", "--out", tmp / "traj.svg"});
    REQUIRE(r.status == 0);
    std::string svg = slurp(tmp / "traj.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);

    r = cli({"plot", "forcefield", kRoot + "/data/attack_snapshot.json", "--out", tmp / "field.svg"});
    REQUIRE(r.status == 0);
    svg = slurp(tmp / "field.svg");
    CHECK(svg.find("<svg") != std::string::npos);

    // Grid overrides change the arrow count; bad grids are usage errors.
    r = cli({"plot", "forcefield", kRoot + "/data/attack_snapshot.json", "--grid", "6x4", "--out",
             tmp / "coarse.svg"});
    REQUIRE(r.status == 0);
    CHECK(slurp(tmp / "coarse.svg").size() < svg.size());

    r = cli({"plot", "forcefield", kRoot + "/data/attack_snapshot.json", "--grid", "6by4", "--out",
             tmp / "x.svg"});
    CHECK(r.status == 2);
    CHECK(r.err.find("COLSxROWS") != std::string::npos);

    r = cli({"plot", "mural", tmp / "r/trace.jsonl", "--out", tmp / "x.svg"});
    CHECK(r.status == 2);
}
