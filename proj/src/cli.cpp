#include "mrsim/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrsim/assemblage.hpp"
#include "mrsim/config.hpp"
#include "mrsim/plot.hpp"
#include "mrsim/trace.hpp"

namespace mrsim {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << bytes;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

std::string dot_diagram(const Fsm& fsm, const std::string& name) {
    std::ostringstream out;
    out << "digraph " << name << " {\n  rankdir=LR;\n  start [shape=point];\n";
    for (size_t i = 0; i < fsm.states.size(); ++i) {
        bool is_final = std::find(fsm.finals.begin(), fsm.finals.end(), static_cast<int>(i)) !=
                        fsm.finals.end();
        out << "  s" << i << " [label=\"" << i << " " << fsm.states[i] << "\" shape="
            << (is_final ? "doublecircle" : "circle") << "];\n";
    }
    out << "  start -> s" << fsm.start << ";\n";
    for (const Transition& t : fsm.transitions)
        out << "  s" << t.from << " -> s" << t.to << " [label=\"" << t.releaser << "\"];\n";
    out << "}\n";
    return out.str();
}

int cmd_compile(const std::string& source_path, const std::string& emit, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
    std::string source;
    try {
        source = read_file(source_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    ParseResult result = parse_assemblage(source);
    if (!result.ok()) {
        for (const Diagnostic& d : result.diagnostics)
            err << format_diagnostic(d, source_path) << '\n';
        return 1;
    }
    Fsm fsm = compile_assemblage(*result.ast);
    ValidationReport report = validate_fsm(fsm);
    if (!report.empty()) {
        for (const ValidationFinding& finding : report)
            err << source_path << ": " << finding.detail << '\n';
        return 1;
    }

    std::string artifact;
    if (emit == "table")
        artifact = serialize_transition_table(fsm);
    else if (emit == "canonical")
        artifact = render_assemblage(fsm, result.ast->process_name);
    else if (emit == "diagram")
        artifact = dot_diagram(fsm, result.ast->process_name);
    else {
        err << "error: --emit must be table, canonical or diagram\n";
        return 2;
    }

    if (out_path.empty())
        out << artifact;
    else
        write_file(out_path, artifact);
    return 0;
}

struct RunArtifacts {
    std::string summary;
};

std::string summary_line(const ScenarioConfig& config, std::uint64_t seed,
                         const nlohmann::ordered_json& metrics) {
    std::ostringstream line;
    line << to_string(config.kind) << " seed=" << seed << " ticks=" << metrics.at("ticks");
    if (config.kind == ScenarioKind::Foraging) {
        if (metrics.at("completion_tick").is_null())
            line << " completion_tick=none";
        else
            line << " completion_tick=" << metrics.at("completion_tick");
        line << " delivered=" << metrics.at("delivered").at("red").get<long>() +
                                     metrics.at("delivered").at("blue").get<long>();
    } else {
        line << " score=A:" << metrics.at("score").at("A") << "-B:"
             << metrics.at("score").at("B");
    }
    return line.str();
}

RunArtifacts run_one(const ScenarioConfig& config, const std::string& config_path,
                     std::uint64_t seed, const fs::path& out_dir) {
    RunResult result = run_simulation(config, seed);

    std::ostringstream trace_bytes;
    write_trace(result.trace, trace_bytes);
    const std::string trace = trace_bytes.str();
    const std::string metrics = result.metrics.dump(2) + "\n";

    fs::create_directories(out_dir);
    write_file((out_dir / "trace.jsonl").string(), trace);
    write_file((out_dir / "metrics.json").string(), metrics);

    nlohmann::ordered_json manifest;
    manifest["config"] = config_path;
    manifest["seed"] = seed;
    manifest["out_dir"] = out_dir.string();
    manifest["artifacts"] = nlohmann::ordered_json::array();
    auto artifact = [&](const char* name, const std::string& bytes) {
        manifest["artifacts"].push_back({{"name", name},
                                         {"fnv1a64", fnv1a64_hex(bytes)},
                                         {"bytes", bytes.size()}});
    };
    artifact("trace.jsonl", trace);
    artifact("metrics.json", metrics);
    manifest["created_at"] = utc_now();
    write_file((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");

    return {summary_line(config, seed, result.metrics)};
}

bool parse_seed_range(const std::string& text, std::uint64_t& lo, std::uint64_t& hi) {
    size_t dots = text.find("..");
    if (dots == std::string::npos) return false;
    try {
        size_t used = 0;
        lo = std::stoull(text.substr(0, dots), &used);
        if (used != dots) return false;
        std::string rest = text.substr(dots + 2);
        hi = std::stoull(rest, &used);
        if (used != rest.size()) return false;
    } catch (const std::exception&) {
        return false;
    }
    return lo <= hi;
}

int cmd_run(const std::string& config_path, bool has_seed, std::uint64_t seed,
            const std::string& seeds, const std::string& out_dir, std::ostream& out,
            std::ostream& err) {
    ScenarioConfig config;
    try {
        config = load_config(config_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    try {
        if (seeds.empty()) {
            RunArtifacts artifacts = run_one(config, config_path, seed, out_dir);
            out << artifacts.summary << '\n';
            return 0;
        }
        std::uint64_t lo = 0, hi = 0;
        if (!parse_seed_range(seeds, lo, hi)) {
            err << "error: --seeds expects an ascending range like 1..20\n";
            return 2;
        }
        // Independent worlds: run in parallel, report in seed order.
        std::vector<std::future<RunArtifacts>> futures;
        for (std::uint64_t s = lo; s <= hi; ++s) {
            fs::path dir = fs::path(out_dir) / ("seed-" + std::to_string(s));
            futures.push_back(std::async(std::launch::async, run_one, std::cref(config),
                                         std::cref(config_path), s, dir));
        }
        for (auto& future : futures) out << future.get().summary << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    (void)has_seed;
}

int cmd_plot(const std::string& kind, const std::string& input, const std::string& out_path,
             const std::string& grid, std::ostream& out, std::ostream& err) {
    try {
        std::string svg;
        if (kind == "trajectory") {
            svg = render_trajectory_svg(read_trace_file(input));
        } else if (kind == "forcefield") {
            ForceSnapshot snapshot = load_snapshot(input);
            if (!grid.empty()) {
                int nx = 0, ny = 0;
                if (std::sscanf(grid.c_str(), "%dx%d", &nx, &ny) != 2 || nx < 1 || ny < 1) {
                    err << "error: --grid expects COLSxROWS like 24x16\n";
                    return 2;
                }
                snapshot.nx = nx;
                snapshot.ny = ny;
            }
            svg = render_forcefield_svg(snapshot);
        } else {
            err << "error: plot kind must be trajectory or forcefield\n";
            return 2;
        }
        write_file(out_path, svg);
        out << "wrote " << out_path << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_metrics(const std::string& trace_path, const std::string& out_path, std::ostream& out,
                std::ostream& err) {
    try {
        auto records = read_trace_file(trace_path);
        std::string document = compute_metrics(records).dump(2) + "\n";
        if (out_path.empty())
            out << document;
        else
            write_file(out_path, document);
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

std::string fnv1a64_hex(std::string_view bytes) {
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buffer;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Deterministic multi-robot behavior simulator"};
    app.require_subcommand(1);

    auto* compile = app.add_subcommand("compile", "Compile assemblage notation to a machine");
    std::string source_path, emit = "table", compile_out;
    compile->add_option("source", source_path, "assemblage source file")->required();
    compile->add_option("--emit", emit, "table | canonical | diagram");
    compile->add_option("--out", compile_out, "artifact path (default: stdout)");

    auto* run = app.add_subcommand("run", "Run a scenario and write trace artifacts");
    std::string config_path, seeds, run_out = "out";
    std::uint64_t seed = 0;
    run->add_option("--config", config_path, "scenario config file")->required();
    auto* seed_opt = run->add_option("--seed", seed, "master seed (required unless --seeds)");
    auto* seeds_opt = run->add_option("--seeds", seeds, "inclusive seed range a..b");
    seed_opt->excludes(seeds_opt);
    run->add_option("--out", run_out, "output directory");

    auto* plot = app.add_subcommand("plot", "Render a trace or force-field snapshot to SVG");
    std::string plot_kind, plot_input, plot_out, grid;
    plot->add_option("kind", plot_kind, "trajectory | forcefield")->required();
    plot->add_option("input", plot_input, "trace file or snapshot file")->required();
    plot->add_option("--out", plot_out, "output SVG path")->required();
    plot->add_option("--grid", grid, "force-field grid COLSxROWS");

    auto* metrics = app.add_subcommand("metrics", "Recompute metrics from a trace");
    std::string trace_path, metrics_out;
    metrics->add_option("trace", trace_path, "trace file (JSON-Lines)")->required();
    metrics->add_option("--out", metrics_out, "metrics path (default: stdout)");

    try {
        // CLI11's vector overload consumes arguments back to front.
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    }

    if (compile->parsed()) return cmd_compile(source_path, emit, compile_out, out, err);
    if (run->parsed()) {
        if (!*seed_opt && !*seeds_opt) {
            err << "error: run requires --seed or --seeds (randomness is never implicit)\n";
            return 2;
        }
        return cmd_run(config_path, static_cast<bool>(*seed_opt), seed, seeds, run_out, out, err);
    }
    if (plot->parsed()) return cmd_plot(plot_kind, plot_input, plot_out, grid, out, err);
    if (metrics->parsed()) return cmd_metrics(trace_path, metrics_out, out, err);
    err << "error: no subcommand\n";
    return 2;
}

}  // namespace mrsim
