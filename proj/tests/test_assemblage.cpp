#include <doctest.h>

#include <string>

#include "mrsim/assemblage.hpp"
#include "mrsim/rng.hpp"
#include "mrsim/schemas.hpp"

using namespace mrsim;

namespace {

const char* kToySource =
    "P = OFF,\n"
    "OFF = (on->WANDER),\n"
    "WANDER = (go->OFF\n"
    "         |stop->WANDER).\n";

bool mentions(const ParseResult& r, const std::string& needle) {
    for (const auto& d : r.diagnostics)
        if (d.message.find(needle) != std::string::npos) return true;
    return false;
}

// Deterministic machine generator for round-trip property runs. Shapes vary
// in state count, branching and self-loops; every state gets at least one
// outgoing alternative so the notation can express it.
Fsm random_machine(std::uint64_t seed) {
    SplitMix64 rng(seed);
    int n = 2 + static_cast<int>(rng.next_below(5));
    Fsm m;
    for (int i = 0; i < n; ++i) m.add_state("S" + std::to_string(i));
    const char* releasers[] = {"go", "stop", "left", "right", "on", "off", "tick"};
    for (int i = 0; i < n; ++i) {
        int fanout = 1 + static_cast<int>(rng.next_below(3));
        std::vector<std::string> used;
        for (int k = 0; k < fanout; ++k) {
            std::string r = releasers[rng.next_below(7)];
            bool dup = false;
            for (const auto& u : used) dup = dup || u == r;
            if (dup) continue;  // keep the machine deterministic
            used.push_back(r);
            int to = static_cast<int>(rng.next_below(n));
            m.add_transition(m.states[i], r, m.states[to]);
        }
    }
    m.start = 0;
    m.finals = {0};
    return m;
}

}  // namespace

TEST_CASE("parses the documented example") {
    ParseResult r = parse_assemblage(kToySource);
    REQUIRE(r.ok());
    CHECK(r.ast->process_name == "P");
    CHECK(r.ast->start_ref == "OFF");
    REQUIRE(r.ast->state_defs.size() == 2);
    CHECK(r.ast->state_defs[1].alternatives.size() == 2);
    CHECK(r.ast->state_defs[1].alternatives[0].releaser == "go");
    CHECK(r.ast->state_defs[1].alternatives[0].target == "OFF");
}

TEST_CASE("comments and stray whitespace are insignificant") {
    ParseResult r = parse_assemblage(
        "// header comment\n"
        "P = A , // trailing\n"
        "  A =\t( go -> A ) .  \n// done\n");
    REQUIRE(r.ok());
    CHECK(r.ast->state_defs.size() == 1);
}

TEST_CASE("diagnostics carry 1-based line and column") {
    ParseResult r = parse_assemblage("P = OFF,\nOFF = (On->OFF).\n");
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics[0].span.line == 2);
    // 'On' is a state identifier where a releaser was expected, column 8.
    CHECK(r.diagnostics[0].span.column == 8);

    std::string text = format_diagnostic(r.diagnostics[0], "machine.asm");
    CHECK(text.substr(0, 14) == "machine.asm:2:");
    CHECK(format_diagnostic(r.diagnostics[0]).substr(0, 2) == "2:");
}

TEST_CASE("parser recovers and reports several errors") {
    ParseResult r = parse_assemblage(
        "P = A,\n"
        "A = (go->B,\n"        // missing ')'
        "B = (stop->).\n");    // missing target
    CHECK_FALSE(r.ok());
    CHECK(r.diagnostics.size() >= 2);
    CHECK_FALSE(r.ast.has_value());
}

TEST_CASE("semantic checks name the offender") {
    CHECK(mentions(parse_assemblage("P = A,\nA = (go->A),\nA = (stop->A).\n"),
                   "duplicate state definition: A"));
    CHECK(mentions(parse_assemblage("P = MISSING,\nA = (go->A).\n"),
                   "undefined state reference: MISSING"));
    CHECK(mentions(parse_assemblage("P = A,\nA = (go->GHOST).\n"),
                   "undefined state reference: GHOST"));
    CHECK(mentions(parse_assemblage("P = A,\nA = (go->A|go->A).\n"),
                   "duplicate releaser in state A: go"));
}

TEST_CASE("trailing content after the final period is rejected") {
    ParseResult r = parse_assemblage("P = A,\nA = (go->A). junk\n");
    CHECK_FALSE(r.ok());
}

TEST_CASE("empty and pathological inputs stay total") {
    CHECK_FALSE(parse_assemblage("").ok());
    CHECK_FALSE(parse_assemblage(".").ok());
    CHECK_FALSE(parse_assemblage("P = ").ok());
    CHECK_FALSE(parse_assemblage(std::string(3, '\0')).ok());
    CHECK_FALSE(parse_assemblage("P = A,\nA = (go->A)").ok());  // missing '.'
}

TEST_CASE("compile maps alternatives to transitions in priority order") {
    ParseResult r = parse_assemblage(kToySource);
    REQUIRE(r.ok());
    Fsm m = compile_assemblage(*r.ast);
    CHECK(m.states.size() == 2);
    CHECK(m.start == m.index_of("OFF"));
    CHECK(m.finals == std::vector<int>{m.start});
    auto out = m.outgoing(*m.index_of("WANDER"));
    REQUIRE(out.size() == 2);
    CHECK(out[0].releaser == "go");
    CHECK(out[1].releaser == "stop");
    CHECK(validate_fsm(m).empty());
}

TEST_CASE("novel machines number start first then definition order") {
    ParseResult r = parse_assemblage(
        "P = MID,\n"
        "TOP = (up->MID),\n"
        "MID = (down->TOP|in->INNER),\n"
        "INNER = (out->MID).\n");
    REQUIRE(r.ok());
    Fsm m = compile_assemblage(*r.ast);
    CHECK(m.label(0) == "MID");    // start
    CHECK(m.label(1) == "TOP");    // then definition order
    CHECK(m.label(2) == "INNER");
}

TEST_CASE("stock machines keep their published numbering") {
    Fsm foraging = compile_source(assemblage_source_for_role(Role::Forager));
    CHECK(foraging.label(0) == "OFF");
    CHECK(foraging.label(1) == "DELIVER_BLUE");
    CHECK(foraging.label(2) == "DELIVER_RED");
    CHECK(foraging.label(3) == "ACQUIRE_BLUE");
    CHECK(foraging.label(4) == "WANDER");
    CHECK(foraging.label(5) == "ACQUIRE_RED");
    CHECK(foraging.start == 0);
    CHECK(foraging.transitions.size() == 10);

    Fsm forward = compile_source(assemblage_source_for_role(Role::Forward));
    CHECK(forward.label(0) == "OFF");
    CHECK(forward.label(1) == "GO_TO_BALL");
    CHECK(forward.label(2) == "BEHIND_BALL");
    CHECK(forward.label(3) == "WANDER");
    CHECK(forward.transitions.size() == 6);

    Fsm keeper = compile_source(assemblage_source_for_role(Role::GoalKeeper));
    CHECK(keeper.label(0) == "OFF");
    CHECK(keeper.label(1) == "GO_TO_BALL");
    CHECK(keeper.label(2) == "DEFEND");
    CHECK(keeper.label(3) == "WANDER");
    CHECK(keeper.transitions.size() == 6);
}

TEST_CASE("render and recompile reproduces the machine") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Fsm original = random_machine(seed);
        std::string source = render_assemblage(original, "GEN");
        ParseResult r = parse_assemblage(source);
        REQUIRE_MESSAGE(r.ok(), "seed ", seed, " rendered unparsable source:\n", source);
        Fsm again = compile_assemblage(*r.ast);
        REQUIRE_MESSAGE(fsm_equal(original, again), "seed ", seed, " round-trip drifted:\n",
                        source);
    }
}

TEST_CASE("render rejects machines the notation cannot express") {
    Fsm sink;
    sink.add_state("A");
    sink.add_state("B");
    sink.add_transition("A", "go", "B");  // B has no outgoing alternative
    CHECK_THROWS_AS((void)render_assemblage(sink), std::domain_error);
}

TEST_CASE("compile_source throws formatted diagnostics") {
    CHECK_THROWS_WITH_AS(compile_source("P = OFF,\nOFF = (On->OFF).\n", "bad.asm"),
                         doctest::Contains("bad.asm:2:"), std::runtime_error);
}

TEST_CASE("fuzz smoke: mutated sources never crash the parser") {
    std::string base = kToySource;
    SplitMix64 rng(0xFEEDFACEu);
    for (int i = 0; i < 500; ++i) {
        std::string s = base;
        int edits = 1 + static_cast<int>(rng.next_below(4));
        for (int e = 0; e < edits; ++e) {
            size_t pos = rng.next_below(s.size());
            char c = static_cast<char>(rng.next_below(256));
            switch (rng.next_below(3)) {
                case 0: s[pos] = c; break;
                case 1: s.insert(pos, 1, c); break;
                default: s.erase(pos, 1); break;
            }
        }
        ParseResult r = parse_assemblage(s);  // must return, never throw
        if (r.ok()) (void)compile_assemblage(*r.ast);
    }
    CHECK(true);
}
