#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrsim/fsm.hpp"

namespace mrsim {

// Process-notation for behavioral assemblages. Example program:
//
//   P      = OFF,
//   OFF    = (on->WANDER),
//   WANDER = (go->OFF|stop->WANDER).
//
// The header names the process and its start state. Each definition lists a
// state's alternatives `releaser->TARGET` separated by `|`. Definitions are
// separated by `,`; the last one ends with `.` (a final `,` is tolerated).
// Releasers are lowercase identifiers, states uppercase; `//` comments run
// to end of line; all other whitespace is insignificant.

struct SourceSpan {
    int line = 1;    // 1-based
    int column = 1;  // 1-based, in bytes
    int length = 1;
};

struct Diagnostic {
    SourceSpan span;
    std::string message;
};

/// `file:line:col: message` (file omitted when empty).
std::string format_diagnostic(const Diagnostic& d, std::string_view file = {});

struct Alternative {
    std::string releaser;
    std::string target;
    SourceSpan releaser_span;
    SourceSpan target_span;
};

struct StateDef {
    std::string name;
    SourceSpan name_span;
    std::vector<Alternative> alternatives;  // source order = priority order
};

struct AssemblageAst {
    std::string process_name;
    std::string start_ref;
    std::vector<StateDef> state_defs;  // source order
};

struct ParseResult {
    std::optional<AssemblageAst> ast;  // present iff diagnostics empty
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return diagnostics.empty(); }
};

/// Total over arbitrary byte strings: returns either an AST or diagnostics,
/// never throws. Recovers at definition boundaries to report several errors.
ParseResult parse_assemblage(std::string_view source);

/// States = definition names, alphabet = releasers by first appearance,
/// one transition per alternative, start = the header reference,
/// finals = {start}. Index 0 is the start state and the remaining indices
/// follow definition order, except that the well-known machines (matched by
/// state-label set) keep their published table numbering.
Fsm compile_assemblage(const AssemblageAst& ast);

/// Published numbering for the stock machines, keyed by exact label set.
std::optional<std::vector<std::pair<std::string, int>>> table_numbering_for(
    const std::vector<std::string>& labels);

/// Canonical notation for `fsm`; compiling the output yields an equal
/// machine. Requires conforming labels, alphabet == used releasers, and at
/// least one outgoing transition per state (throws std::domain_error
/// otherwise: the notation cannot express sink states).
std::string render_assemblage(const Fsm& fsm, std::string_view process_name = "P");

/// Convenience: parse + compile, throwing std::runtime_error with formatted
/// diagnostics on failure.
Fsm compile_source(std::string_view source, std::string_view file = {});

}  // namespace mrsim
