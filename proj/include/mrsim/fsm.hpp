#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mrsim {

/// True iff `name` matches `[a-z][a-z0-9_]*` (the releaser lexeme class).
bool is_releaser_name(std::string_view name);

/// True iff `label` matches `[A-Z][A-Z0-9_]*` (the state lexeme class).
bool is_state_label(std::string_view label);

struct StateId {
    int index = 0;
    std::string label;
    bool operator==(const StateId&) const = default;
};

struct Transition {
    int from = 0;
    std::string releaser;
    int to = 0;
    bool operator==(const Transition&) const = default;
};

// A releaser-driven machine: states, releaser alphabet, transition map,
// start state, final states. Plain value type; build by hand or compile
// from assemblage notation. Transition order within one source state is
// meaningful: it is the priority order used when several releasers fire.
struct Fsm {
    std::vector<std::string> states;    // index -> label
    std::vector<std::string> alphabet;  // ordered by first appearance
    std::vector<Transition> transitions;
    int start = 0;
    std::vector<int> finals;

    int add_state(std::string label);
    void add_transition(std::string_view from_label, std::string_view releaser,
                        std::string_view to_label);

    std::optional<int> index_of(std::string_view label) const;
    const std::string& label(int index) const;
    bool in_alphabet(std::string_view releaser) const;

    /// Target of (from, releaser), or nullopt when the pair is undefined.
    std::optional<int> next(int from, std::string_view releaser) const;

    /// Transitions leaving `from`, in stored (priority) order.
    std::vector<Transition> outgoing(int from) const;

    StateId state_id(int index) const { return {index, label(index)}; }
};

/// Structural equality: same labels per index, same alphabet order, same
/// start/finals, and the same outgoing sequence per state (global transition
/// interleaving is irrelevant).
bool fsm_equal(const Fsm& a, const Fsm& b);

struct StepRecord {
    StateId from;
    std::optional<std::string> fired;  // absent = self-loop on no trigger
    StateId to;
    long tick = 0;
};

enum class FindingKind {
    UnreachableState,
    DanglingReleaser,
    Nondeterministic,
    BadStart,
    BadFinal,
    BadEndpoint,
    BadReleaserName,
    DuplicateLabel,
};

struct ValidationFinding {
    FindingKind kind;
    std::string detail;
};

using ValidationReport = std::vector<ValidationFinding>;

/// Empty report iff the machine is structurally sound and every state is
/// reachable from start. Findings are data, not failures.
ValidationReport validate_fsm(const Fsm& fsm);

/// Fires the first releaser in `active` (caller priority order) that has a
/// defined transition from `current`; self-loop with no fired releaser when
/// none applies. Unknown state or releaser is a contract violation.
StepRecord step_fsm(const Fsm& fsm, int current, std::span<const std::string> active,
                    long tick = 0);

/// Folds step_fsm over `stimuli` starting from fsm.start. Records chain:
/// record[i].to == record[i+1].from.
std::vector<StepRecord> run_sequence(const Fsm& fsm,
                                     const std::vector<std::vector<std::string>>& stimuli);

/// Canonical transition-table text: one `<from> <releaser> <to>` line per
/// transition, sorted by (from, releaser), trailing newline on every line.
std::string serialize_transition_table(const Fsm& fsm);

}  // namespace mrsim
