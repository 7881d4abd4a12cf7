#include "mrsim/fsm.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace mrsim {

bool is_releaser_name(std::string_view name) {
    if (name.empty() || name[0] < 'a' || name[0] > 'z') return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

bool is_state_label(std::string_view label) {
    if (label.empty() || label[0] < 'A' || label[0] > 'Z') return false;
    return std::all_of(label.begin(), label.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

int Fsm::add_state(std::string label) {
    states.push_back(std::move(label));
    return static_cast<int>(states.size()) - 1;
}

void Fsm::add_transition(std::string_view from_label, std::string_view releaser,
                         std::string_view to_label) {
    const auto from = index_of(from_label);
    const auto to = index_of(to_label);
    if (!from || !to)
        throw std::invalid_argument("add_transition: unknown state label");
    if (!in_alphabet(releaser)) alphabet.emplace_back(releaser);
    transitions.push_back({*from, std::string(releaser), *to});
}

std::optional<int> Fsm::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == label) return static_cast<int>(i);
    return std::nullopt;
}

const std::string& Fsm::label(int index) const {
    if (index < 0 || index >= static_cast<int>(states.size()))
        throw std::invalid_argument("Fsm::label: state index out of range");
    return states[static_cast<std::size_t>(index)];
}

bool Fsm::in_alphabet(std::string_view releaser) const {
    return std::find(alphabet.begin(), alphabet.end(), releaser) != alphabet.end();
}

std::optional<int> Fsm::next(int from, std::string_view releaser) const {
    for (const auto& t : transitions)
        if (t.from == from && t.releaser == releaser) return t.to;
    return std::nullopt;
}

std::vector<Transition> Fsm::outgoing(int from) const {
    std::vector<Transition> out;
    for (const auto& t : transitions)
        if (t.from == from) out.push_back(t);
    return out;
}

bool fsm_equal(const Fsm& a, const Fsm& b) {
    if (a.states != b.states || a.alphabet != b.alphabet || a.start != b.start)
        return false;
    auto sorted_finals = [](const Fsm& f) {
        auto v = f.finals;
        std::sort(v.begin(), v.end());
        return v;
    };
    if (sorted_finals(a) != sorted_finals(b)) return false;
    for (int s = 0; s < static_cast<int>(a.states.size()); ++s)
        if (a.outgoing(s) != b.outgoing(s)) return false;
    return a.transitions.size() == b.transitions.size();
}

ValidationReport validate_fsm(const Fsm& fsm) {
    ValidationReport report;
    const int n = static_cast<int>(fsm.states.size());
    auto in_range = [n](int i) { return i >= 0 && i < n; };

    {
        std::unordered_set<std::string_view> seen;
        for (const auto& label : fsm.states)
            if (!seen.insert(label).second)
                report.push_back({FindingKind::DuplicateLabel, "duplicate label: " + label});
    }

    if (!in_range(fsm.start))
        report.push_back({FindingKind::BadStart,
                          "start index out of range: " + std::to_string(fsm.start)});
    for (int f : fsm.finals)
        if (!in_range(f))
            report.push_back({FindingKind::BadFinal,
                              "final index out of range: " + std::to_string(f)});

    for (const auto& r : fsm.alphabet)
        if (!is_releaser_name(r))
            report.push_back({FindingKind::BadReleaserName, "bad releaser name: " + r});

    std::set<std::pair<int, std::string>> pairs;
    for (const auto& t : fsm.transitions) {
        if (!in_range(t.from) || !in_range(t.to)) {
            report.push_back({FindingKind::BadEndpoint,
                              "transition endpoint out of range: (" + std::to_string(t.from) +
                                  ", " + t.releaser + ", " + std::to_string(t.to) + ")"});
            continue;
        }
        if (!fsm.in_alphabet(t.releaser))
            report.push_back({FindingKind::DanglingReleaser, "dangling releaser: " + t.releaser});
        if (!pairs.insert({t.from, t.releaser}).second)
            report.push_back({FindingKind::Nondeterministic,
                              "nondeterministic: (" + fsm.label(t.from) + ", " + t.releaser + ")"});
    }

    // Reachability from start over well-formed transitions.
    if (in_range(fsm.start)) {
        std::vector<bool> reached(static_cast<std::size_t>(n), false);
        std::vector<int> stack{fsm.start};
        reached[static_cast<std::size_t>(fsm.start)] = true;
        while (!stack.empty()) {
            const int s = stack.back();
            stack.pop_back();
            for (const auto& t : fsm.transitions)
                if (t.from == s && in_range(t.to) && !reached[static_cast<std::size_t>(t.to)]) {
                    reached[static_cast<std::size_t>(t.to)] = true;
                    stack.push_back(t.to);
                }
        }
        for (int s = 0; s < n; ++s)
            if (!reached[static_cast<std::size_t>(s)])
                report.push_back({FindingKind::UnreachableState,
                                  "unreachable: " + fsm.label(s)});
    }

    return report;
}

StepRecord step_fsm(const Fsm& fsm, int current, std::span<const std::string> active,
                    long tick) {
    if (current < 0 || current >= static_cast<int>(fsm.states.size()))
        throw std::invalid_argument("step_fsm: unknown state index " + std::to_string(current));
    for (const auto& releaser : active)
        if (!fsm.in_alphabet(releaser))
            throw std::invalid_argument("step_fsm: releaser not in alphabet: " + releaser);

    for (const auto& releaser : active)
        if (auto to = fsm.next(current, releaser))
            return {fsm.state_id(current), releaser, fsm.state_id(*to), tick};
    return {fsm.state_id(current), std::nullopt, fsm.state_id(current), tick};
}

std::vector<StepRecord> run_sequence(const Fsm& fsm,
                                     const std::vector<std::vector<std::string>>& stimuli) {
    std::vector<StepRecord> records;
    records.reserve(stimuli.size());
    int current = fsm.start;
    long tick = 0;
    for (const auto& active : stimuli) {
        records.push_back(step_fsm(fsm, current, active, tick++));
        current = records.back().to.index;
    }
    return records;
}

std::string serialize_transition_table(const Fsm& fsm) {
    auto rows = fsm.transitions;
    std::sort(rows.begin(), rows.end(), [](const Transition& a, const Transition& b) {
        return std::tie(a.from, a.releaser, a.to) < std::tie(b.from, b.releaser, b.to);
    });
    std::ostringstream out;
    for (const auto& t : rows)
        out << t.from << ' ' << t.releaser << ' ' << t.to << '\n';
    return out.str();
}

}  // namespace mrsim
