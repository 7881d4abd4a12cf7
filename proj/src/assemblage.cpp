#include "mrsim/assemblage.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mrsim {

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
    std::ostringstream out;
    if (!file.empty()) out << file << ':';
    out << d.span.line << ':' << d.span.column << ": " << d.message;
    return out.str();
}

namespace {

enum class TokKind {
    StateIdent,
    ReleaserIdent,
    Equals,
    Comma,
    Dot,
    LParen,
    RParen,
    Pipe,
    Arrow,
    End,
    Error,
};

struct Token {
    TokKind kind = TokKind::End;
    std::string_view text;
    SourceSpan span;
    std::string error;  // set for TokKind::Error
};

bool ident_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_';
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_trivia();
        const SourceSpan here{line_, col_, 1};
        if (pos_ >= src_.size()) return {TokKind::End, {}, here, {}};

        const char c = src_[pos_];
        switch (c) {
            case '=': return single(TokKind::Equals);
            case ',': return single(TokKind::Comma);
            case '.': return single(TokKind::Dot);
            case '(': return single(TokKind::LParen);
            case ')': return single(TokKind::RParen);
            case '|': return single(TokKind::Pipe);
            case '-':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                    Token t{TokKind::Arrow, src_.substr(pos_, 2), {line_, col_, 2}, {}};
                    advance();
                    advance();
                    return t;
                }
                return error_token("expected '->' after '-'", 1);
            default: break;
        }

        if (ident_char(c)) return lex_ident();
        return error_token(describe_byte(c), 1);
    }

private:
    Token single(TokKind kind) {
        Token t{kind, src_.substr(pos_, 1), {line_, col_, 1}, {}};
        advance();
        return t;
    }

    Token lex_ident() {
        const SourceSpan start{line_, col_, 1};
        const std::size_t begin = pos_;
        while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
        const std::string_view text = src_.substr(begin, pos_ - begin);
        SourceSpan span = start;
        span.length = static_cast<int>(text.size());
        if (is_state_label(text)) return {TokKind::StateIdent, text, span, {}};
        if (is_releaser_name(text)) return {TokKind::ReleaserIdent, text, span, {}};
        return {TokKind::Error, text, span,
                "mixed-case or malformed identifier '" + std::string(text) +
                    "' (releasers are lowercase, states uppercase)"};
    }

    Token error_token(std::string message, int length) {
        Token t{TokKind::Error, src_.substr(pos_, static_cast<std::size_t>(length)),
                {line_, col_, length}, std::move(message)};
        advance();
        return t;
    }

    static std::string describe_byte(char c) {
        const unsigned char u = static_cast<unsigned char>(c);
        if (u >= 0x20 && u < 0x7F) return std::string("unexpected character '") + c + "'";
        char buf[32];
        std::snprintf(buf, sizeof buf, "unexpected byte 0x%02X", u);
        return buf;
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (pos_ >= src_.size()) return;
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { bump(); }

    ParseResult run() {
        AssemblageAst ast;
        parse_header(ast);
        while (!at(TokKind::End)) {
            if (!parse_def(ast)) recover();
            if (saw_final_dot_ && !at(TokKind::End)) {
                report(cur_.span, "content after final '.'");
                break;
            }
        }
        if (ast.state_defs.empty() && diagnostics_.empty())
            report(cur_.span, "expected at least one state definition");
        if (!saw_final_dot_ && diagnostics_.empty() && !ast.state_defs.empty())
            // tolerated: ',' accepted as the final terminator
            saw_final_dot_ = true;
        check_semantics(ast);

        ParseResult result;
        result.diagnostics = std::move(diagnostics_);
        if (result.diagnostics.empty()) result.ast = std::move(ast);
        return result;
    }

private:
    void parse_header(AssemblageAst& ast) {
        if (!expect(TokKind::StateIdent, "expected process name")) return;
        ast.process_name = std::string(prev_.text);
        if (!expect(TokKind::Equals, "expected '=' after process name")) return;
        if (!expect(TokKind::StateIdent, "expected start state reference")) return;
        ast.start_ref = std::string(prev_.text);
        start_span_ = prev_.span;
        expect(TokKind::Comma, "expected ',' after header");
    }

    bool parse_def(AssemblageAst& ast) {
        if (!expect(TokKind::StateIdent, "expected state name")) return false;
        StateDef def;
        def.name = std::string(prev_.text);
        def.name_span = prev_.span;
        if (!expect(TokKind::Equals, "expected '=' after state name")) return false;
        if (!expect(TokKind::LParen, "expected '(' to open alternatives")) return false;

        while (true) {
            Alternative alt;
            if (!expect(TokKind::ReleaserIdent, "expected releaser name")) return false;
            alt.releaser = std::string(prev_.text);
            alt.releaser_span = prev_.span;
            if (!expect(TokKind::Arrow, "expected '->' after releaser")) return false;
            if (!expect(TokKind::StateIdent, "expected target state")) return false;
            alt.target = std::string(prev_.text);
            alt.target_span = prev_.span;
            def.alternatives.push_back(std::move(alt));
            if (at(TokKind::Pipe)) {
                bump();
                continue;
            }
            break;
        }
        if (!expect(TokKind::RParen, "expected ')' or '|' after alternative")) return false;

        if (at(TokKind::Dot)) {
            saw_final_dot_ = true;
            bump();
        } else if (at(TokKind::Comma)) {
            bump();
        } else {
            report(cur_.span, "expected ',' or '.' after state definition");
            return false;
        }
        ast.state_defs.push_back(std::move(def));
        return true;
    }

    void check_semantics(const AssemblageAst& ast) {
        std::map<std::string_view, const StateDef*> defs;
        for (const auto& def : ast.state_defs) {
            auto [it, inserted] = defs.try_emplace(def.name, &def);
            if (!inserted)
                report(def.name_span, "duplicate state definition: " + def.name);
        }
        if (!ast.start_ref.empty() && !defs.count(ast.start_ref))
            report(start_span_, "undefined state reference: " + ast.start_ref);
        for (const auto& def : ast.state_defs) {
            std::set<std::string_view> seen;
            for (const auto& alt : def.alternatives) {
                if (!defs.count(alt.target))
                    report(alt.target_span, "undefined state reference: " + alt.target);
                if (!seen.insert(alt.releaser).second)
                    report(alt.releaser_span,
                           "duplicate releaser in state " + def.name + ": " + alt.releaser);
            }
        }
    }

    // Skip to just after the next ',' or '.' so later defs still get checked.
    void recover() {
        while (!at(TokKind::End)) {
            const TokKind k = cur_.kind;
            bump();
            if (k == TokKind::Comma || k == TokKind::Dot) return;
        }
    }

    bool at(TokKind k) const { return cur_.kind == k; }

    bool expect(TokKind k, std::string_view message) {
        if (cur_.kind == TokKind::Error) {
            report(cur_.span, cur_.error);
            bump();
            return false;
        }
        if (cur_.kind != k) {
            report(cur_.span, std::string(message));
            return false;
        }
        bump();
        return true;
    }

    void bump() {
        prev_ = cur_;
        cur_ = lexer_.next();
    }

    void report(SourceSpan span, std::string message) {
        diagnostics_.push_back({span, std::move(message)});
    }

    Lexer lexer_;
    Token cur_, prev_;
    SourceSpan start_span_;
    bool saw_final_dot_ = false;
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace

ParseResult parse_assemblage(std::string_view source) { return Parser(source).run(); }

std::optional<std::vector<std::pair<std::string, int>>> table_numbering_for(
    const std::vector<std::string>& labels) {
    static const std::vector<std::vector<std::pair<std::string, int>>> known = {
        {{"OFF", 0},
         {"DELIVER_BLUE", 1},
         {"DELIVER_RED", 2},
         {"ACQUIRE_BLUE", 3},
         {"WANDER", 4},
         {"ACQUIRE_RED", 5}},
        {{"OFF", 0}, {"GO_TO_BALL", 1}, {"BEHIND_BALL", 2}, {"WANDER", 3}},
        {{"OFF", 0}, {"GO_TO_BALL", 1}, {"DEFEND", 2}, {"WANDER", 3}},
    };
    const std::set<std::string> have(labels.begin(), labels.end());
    for (const auto& numbering : known) {
        std::set<std::string> want;
        for (const auto& [label, _] : numbering) want.insert(label);
        if (want == have) return numbering;
    }
    return std::nullopt;
}

Fsm compile_assemblage(const AssemblageAst& ast) {
    std::vector<std::string> labels;
    labels.push_back(ast.start_ref);
    for (const auto& def : ast.state_defs)
        if (def.name != ast.start_ref) labels.push_back(def.name);

    Fsm fsm;
    if (auto numbering = table_numbering_for(labels)) {
        fsm.states.resize(numbering->size());
        for (const auto& [label, index] : *numbering)
            fsm.states[static_cast<std::size_t>(index)] = label;
    } else {
        fsm.states = labels;
    }
    fsm.start = *fsm.index_of(ast.start_ref);
    fsm.finals = {fsm.start};
    for (const auto& def : ast.state_defs)
        for (const auto& alt : def.alternatives)
            fsm.add_transition(def.name, alt.releaser, alt.target);
    return fsm;
}

std::string render_assemblage(const Fsm& fsm, std::string_view process_name) {
    if (fsm.states.empty()) throw std::domain_error("render_assemblage: no states");
    if (!is_state_label(process_name))
        throw std::domain_error("render_assemblage: bad process name");
    for (const auto& label : fsm.states)
        if (!is_state_label(label))
            throw std::domain_error("render_assemblage: unrenderable state label: " + label);

    std::set<std::string> used;
    for (const auto& t : fsm.transitions) used.insert(t.releaser);
    for (const auto& r : fsm.alphabet)
        if (!is_releaser_name(r) || !used.count(r))
            throw std::domain_error("render_assemblage: alphabet symbol unused or malformed: " + r);

    // Definition order: start first, remaining states by index.
    std::vector<int> order{fsm.start};
    for (int s = 0; s < static_cast<int>(fsm.states.size()); ++s)
        if (s != fsm.start) order.push_back(s);

    std::ostringstream out;
    out << process_name << " = " << fsm.label(fsm.start) << ",\n";
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int s = order[i];
        const auto alts = fsm.outgoing(s);
        if (alts.empty())
            throw std::domain_error("render_assemblage: state has no alternatives: " +
                                    fsm.label(s));
        out << fsm.label(s) << " = (";
        for (std::size_t k = 0; k < alts.size(); ++k) {
            if (k) out << '|';
            out << alts[k].releaser << "->" << fsm.label(alts[k].to);
        }
        out << ')' << (i + 1 == order.size() ? '.' : ',') << '\n';
    }
    return out.str();
}

Fsm compile_source(std::string_view source, std::string_view file) {
    auto result = parse_assemblage(source);
    if (!result.ok()) {
        std::ostringstream out;
        for (const auto& d : result.diagnostics) out << format_diagnostic(d, file) << '\n';
        throw std::runtime_error(out.str());
    }
    return compile_assemblage(*result.ast);
}

}  // namespace mrsim
