#include "lpwb/syntax.hpp"

#include "reader.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace lpwb {

using detail::Reader;
using detail::Tok;

std::string_view assertion_token(AssertionKind kind) {
    switch (kind) {
    case AssertionKind::Pos: return "<-";
    case AssertionKind::Neg: return "</-";
    case AssertionKind::PosFair: return "<<-";
    case AssertionKind::NegFair: return "<</-";
    }
    return "<-";
}

std::string_view assertion_kind_name(AssertionKind kind) {
    switch (kind) {
    case AssertionKind::Pos: return "POS";
    case AssertionKind::Neg: return "NEG";
    case AssertionKind::PosFair: return "POSFAIR";
    case AssertionKind::NegFair: return "NEGFAIR";
    }
    return "POS";
}

bool is_negative(AssertionKind kind) { return kind == AssertionKind::Neg || kind == AssertionKind::NegFair; }

namespace {
std::optional<AssertionKind> assertion_kind_of(std::string_view token) {
    if (token == "<-") return AssertionKind::Pos;
    if (token == "</-") return AssertionKind::Neg;
    if (token == "<<-") return AssertionKind::PosFair;
    if (token == "<</-") return AssertionKind::NegFair;
    return std::nullopt;
}

std::vector<std::string> split_lines(std::string_view text, bool& trailing_newline) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            trailing_newline = false;
            return lines;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    trailing_newline = true;
    return lines;
}

std::string_view ltrim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    return s;
}
}  // namespace

int first_line(const SourceItem& item) {
    return std::visit(
        [](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Clause> || std::is_same_v<T, Assertion>) {
                return x.source_line;
            } else {
                return x.line;
            }
        },
        item);
}

int last_line(const SourceItem& item) {
    return std::visit(
        [](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Clause> || std::is_same_v<T, Assertion>) {
                return x.last_line;
            } else {
                return x.line;
            }
        },
        item);
}

bool is_machine_line(std::string_view line) { return line.starts_with(kMachinePrefix); }

std::string SourceFile::text() const {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        out += lines[i];
        if (i + 1 < lines.size() || trailing_newline) {
            out += '\n';
        }
    }
    return out;
}

Program SourceFile::program() const {
    std::vector<Clause> clauses;
    for (const SourceItem& item : items) {
        if (const auto* c = std::get_if<Clause>(&item)) {
            clauses.push_back(*c);
        }
    }
    return Program(std::move(clauses));
}

std::vector<const Assertion*> SourceFile::assertions() const {
    std::vector<const Assertion*> out;
    for (const SourceItem& item : items) {
        if (const auto* a = std::get_if<Assertion>(&item)) {
            out.push_back(a);
        }
    }
    return out;
}

const Assertion* SourceFile::assertion_at(int line) const {
    for (const Assertion* a : assertions()) {
        if (a->source_line <= line && line <= a->last_line) {
            return a;
        }
    }
    return nullptr;
}

SourceFile parse_file(std::string_view text, std::string name) {
    SourceFile file;
    file.name = std::move(name);
    file.lines = split_lines(text, file.trailing_newline);

    std::vector<SourceItem> items;
    for (std::size_t i = 0; i < file.lines.size(); ++i) {
        std::string_view l = file.lines[i];
        const int line = static_cast<int>(i) + 1;
        if (is_machine_line(l)) {
            items.emplace_back(MachineLine{std::string(l), line});
        } else if (ltrim(l).starts_with('%')) {
            items.emplace_back(Comment{std::string(l), line});
        }
    }

    VarAllocator alloc;
    Reader r(detail::tokenize(text), alloc);
    while (!r.at_eof()) {
        r.new_scope();
        const detail::Token start = r.peek();
        if (start.kind == Tok::Symbol) {
            if (auto kind = assertion_kind_of(start.text)) {
                r.next();
                Assertion a{*kind, r.conjunction(), start.line, 0};
                a.last_line = r.peek().line;
                r.expect_end();
                items.emplace_back(std::move(a));
                continue;
            }
            if (start.text == ":-") {
                r.fail("directives are not supported");
            }
        }
        Term head = r.term();
        if (!head.is_callable()) {
            r.fail_at(start, "clause head must be an atom or compound term");
        }
        Clause c{head, {}, start.line, 0};
        if (r.at_symbol(":-")) {
            r.next();
            c.body = r.conjunction();
        }
        c.last_line = r.peek().line;
        r.expect_end();
        items.emplace_back(std::move(c));
    }

    std::stable_sort(items.begin(), items.end(),
                     [](const SourceItem& a, const SourceItem& b) { return first_line(a) < first_line(b); });
    file.items = std::move(items);
    return file;
}

Term parse_term(std::string_view text, VarAllocator& alloc) {
    Reader r(detail::tokenize(text), alloc);
    Term t = r.term();
    if (r.peek().kind == Tok::End) {
        r.next();
    }
    if (!r.at_eof()) {
        r.fail("unexpected trailing input");
    }
    return t;
}

std::vector<Term> parse_goals(std::string_view text, VarAllocator& alloc) {
    Reader r(detail::tokenize(text), alloc);
    std::vector<Term> goals = r.conjunction();
    if (r.peek().kind == Tok::End) {
        r.next();
    }
    if (!r.at_eof()) {
        r.fail("expected ',' or '.'");
    }
    return goals;
}

Assertion parse_assertion(std::string_view text, VarAllocator& alloc) {
    Reader r(detail::tokenize(text), alloc);
    const detail::Token start = r.peek();
    auto kind = start.kind == Tok::Symbol ? assertion_kind_of(start.text) : std::nullopt;
    if (!kind) {
        r.fail("expected an assertion token");
    }
    r.next();
    Assertion a{*kind, r.conjunction(), start.line, 0};
    a.last_line = r.peek().line;
    r.expect_end();
    if (!r.at_eof()) {
        r.fail("unexpected trailing input");
    }
    return a;
}

SourceFile strip_machine_lines(const SourceFile& file) {
    std::string text;
    bool any = false;
    for (std::size_t i = 0; i < file.lines.size(); ++i) {
        if (is_machine_line(file.lines[i])) {
            any = true;
            continue;
        }
        text += file.lines[i];
        if (i + 1 < file.lines.size() || file.trailing_newline) {
            text += '\n';
        }
    }
    if (!any) {
        return file;
    }
    return parse_file(text, file.name);
}

// ---------------------------------------------------------------------------
// Rendering

namespace {
bool is_plain_atom(std::string_view s) {
    if (s == "[]") {
        return true;
    }
    if (s.empty() || !std::islower(static_cast<unsigned char>(s.front()))) {
        return false;
    }
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool is_infix(const Term& t) { return t.is_compound() && t.arity() == 2 && (t.name() == "=" || t.name() == "\\="); }

void count_occurrences(const Term& t, std::unordered_map<VarId, std::size_t>& occ) {
    if (t.is_var()) {
        ++occ[t.var_id()];
        return;
    }
    for (const Term& a : t.args()) {
        count_occurrences(a, occ);
    }
}

void collect_names(const Term& t, std::unordered_map<std::string, VarId>& taken) {
    if (t.is_var()) {
        if (!t.name().empty()) {
            taken.emplace(t.name(), t.var_id());
        }
        return;
    }
    for (const Term& a : t.args()) {
        collect_names(a, taken);
    }
}
}  // namespace

std::string quote_atom(std::string_view name) {
    if (is_plain_atom(name)) {
        return std::string(name);
    }
    std::string out = "'";
    for (char c : name) {
        switch (c) {
        case '\'': out += "\\'"; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '\'';
    return out;
}

TermWriter::TermWriter(std::span<const Term> context) {
    for (const Term& t : context) {
        count_occurrences(t, occurrences_);
        collect_names(t, taken_);
    }
}

std::string TermWriter::var_name(const Term& v) {
    if (auto it = assigned_.find(v.var_id()); it != assigned_.end()) {
        return it->second;
    }
    std::string name;
    if (!v.name().empty()) {
        auto it = taken_.find(v.name());
        if (it == taken_.end() || it->second == v.var_id()) {
            taken_.emplace(v.name(), v.var_id());
            name = v.name();
        }
    }
    if (name.empty()) {
        auto occ = occurrences_.find(v.var_id());
        if (occ == occurrences_.end() || occ->second <= 1) {
            return "_";
        }
        do {
            name = "V" + std::to_string(next_fresh_++);
        } while (taken_.contains(name));
        taken_.emplace(name, v.var_id());
    }
    assigned_.emplace(v.var_id(), name);
    return name;
}

void TermWriter::write_rec(const Term& t, std::string& out, bool operand) {
    switch (t.kind()) {
    case TermKind::Var: out += var_name(t); return;
    case TermKind::Int: out += std::to_string(t.int_value()); return;
    case TermKind::Atom: out += quote_atom(t.name()); return;
    case TermKind::Compound: break;
    }
    if (t.is_cons()) {
        out += '[';
        Term cur = t;
        bool first = true;
        while (cur.is_cons()) {
            if (!first) {
                out += ',';
            }
            first = false;
            write_rec(cur.arg(0), out, false);
            cur = cur.arg(1);
        }
        if (!cur.is_nil()) {
            out += '|';
            write_rec(cur, out, false);
        }
        out += ']';
        return;
    }
    if (is_infix(t)) {
        if (operand) {
            out += '(';
        }
        write_rec(t.arg(0), out, true);
        out += ' ';
        out += t.name();
        out += ' ';
        write_rec(t.arg(1), out, true);
        if (operand) {
            out += ')';
        }
        return;
    }
    out += quote_atom(t.name());
    out += '(';
    for (std::size_t i = 0; i < t.arity(); ++i) {
        if (i > 0) {
            out += ',';
        }
        write_rec(t.arg(i), out, false);
    }
    out += ')';
}

std::string TermWriter::write(const Term& t) {
    std::string out;
    write_rec(t, out, false);
    return out;
}

std::string TermWriter::write_conjunction(std::span<const Term> goals, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < goals.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        write_rec(goals[i], out, false);
    }
    return out;
}

std::string render_term(const Term& t) { return TermWriter(std::span<const Term>(&t, 1)).write(t); }

std::string render_conjunction(std::span<const Term> goals) { return TermWriter(goals).write_conjunction(goals); }

std::string render_assertion(AssertionKind kind, std::span<const Term> goals) {
    return std::string(assertion_token(kind)) + " " + render_conjunction(goals) + ".";
}

std::string render_assertion(const Assertion& a) { return render_assertion(a.kind, a.goals); }

std::string canonical_key(std::span<const Term> goals) {
    std::unordered_map<VarId, Term> renaming;
    std::size_t n = 0;
    std::vector<Term> renamed;
    for (const Term& v : term_variables(goals)) {
        renaming.emplace(v.var_id(), Term::var(v.var_id(), "V" + std::to_string(n++)));
    }
    for (const Term& g : goals) {
        renamed.push_back(instantiate(g, renaming));
    }
    return TermWriter(renamed).write_conjunction(renamed, ",");
}

std::string FeedbackLine::render() const {
    if (tag == Severity::Suggestion) {
        return std::string(kSuggestionPrefix) + text;
    }
    return std::string(kMachinePrefix) + " " + text;
}

std::vector<FeedbackLine> render_suggestion(AssertionKind kind, std::span<const std::pair<Term, Term>> equations,
                                            std::span<const Term> goals, std::string_view note, int anchor_line) {
    std::vector<FeedbackLine> out;
    if (!note.empty()) {
        std::string text = "% " + std::string(note);
        if (text.back() != '.' && text.back() != ':' && text.back() != '!') {
            text += '.';
        }
        out.push_back(FeedbackLine{Severity::Suggestion, std::move(text), anchor_line});
    }
    std::vector<Term> all;
    for (const auto& [var, value] : equations) {
        all.push_back(Term::compound("=", {var, value}));
    }
    all.insert(all.end(), goals.begin(), goals.end());
    out.push_back(FeedbackLine{Severity::Suggestion, render_assertion(kind, all), anchor_line});
    return out;
}

}  // namespace lpwb
