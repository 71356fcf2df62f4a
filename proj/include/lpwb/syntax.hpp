#pragma once

#include "lpwb/term.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lpwb {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& message)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message) {}
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    int line_;
    int column_;
    std::string message_;
};

enum class AssertionKind { Pos, Neg, PosFair, NegFair };

/// "<-", "</-", "<<-" or "<</-".
std::string_view assertion_token(AssertionKind kind);
std::string_view assertion_kind_name(AssertionKind kind);
bool is_negative(AssertionKind kind);

struct Assertion {
    AssertionKind kind = AssertionKind::Pos;
    std::vector<Term> goals;
    int source_line = 0;
    int last_line = 0;
};

struct Comment {
    std::string text;
    int line = 0;
};

/// A machine-owned line, i.e. one that starts with "%@".
struct MachineLine {
    std::string text;
    int line = 0;
};

using SourceItem = std::variant<Clause, Assertion, Comment, MachineLine>;

int first_line(const SourceItem& item);
int last_line(const SourceItem& item);

struct SourceFile {
    std::string name;
    std::vector<std::string> lines;  // without terminators
    bool trailing_newline = true;
    std::vector<SourceItem> items;   // in source order

    std::string text() const;
    Program program() const;
    std::vector<const Assertion*> assertions() const;
    /// The assertion whose line span contains `line`, or nullptr.
    const Assertion* assertion_at(int line) const;
};

inline constexpr std::string_view kMachinePrefix = "%@";
inline constexpr std::string_view kSuggestionPrefix = "%@@ ";

bool is_machine_line(std::string_view line);

SourceFile parse_file(std::string_view text, std::string name = {});
/// Parses a single term; variables with the same name are shared.
Term parse_term(std::string_view text, VarAllocator& alloc);
/// Parses "G1, ..., Gn" (optionally terminated by '.').
std::vector<Term> parse_goals(std::string_view text, VarAllocator& alloc);
Assertion parse_assertion(std::string_view text, VarAllocator& alloc);

SourceFile strip_machine_lines(const SourceFile& file);

/// Writes terms with a shared variable naming context: named variables keep
/// their source name, singletons print as `_`, other variables as V0, V1, ...
class TermWriter {
public:
    explicit TermWriter(std::span<const Term> context);
    std::string write(const Term& t);
    std::string write_conjunction(std::span<const Term> goals, std::string_view sep = ", ");

private:
    void write_rec(const Term& t, std::string& out, bool operand);
    std::string var_name(const Term& v);

    std::unordered_map<VarId, std::size_t> occurrences_;
    std::unordered_map<VarId, std::string> assigned_;
    std::unordered_map<std::string, VarId> taken_;
    std::size_t next_fresh_ = 0;
};

std::string render_term(const Term& t);
std::string render_conjunction(std::span<const Term> goals);
std::string render_assertion(AssertionKind kind, std::span<const Term> goals);
std::string render_assertion(const Assertion& a);
std::string quote_atom(std::string_view name);
/// Canonical variant-invariant rendering: every variable prints as V<k>.
std::string canonical_key(std::span<const Term> goals);

enum class Severity {
    DefMissing,
    RefMismatch,
    CodeFail,
    CodeWrongAnswer,
    Nontermination,
    FairMismatch,
    Inconclusive,
    Suggestion,
};

struct FeedbackLine {
    Severity tag = Severity::Suggestion;
    std::string text;
    int anchor_line = 0;

    /// "%@ <text>", or "%@@ <text>" for suggestions.
    std::string render() const;
};

/// A note line (omitted when empty) followed by a suggested assertion line.
std::vector<FeedbackLine> render_suggestion(AssertionKind kind,
                                            std::span<const std::pair<Term, Term>> equations,
                                            std::span<const Term> goals, std::string_view note,
                                            int anchor_line = 0);

}  // namespace lpwb
