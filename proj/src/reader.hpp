#pragma once

// Tokenizer and term reader shared by the source, CHR and implication readers.

#include "lpwb/syntax.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lpwb::detail {

enum class Tok { Atom, QuotedAtom, Var, Int, Punct, Symbol, End, Eof };

struct Token {
    Tok kind = Tok::Eof;
    std::string text;
    std::int64_t value = 0;
    int line = 1;
    int column = 1;
    bool layout_before = false;
};

std::vector<Token> tokenize(std::string_view text);

class Reader {
public:
    Reader(std::vector<Token> tokens, VarAllocator& alloc) : toks_(std::move(tokens)), alloc_(alloc) {}

    const Token& peek(std::size_t ahead = 0) const;
    const Token& next();
    bool at_eof() const { return peek().kind == Tok::Eof; }
    bool at_symbol(std::string_view s) const;
    bool at_punct(std::string_view s) const;
    void expect_punct(std::string_view s);
    void expect_symbol(std::string_view s);
    void expect_end();
    [[noreturn]] void fail(const std::string& message) const;
    [[noreturn]] void fail_at(const Token& t, const std::string& message) const;

    /// Starts a new variable scope (one per clause or assertion).
    void new_scope() { scope_.clear(); }

    /// primary [ ('=' | '\=') primary ]
    Term term();
    /// callable goal, comma separated, up to (not including) a stop token.
    std::vector<Term> conjunction();
    Term goal();

private:
    Term primary();
    Term list_tail();
    Term variable(const std::string& name);

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    VarAllocator& alloc_;
    std::unordered_map<std::string, Term> scope_;
};

}  // namespace lpwb::detail
