#include "reader.hpp"

#include <cctype>
#include <string_view>

namespace lpwb::detail {

namespace {

constexpr std::string_view kSymbolChars = "+-*/\\^<>=~:.?@#&$";

bool is_symbol_char(char c) { return kSymbolChars.find(c) != std::string_view::npos; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            bool layout = skip_layout();
            Token t;
            t.line = line_;
            t.column = column_;
            t.layout_before = layout || out.empty();
            if (pos_ >= text_.size()) {
                t.kind = Tok::Eof;
                out.push_back(t);
                return out;
            }
            lex_one(t);
            out.push_back(std::move(t));
        }
    }

private:
    char at(std::size_t i) const { return i < text_.size() ? text_[i] : '\0'; }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else if ((static_cast<unsigned char>(text_[pos_]) & 0xC0) != 0x80) {
            ++column_;
        }
        ++pos_;
    }

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_, column_, message); }

    bool skip_layout() {
        bool any = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                any = true;
            } else if (c == '%') {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    advance();
                }
                any = true;
            } else if (c == '/' && at(pos_ + 1) == '*') {
                int l = line_;
                int col = column_;
                advance();
                advance();
                while (pos_ < text_.size() && !(text_[pos_] == '*' && at(pos_ + 1) == '/')) {
                    advance();
                }
                if (pos_ >= text_.size()) {
                    throw ParseError(l, col, "unterminated block comment");
                }
                advance();
                advance();
                any = true;
            } else {
                break;
            }
        }
        return any;
    }

    void lex_one(Token& t) {
        const char c = text_[pos_];
        const std::size_t start = pos_;
        if (std::islower(static_cast<unsigned char>(c))) {
            while (is_alnum(at(pos_))) {
                advance();
            }
            t.kind = Tok::Atom;
            t.text = std::string(text_.substr(start, pos_ - start));
        } else if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
            while (is_alnum(at(pos_))) {
                advance();
            }
            t.kind = Tok::Var;
            t.text = std::string(text_.substr(start, pos_ - start));
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (std::isdigit(static_cast<unsigned char>(at(pos_)))) {
                advance();
            }
            t.kind = Tok::Int;
            t.text = std::string(text_.substr(start, pos_ - start));
            try {
                t.value = std::stoll(t.text);
            } catch (const std::out_of_range&) {
                throw ParseError(t.line, t.column, "integer out of range");
            }
        } else if (c == '\'') {
            t.kind = Tok::QuotedAtom;
            t.text = quoted();
        } else if (c == '(' || c == ')' || c == '[' || c == ']' || c == ',' || c == '|' || c == '{' ||
                   c == '}') {
            advance();
            t.kind = Tok::Punct;
            t.text = std::string(1, c);
        } else if (c == '.' && (pos_ + 1 >= text_.size() || std::isspace(static_cast<unsigned char>(at(pos_ + 1))) ||
                                at(pos_ + 1) == '%')) {
            advance();
            t.kind = Tok::End;
            t.text = ".";
        } else if (is_symbol_char(c)) {
            while (is_symbol_char(at(pos_))) {
                // a trailing '.' followed by layout terminates the clause
                if (at(pos_) == '.' && pos_ > start &&
                    (pos_ + 1 >= text_.size() || std::isspace(static_cast<unsigned char>(at(pos_ + 1))))) {
                    break;
                }
                advance();
            }
            t.kind = Tok::Symbol;
            t.text = std::string(text_.substr(start, pos_ - start));
        } else {
            fail(std::string("unexpected character '") + c + "'");
        }
    }

    std::string quoted() {
        int l = line_;
        int col = column_;
        advance();  // opening quote
        std::string out;
        for (;;) {
            if (pos_ >= text_.size()) {
                throw ParseError(l, col, "unterminated quoted atom");
            }
            char c = text_[pos_];
            if (c == '\'') {
                if (at(pos_ + 1) == '\'') {
                    out.push_back('\'');
                    advance();
                    advance();
                    continue;
                }
                advance();
                return out;
            }
            if (c == '\\') {
                char e = at(pos_ + 1);
                switch (e) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case '\\': out.push_back('\\'); break;
                case '\'': out.push_back('\''); break;
                default: fail("unknown escape sequence in quoted atom");
                }
                advance();
                advance();
                continue;
            }
            if (c == '\n') {
                fail("newline in quoted atom");
            }
            out.push_back(c);
            advance();
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) { return Lexer(text).run(); }

const Token& Reader::peek(std::size_t ahead) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
}

const Token& Reader::next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) {
        ++pos_;
    }
    return t;
}

bool Reader::at_symbol(std::string_view s) const { return peek().kind == Tok::Symbol && peek().text == s; }
bool Reader::at_punct(std::string_view s) const { return peek().kind == Tok::Punct && peek().text == s; }

void Reader::expect_punct(std::string_view s) {
    if (!at_punct(s)) {
        fail("expected '" + std::string(s) + "'");
    }
    next();
}

void Reader::expect_symbol(std::string_view s) {
    if (!at_symbol(s)) {
        fail("expected '" + std::string(s) + "'");
    }
    next();
}

void Reader::expect_end() {
    if (peek().kind != Tok::End) {
        fail("expected ',' or '.'");
    }
    next();
}

void Reader::fail(const std::string& message) const { fail_at(peek(), message); }

void Reader::fail_at(const Token& t, const std::string& message) const {
    std::string where;
    switch (t.kind) {
    case Tok::Eof: where = " at end of input"; break;
    case Tok::End: where = " before '.'"; break;
    default: where = " near '" + t.text + "'"; break;
    }
    throw ParseError(t.line, t.column, message + where);
}

Term Reader::variable(const std::string& name) {
    if (name == "_") {
        return alloc_.fresh();
    }
    auto it = scope_.find(name);
    if (it == scope_.end()) {
        it = scope_.emplace(name, alloc_.fresh(name)).first;
    }
    return it->second;
}

Term Reader::term() {
    Term lhs = primary();
    if (at_symbol("=") || at_symbol("\\=")) {
        std::string op = next().text;
        Term rhs = primary();
        return Term::compound(op, {lhs, rhs});
    }
    if (at_symbol("~>")) {
        fail("viewer assertions (~>) are unsupported");
    }
    return lhs;
}

Term Reader::goal() {
    const Token& start = peek();
    Term g = term();
    if (!g.is_callable()) {
        fail_at(start, "goal must be callable");
    }
    return g;
}

std::vector<Term> Reader::conjunction() {
    std::vector<Term> goals{goal()};
    while (at_punct(",")) {
        next();
        goals.push_back(goal());
    }
    return goals;
}

Term Reader::primary() {
    const Token t = next();
    switch (t.kind) {
    case Tok::Var: return variable(t.text);
    case Tok::Int: return Term::integer(t.value);
    case Tok::Atom:
    case Tok::QuotedAtom: {
        if (at_punct("(") && !peek().layout_before) {
            next();
            std::vector<Term> args{term()};
            while (at_punct(",")) {
                next();
                args.push_back(term());
            }
            expect_punct(")");
            return Term::compound(t.text, std::move(args));
        }
        return Term::atom(t.text);
    }
    case Tok::Symbol:
        if (t.text == "-" && peek().kind == Tok::Int && !peek().layout_before) {
            return Term::integer(-next().value);
        }
        fail_at(t, "unexpected operator");
    case Tok::Punct:
        if (t.text == "(") {
            Term inner = term();
            expect_punct(")");
            return inner;
        }
        if (t.text == "[") {
            if (at_punct("]")) {
                next();
                return Term::nil();
            }
            return list_tail();
        }
        fail_at(t, "unexpected '" + t.text + "'");
    case Tok::End: fail_at(t, "unexpected end of clause");
    case Tok::Eof: fail_at(t, "unexpected end of input");
    }
    fail_at(t, "unexpected token");
}

Term Reader::list_tail() {
    std::vector<Term> items{term()};
    while (at_punct(",")) {
        next();
        items.push_back(term());
    }
    std::optional<Term> tail;
    if (at_punct("|")) {
        next();
        tail = term();
    }
    expect_punct("]");
    return Term::list(items, tail);
}

}  // namespace lpwb::detail
