#include "lpwb/chr.hpp"

#include "lpwb/syntax.hpp"
#include "reader.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace lpwb {

using detail::Reader;
using detail::Tok;

std::unordered_set<PredKey, PredKeyHash> ChrProgram::constraints() const {
    std::unordered_set<PredKey, PredKeyHash> out;
    for (const ChrRule& r : rules) {
        for (const Term& h : r.heads) {
            out.insert(pred_key(h));
        }
        for (const Term& b : r.body) {
            out.insert(pred_key(b));
        }
    }
    return out;
}

bool ChrProgram::is_constraint(const Term& goal) const {
    if (!goal.is_callable()) {
        return false;
    }
    const PredKey key = pred_key(goal);
    for (const ChrRule& r : rules) {
        for (const Term& h : r.heads) {
            if (pred_key(h) == key) {
                return true;
            }
        }
        for (const Term& b : r.body) {
            if (pred_key(b) == key) {
                return true;
            }
        }
    }
    return false;
}

ChrProgram parse_chr(std::string_view text) {
    ChrProgram program;
    VarAllocator alloc;
    Reader r(detail::tokenize(text), alloc);
    while (!r.at_eof()) {
        r.new_scope();
        if (r.at_symbol(":-")) {
            r.next();
            if (!(r.peek().kind == Tok::Atom && r.peek().text == "option")) {
                // chr_constraint declarations and the like carry no meaning here
                while (r.peek().kind != Tok::End && !r.at_eof()) {
                    r.next();
                }
                r.expect_end();
                continue;
            }
            Term d = r.term();
            r.expect_end();
            if (d.is_compound() && d.name() == "option" && d.arity() == 2 && d.arg(0).is_atom("already_in_store")) {
                program.already_in_store = !d.arg(1).is_atom("off");
            }
            continue;
        }
        const detail::Token start = r.peek();
        if (start.kind != Tok::Atom && start.kind != Tok::QuotedAtom) {
            r.fail("expected a rule name");
        }
        ChrRule rule;
        rule.name = r.next().text;
        rule.source_line = start.line;
        r.expect_symbol("@");
        rule.heads = r.conjunction();
        if (r.at_symbol("<=>")) {
            rule.kind = ChrRule::Kind::Simplification;
        } else if (r.at_symbol("==>")) {
            rule.kind = ChrRule::Kind::Propagation;
        } else {
            r.fail("expected '<=>' or '==>'");
        }
        r.next();
        std::vector<Term> body = r.conjunction();
        if (r.at_punct("|")) {
            r.next();
            for (const Term& g : body) {
                if (g.is_atom("true")) {
                    continue;
                }
                if (!(g.is_compound() && g.name() == "\\=" && g.arity() == 2)) {
                    r.fail("guards may only contain T1 \\= T2 conditions");
                }
                rule.guard.push_back(ChrGuard{g.arg(0), g.arg(1)});
            }
            body = r.conjunction();
        }
        for (const Term& g : body) {
            if (g.is_atom("false") || g.is_atom("fail")) {
                rule.fails = true;
            } else if (!g.is_atom("true")) {
                rule.body.push_back(g);
            }
        }
        r.expect_end();
        program.rules.push_back(std::move(rule));
    }
    return program;
}

const ChrProgram& family_rules() {
    static const ChrProgram rules = parse_chr(
        ":- option(already_in_store, on).\n"
        "c1 @ child_of(C,P1), child_of(C,P2), child_of(C,P3) <=> P1 \\= P2, P2 \\= P3, P1 \\= P3 | false.\n"
        "c2 @ child_of(A,B) ==> ancestor_of(B,A).\n"
        "c3 @ ancestor_of(A,A) <=> false.\n"
        "c4 @ ancestor_of(A,B), ancestor_of(B,C) ==> ancestor_of(A,C).\n");
    return rules;
}

namespace {

using Bindings = std::unordered_map<VarId, Term>;

struct Entry {
    std::size_t id;
    Term term;
    bool alive;
};

class ChrRun {
public:
    ChrRun(const ChrProgram& program, std::span<const Term> initial, const DifStore& difs)
        : program_(program), difs_(difs) {
        VarId top = max_var_id(initial);
        for (const Disequation& d : difs.pending()) {
            const Term sides[] = {d.lhs, d.rhs};
            top = std::max(top, max_var_id(sides));
        }
        alloc_ = VarAllocator(top + 1);
        for (const Term& c : initial) {
            add(c);
        }
    }

    ChrOutcome run(std::int64_t max_firings) {
        std::int64_t firings = 0;
        while (true) {
            std::optional<std::pair<std::size_t, Bindings>> found;
            std::vector<std::size_t> tuple;
            for (std::size_t ri = 0; ri < program_.rules.size() && !found; ++ri) {
                Bindings map;
                tuple.clear();
                if (match_heads(ri, 0, tuple, map)) {
                    found.emplace(ri, std::move(map));
                }
            }
            if (!found) {
                ChrConsistent out{{}, std::move(trace_)};
                for (const Entry& e : store_) {
                    if (e.alive) {
                        out.store.push_back(e.term);
                    }
                }
                return out;
            }
            if (firings >= max_firings) {
                return ChrBudgetExhausted{std::move(trace_)};
            }
            ++firings;
            const ChrRule& rule = program_.rules[found->first];
            trace_.push_back(ChrFiring{found->first, tuple});
            if (rule.kind == ChrRule::Kind::Simplification) {
                for (std::size_t id : tuple) {
                    store_[id].alive = false;
                }
            } else {
                history_.emplace(found->first, tuple);
            }
            if (rule.fails) {
                return ChrInconsistent{std::move(trace_)};
            }
            for (const Term& b : rule.body) {
                add(instantiate_fresh(b, found->second));
            }
        }
    }

private:
    void add(const Term& c) {
        if (program_.already_in_store) {
            for (const Entry& e : store_) {
                if (e.alive && identical(e.term, c)) {
                    return;
                }
            }
        }
        store_.push_back(Entry{store_.size(), c, true});
    }

    bool match_heads(std::size_t ri, std::size_t k, std::vector<std::size_t>& tuple, Bindings& map) {
        const ChrRule& rule = program_.rules[ri];
        if (k == rule.heads.size()) {
            if (rule.kind == ChrRule::Kind::Propagation && history_.count({ri, tuple})) {
                return false;
            }
            return guard_holds(rule, map);
        }
        const Term& head = rule.heads[k];
        for (const Entry& e : store_) {
            if (!e.alive || std::find(tuple.begin(), tuple.end(), e.id) != tuple.end()) {
                continue;
            }
            Bindings extended = map;
            if (!match(head, e.term, extended)) {
                continue;
            }
            tuple.push_back(e.id);
            if (match_heads(ri, k + 1, tuple, extended)) {
                map = std::move(extended);
                return true;
            }
            tuple.pop_back();
        }
        return false;
    }

    bool guard_holds(const ChrRule& rule, Bindings map) {
        for (const ChrGuard& g : rule.guard) {
            Term l = instantiate_fresh(g.lhs, map);
            Term r = instantiate_fresh(g.rhs, map);
            if (unify(l, r, Substitution{}, difs_)) {
                return false;
            }
        }
        return true;
    }

    // Rule variables not bound by the heads become fresh store variables.
    Term instantiate_fresh(const Term& t, Bindings& map) {
        for (const Term& v : term_variables(std::span<const Term>(&t, 1))) {
            if (!map.count(v.var_id())) {
                map.emplace(v.var_id(), alloc_.fresh());
            }
        }
        return instantiate(t, map);
    }

    const ChrProgram& program_;
    const DifStore& difs_;
    VarAllocator alloc_;
    std::vector<Entry> store_;
    std::vector<ChrFiring> trace_;
    std::set<std::pair<std::size_t, std::vector<std::size_t>>> history_;
};

}  // namespace

ChrOutcome chr_run(const ChrProgram& program, std::span<const Term> initial, const DifStore& difs,
                   std::int64_t max_firings) {
    return ChrRun(program, initial, difs).run(max_firings);
}

Verdict chr_verdict(const ChrProgram& program, const Program& library, std::span<const Term> goals,
                    const Budget& budget) {
    if (goals.empty()) {
        return Verdict::yes(Answer{});
    }
    std::vector<Term> constraints;
    std::vector<Term> others;
    for (const Term& g : goals) {
        (program.is_constraint(g) ? constraints : others).push_back(g);
    }

    std::vector<Answer> answers;
    bool exhausted = true;
    if (others.empty()) {
        answers.emplace_back();
    } else {
        Outcome o;
        try {
            o = solve_dfs(library, others, budget, Want::All);
        } catch (const UnknownPredicate& e) {
            return Verdict::unspecified(Verdict::Reason::UnknownPredicate, e.key().str());
        }
        if (std::holds_alternative<FiniteFailure>(o)) {
            return Verdict::no();
        }
        if (std::holds_alternative<BudgetExhausted>(o)) {
            return Verdict::unspecified(Verdict::Reason::Budget);
        }
        auto& s = std::get<Solutions>(o);
        answers = std::move(s.answers);
        exhausted = s.exhausted;
    }
    if (constraints.empty()) {
        // nothing to falsify with; plain library evaluation
        for (Answer& a : answers) {
            if (a.unconditional()) {
                return Verdict::yes(std::move(a));
            }
        }
        return Verdict::unspecified(exhausted ? Verdict::Reason::Pending : Verdict::Reason::Budget);
    }

    std::optional<Verdict> open;
    for (const Answer& a : answers) {
        std::vector<Term> initial = a.subst.apply(constraints);
        ChrOutcome r = chr_run(program, initial, a.difs, budget.max_steps);
        if (std::holds_alternative<ChrInconsistent>(r)) {
            continue;
        }
        if (!open) {
            if (const auto* c = std::get_if<ChrConsistent>(&r)) {
                open = Verdict::unspecified(Verdict::Reason::Pending, render_conjunction(c->store));
            } else {
                open = Verdict::unspecified(Verdict::Reason::Budget);
            }
        }
    }
    if (open) {
        return *open;
    }
    if (!exhausted) {
        return Verdict::unspecified(Verdict::Reason::Budget);
    }
    return Verdict::no();
}

}  // namespace lpwb
