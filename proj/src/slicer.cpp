#include "lpwb/slicer.hpp"

#include <algorithm>

namespace lpwb {

bool ClauseMark::goal_visible(std::size_t i) const {
    if (false_at && i >= *false_at) {
        return false;
    }
    return i >= deleted.size() || !deleted[i];
}

ProgramFragment ProgramFragment::whole(Program base, AssertionKind kind, std::vector<Term> query) {
    ProgramFragment f;
    for (const Clause& c : base.clauses()) {
        f.marks.push_back(ClauseMark{std::nullopt, std::vector<bool>(c.body.size(), false)});
    }
    f.base = std::move(base);
    f.query_kind = kind;
    f.query = std::move(query);
    return f;
}

Program ProgramFragment::program() const {
    std::vector<Clause> out;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const ClauseMark& m = marks[i];
        if (m.removed()) {
            continue;
        }
        const Clause& c = base.clause(i);
        Clause copy{c.head, {}, c.source_line, c.last_line};
        for (std::size_t g = 0; g < c.body.size(); ++g) {
            if (m.goal_visible(g)) {
                copy.body.push_back(c.body[g]);
            }
        }
        if (m.false_at) {
            copy.body.push_back(Term::atom("false"));
        }
        out.push_back(std::move(copy));
    }
    return Program(std::move(out));
}

std::size_t ProgramFragment::deleted_count() const {
    std::size_t n = 0;
    for (const ClauseMark& m : marks) {
        n += static_cast<std::size_t>(std::count(m.deleted.begin(), m.deleted.end(), true));
    }
    return n;
}

std::size_t ProgramFragment::removed_count() const {
    return static_cast<std::size_t>(std::count_if(marks.begin(), marks.end(), [](const ClauseMark& m) {
        return m.removed();
    }));
}

LineSet all_lines(const Program& program) {
    LineSet out;
    for (std::size_t i = 0; i < program.size(); ++i) {
        out.insert(LinePart{i, -1});
        for (std::size_t g = 0; g < program.clause(i).body.size(); ++g) {
            out.insert(LinePart{i, static_cast<int>(g)});
        }
    }
    return out;
}

LineSet active_lines(const ProgramFragment& fragment) {
    LineSet out;
    for (std::size_t i = 0; i < fragment.base.size(); ++i) {
        const ClauseMark& m = fragment.marks[i];
        if (m.removed()) {
            continue;
        }
        out.insert(LinePart{i, -1});
        for (std::size_t g = 0; g < fragment.base.clause(i).body.size(); ++g) {
            if (m.goal_visible(g)) {
                out.insert(LinePart{i, static_cast<int>(g)});
            }
        }
    }
    return out;
}

namespace {

constexpr EngineOptions kSliceOptions{.unknown_fails = true};

enum class Check { Yes, No, Budget };

Check fails_finitely(const ProgramFragment& f, std::span<const Term> goals, const Budget& budget) {
    Outcome o = solve_dfs(f.program(), goals, budget, Want::First, kSliceOptions);
    if (std::holds_alternative<FiniteFailure>(o)) {
        return Check::Yes;
    }
    return std::holds_alternative<BudgetExhausted>(o) ? Check::Budget : Check::No;
}

bool succeeds(const Program& program, std::span<const Term> goals, const Budget& budget) {
    Outcome o = solve_dfs(program, goals, budget, Want::First, kSliceOptions);
    const auto* s = std::get_if<Solutions>(&o);
    return s && !s->answers.empty();
}

Check loops(const ProgramFragment& f, std::span<const Term> goals, const Budget& budget) {
    TerminationResult r = check_universal_termination(f.program(), goals, budget, kSliceOptions);
    switch (r.kind) {
    case TerminationResult::Kind::NonTerminating: return Check::Yes;
    case TerminationResult::Kind::Terminates: return Check::No;
    case TerminationResult::Kind::Unknown: return Check::Budget;
    }
    return Check::Budget;
}

bool is_trivial(const Term& g) {
    if (g.is_atom("true")) {
        return true;
    }
    return g.is_compound() && g.name() == "=" && g.arity() == 2 && identical(g.arg(0), g.arg(1));
}

}  // namespace

ProgramFragment slice_insufficiency(const Program& program, std::span<const Term> goals, const Budget& budget) {
    ProgramFragment f =
        ProgramFragment::whole(program, AssertionKind::Pos, std::vector<Term>(goals.begin(), goals.end()));
    if (fails_finitely(f, goals, budget) != Check::Yes) {
        throw SliceError("the query does not fail finitely");
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < f.marks.size(); ++i) {
            for (std::size_t g = 0; g < f.marks[i].deleted.size(); ++g) {
                if (f.marks[i].deleted[g]) {
                    continue;
                }
                f.marks[i].deleted[g] = true;
                const Check c = fails_finitely(f, goals, budget);
                if (c == Check::Yes) {
                    changed = true;
                    continue;
                }
                f.inconclusive |= c == Check::Budget;
                f.marks[i].deleted[g] = false;
            }
        }
    }
    return f;
}

std::vector<FeedbackLine> IncorrectnessSlice::lines(int anchor_line) const {
    std::vector<FeedbackLine> out;
    if (!witness_note.empty()) {
        out.push_back(FeedbackLine{Severity::Suggestion, "% " + witness_note, anchor_line});
    }
    for (const ExplanationStage& s : generalizations) {
        for (FeedbackLine& l : s.lines(anchor_line)) {
            out.push_back(std::move(l));
        }
    }
    return out;
}

IncorrectnessSlice slice_incorrectness(const Program& program, std::span<const Term> goals,
                                       const Substitution& witness, const ReferenceRegistry& registry,
                                       const Budget& budget) {
    std::vector<Term> instance;
    for (const Term& g : witness.apply(goals)) {
        if (!is_trivial(g)) {
            instance.push_back(g);
        }
    }
    if (!reference_verdict(registry, instance, budget).is_false()) {
        throw SliceError("the reference does not refute the witness");
    }
    if (!succeeds(program, instance, budget)) {
        throw SliceError("the witness is not an answer of the program");
    }

    IncorrectnessSlice out;
    std::vector<Term> bindings;
    for (const Term& v : term_variables(goals)) {
        if (!v.name().empty() && v.name() != "_") {
            bindings.push_back(Term::compound("=", {v, witness.apply(v)}));
        }
    }
    if (!bindings.empty()) {
        out.witness_note = render_conjunction(bindings) + ". % Incorrect!";
    }

    Verifier wrong_and_succeeds = [&](std::span<const Term> candidate) {
        return reference_verdict(registry, candidate, budget).is_false() && succeeds(program, candidate, budget);
    };
    using enum GenRule;
    const std::vector<StageSpec> stages{
        StageSpec{"Generalization", {R1, R2}},
        StageSpec{"Further generalization", {R1, R2, R3, R4}},
        StageSpec{"Further generalization", {R1, R2, R3, R4, R5}},
    };
    out.generalizations = generalize_in_stages(instance, stages, registry, wrong_and_succeeds);
    out.target = out.generalizations.empty() ? instance : out.generalizations.back().goals;

    // Any false in a body makes its clause useless for a derivation, so only
    // whole clauses can go. Later clauses are tried first: facts tend to come
    // before the rules that could replace them.
    ProgramFragment f = ProgramFragment::whole(program, AssertionKind::Neg, out.target);
    for (std::size_t i = f.marks.size(); i-- > 0;) {
        f.marks[i].false_at = 0;
        if (!succeeds(f.program(), out.target, budget)) {
            f.marks[i].false_at.reset();
        }
    }
    out.fragment = std::move(f);
    return out;
}

ProgramFragment slice_nontermination(const Program& program, std::span<const Term> goals, const Budget& budget) {
    std::vector<Term> shown(goals.begin(), goals.end());
    shown.push_back(Term::atom("false"));
    ProgramFragment f = ProgramFragment::whole(program, AssertionKind::Neg, std::move(shown));
    if (loops(f, goals, budget) != Check::Yes) {
        throw SliceError("no loop found for the query");
    }
    for (std::size_t i = 0; i < f.marks.size(); ++i) {
        f.marks[i].false_at = 0;
        const Check c = loops(f, goals, budget);
        if (c != Check::Yes) {
            f.marks[i].false_at.reset();
        }
        if (c == Check::Budget) {
            f.inconclusive = true;
            return f;
        }
    }
    for (std::size_t i = 0; i < f.marks.size(); ++i) {
        if (f.marks[i].removed()) {
            continue;
        }
        for (std::size_t k = program.clause(i).body.size(); k >= 1; --k) {
            const std::optional<std::size_t> before = f.marks[i].false_at;
            f.marks[i].false_at = k;
            const Check c = loops(f, goals, budget);
            if (c == Check::Yes) {
                continue;
            }
            f.marks[i].false_at = before;
            if (c == Check::Budget) {
                f.inconclusive = true;
                return f;
            }
            break;
        }
    }
    return f;
}

LineSet intersect_fragments(std::span<const ProgramFragment> fragments) {
    if (fragments.empty()) {
        return {};
    }
    const Program& base = fragments.front().base;
    auto clause_key = [](const Clause& c) {
        std::vector<Term> parts{c.head};
        parts.insert(parts.end(), c.body.begin(), c.body.end());
        return canonical_key(parts);
    };
    LineSet out = active_lines(fragments.front());
    for (const ProgramFragment& f : fragments.subspan(1)) {
        if (f.base.size() != base.size()) {
            throw SliceError("fragments of different programs");
        }
        for (std::size_t i = 0; i < base.size(); ++i) {
            if (clause_key(f.base.clause(i)) != clause_key(base.clause(i))) {
                throw SliceError("fragments of different programs");
            }
        }
        LineSet keep;
        const LineSet active = active_lines(f);
        std::set_intersection(out.begin(), out.end(), active.begin(), active.end(), std::inserter(keep, keep.end()));
        out = std::move(keep);
    }
    return out;
}

namespace {

std::string strike(const std::string& s) { return "~~" + s + "~~"; }

void render_clause(const Clause& c, const ClauseMark& m, std::string& out) {
    std::vector<Term> context{c.head};
    context.insert(context.end(), c.body.begin(), c.body.end());
    TermWriter w(context);
    const std::string head = w.write(c.head);

    if (m.removed()) {
        if (c.body.empty()) {
            out += strike(head + " :- false.") + "\n";
            return;
        }
        out += strike(head + " :- false,") + "\n";
        for (std::size_t g = 0; g < c.body.size(); ++g) {
            out += "    " + strike(w.write(c.body[g]) + (g + 1 < c.body.size() ? "," : ".")) + "\n";
        }
        return;
    }
    if (c.body.empty()) {
        out += head + ".\n";
        return;
    }

    std::vector<std::string> lines;
    for (std::size_t g = 0; g < c.body.size(); ++g) {
        if (m.false_at && g == *m.false_at) {
            lines.back() += ", false";
        }
        const std::string goal = w.write(c.body[g]);
        if (m.false_at && g >= *m.false_at) {
            lines.push_back(strike(goal));
        } else if (g < m.deleted.size() && m.deleted[g]) {
            lines.push_back("* " + strike(goal));
        } else {
            lines.push_back(goal);
        }
    }
    if (m.false_at && *m.false_at == c.body.size()) {
        lines.back() += ", false";
    }
    out += head + " :-\n";
    for (std::size_t i = 0; i < lines.size(); ++i) {
        out += "    " + lines[i] + (i + 1 < lines.size() ? ",\n" : ".\n");
    }
}

}  // namespace

std::string render_fragment(const ProgramFragment& fragment) {
    std::string out = render_assertion(fragment.query_kind, fragment.query) + "\n";
    std::optional<PredKey> previous;
    for (std::size_t i = 0; i < fragment.base.size(); ++i) {
        const Clause& c = fragment.base.clause(i);
        const PredKey key = pred_key(c.head);
        if (previous != key) {
            out += "\n";
            previous = key;
        }
        render_clause(c, fragment.marks[i], out);
    }
    return out;
}

}  // namespace lpwb
