#include "lpwb/diagnosis.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

namespace lpwb {

std::string_view gen_rule_name(GenRule r) {
    switch (r) {
    case GenRule::R1: return "R1";
    case GenRule::R2: return "R2";
    case GenRule::R3: return "R3";
    case GenRule::R4: return "R4";
    case GenRule::R5: return "R5";
    }
    return "R1";
}

GeneralityKey generality_key(std::span<const Term> goals) {
    long size = 0;
    for (const Term& g : goals) {
        size += static_cast<long>(term_size(g));
    }
    return GeneralityKey{-size, static_cast<long>(term_variables(goals).size()), -static_cast<long>(goals.size())};
}

bool more_general(std::span<const Term> a, std::span<const Term> b) {
    const GeneralityKey ka = generality_key(a);
    const GeneralityKey kb = generality_key(b);
    if (ka != kb) {
        return ka > kb;
    }
    return canonical_key(a) < canonical_key(b);
}

namespace {

VarAllocator fresh_after(std::span<const Term> goals) {
    return VarAllocator(std::max<VarId>(max_var_id(goals) + 1, 0));
}

struct Position {
    std::size_t goal;
    TermPath path;
    Term term;
};

std::vector<Position> positions(std::span<const Term> goals) {
    std::vector<Position> out;
    for (std::size_t i = 0; i < goals.size(); ++i) {
        for (Subterm& s : enumerate_subterms(goals[i])) {
            out.push_back(Position{i, std::move(s.path), std::move(s.term)});
        }
    }
    return out;
}

bool nested(const Position& a, const Position& b) {
    if (a.goal != b.goal) {
        return false;
    }
    const std::size_t n = std::min(a.path.size(), b.path.size());
    return std::equal(a.path.begin(), a.path.begin() + static_cast<long>(n), b.path.begin());
}

std::vector<Term> with_replacements(std::span<const Term> goals, const std::vector<const Position*>& at,
                                    const std::vector<Term>& by) {
    std::vector<Term> out(goals.begin(), goals.end());
    for (std::size_t k = 0; k < at.size(); ++k) {
        out[at[k]->goal] = replace_at(out[at[k]->goal], at[k]->path, by[k]);
    }
    return out;
}

void r1(std::span<const Term> goals, std::vector<GeneralizationCandidate>& out) {
    if (goals.size() < 2) {
        return;  // deleting the only goal leaves `true`, which never fails
    }
    for (std::size_t i = 0; i < goals.size(); ++i) {
        GeneralizationCandidate c{{}, {GenRule::R1}};
        for (std::size_t j = 0; j < goals.size(); ++j) {
            if (j != i) {
                c.goals.push_back(goals[j]);
            }
        }
        out.push_back(std::move(c));
    }
}

void r2(std::span<const Term> goals, std::vector<GeneralizationCandidate>& out) {
    VarAllocator alloc = fresh_after(goals);
    const Term fresh = alloc.fresh();
    for (const Position& p : positions(goals)) {
        if (p.term.is_var()) {
            continue;
        }
        out.push_back(GeneralizationCandidate{with_replacements(goals, {&p}, {fresh}), {GenRule::R2}});
    }
}

void r3(std::span<const Term> goals, std::vector<GeneralizationCandidate>& out) {
    const std::vector<Position> all = positions(goals);
    // classes of identical non-variable subterms, in order of first occurrence
    std::vector<std::vector<const Position*>> classes;
    for (const Position& p : all) {
        if (p.term.is_var()) {
            continue;
        }
        auto same = [&](const std::vector<const Position*>& c) { return identical(c.front()->term, p.term); };
        auto it = std::find_if(classes.begin(), classes.end(), same);
        if (it == classes.end()) {
            classes.push_back({&p});
        } else {
            it->push_back(&p);
        }
    }
    VarAllocator alloc = fresh_after(goals);
    const Term shared = alloc.fresh();
    for (const auto& c : classes) {
        if (c.size() < 2) {
            continue;
        }
        out.push_back(GeneralizationCandidate{with_replacements(goals, c, std::vector<Term>(c.size(), shared)),
                                              {GenRule::R3}});
    }
}

void r4(std::span<const Term> goals, std::vector<GeneralizationCandidate>& out) {
    const std::vector<Position> all = positions(goals);
    VarAllocator alloc = fresh_after(goals);
    const Term v1 = alloc.fresh("V1");
    const Term v2 = alloc.fresh("V2");
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            if (nested(all[i], all[j]) || unify(all[i].term, all[j].term, {}, {})) {
                continue;
            }
            std::vector<Term> gs = with_replacements(goals, {&all[i], &all[j]}, {v1, v2});
            gs.push_back(Term::compound("dif", {v1, v2}));
            out.push_back(GeneralizationCandidate{std::move(gs), {GenRule::R4}});
        }
    }
}

void r5(std::span<const Term> goals, const ReferenceRegistry& registry, std::vector<GeneralizationCandidate>& out) {
    for (std::size_t i = 0; i < goals.size(); ++i) {
        for (const std::vector<Term>& implied : lookup_implications(registry, goals[i])) {
            GeneralizationCandidate c{{}, {GenRule::R5}};
            c.goals.insert(c.goals.end(), goals.begin(), goals.begin() + static_cast<long>(i));
            c.goals.insert(c.goals.end(), implied.begin(), implied.end());
            c.goals.insert(c.goals.end(), goals.begin() + static_cast<long>(i) + 1, goals.end());
            out.push_back(std::move(c));
        }
    }
}

}  // namespace

std::vector<GeneralizationCandidate> apply_generalization_rule(GenRule rule, std::span<const Term> goals,
                                                               const ReferenceRegistry& registry) {
    std::vector<GeneralizationCandidate> out;
    switch (rule) {
    case GenRule::R1: r1(goals, out); break;
    case GenRule::R2: r2(goals, out); break;
    case GenRule::R3: r3(goals, out); break;
    case GenRule::R4: r4(goals, out); break;
    case GenRule::R5: r5(goals, registry, out); break;
    }
    return out;
}

std::string ExplanationStage::suggestion() const {
    return render_suggestion(kind, equations, goals, "").back().text;
}

std::vector<FeedbackLine> ExplanationStage::lines(int anchor_line) const {
    return render_suggestion(kind, equations, goals, label, anchor_line);
}

std::vector<FeedbackLine> Explanation::lines() const {
    std::vector<FeedbackLine> out;
    for (const ExplanationStage& s : stages) {
        for (FeedbackLine& l : s.lines(anchor_line)) {
            out.push_back(std::move(l));
        }
    }
    return out;
}

std::vector<StageSpec> default_stages(const std::string& first, const std::string& further) {
    using enum GenRule;
    return {
        StageSpec{first + " (using R1,R2):", {R1, R2}},
        StageSpec{further + " (using R1-R4):", {R1, R2, R3, R4}},
        StageSpec{further + " (using R1-R5):", {R1, R2, R3, R4, R5}},
    };
}

namespace {

struct Node {
    std::vector<Term> goals;
    std::vector<GenRule> rules;
    GeneralityKey key;
    std::string canon;
};

struct MoreGeneralFirst {
    bool operator()(const Node& a, const Node& b) const {
        if (a.key != b.key) {
            return a.key > b.key;
        }
        return a.canon < b.canon;
    }
};

Node make_node(std::vector<Term> goals, std::vector<GenRule> rules) {
    Node n{std::move(goals), std::move(rules), {}, {}};
    n.key = generality_key(n.goals);
    n.canon = canonical_key(n.goals);
    return n;
}

void add_rules(std::vector<GenRule>& into, const std::vector<GenRule>& more) {
    for (GenRule r : more) {
        if (std::find(into.begin(), into.end(), r) == into.end()) {
            into.push_back(r);
        }
    }
    std::sort(into.begin(), into.end());
}

}  // namespace

std::vector<ExplanationStage> generalize_in_stages(std::span<const Term> goals, const std::vector<StageSpec>& stages,
                                                   const ReferenceRegistry& registry, const Verifier& verifier,
                                                   SearchLimits limits) {
    std::vector<ExplanationStage> out;
    Node best = make_node(std::vector<Term>(goals.begin(), goals.end()), {});
    for (const StageSpec& spec : stages) {
        const GeneralityKey before = best.key;
        std::set<Node, MoreGeneralFirst> frontier{best};
        std::unordered_set<std::string> seen{best.canon};
        int verdicts = 0;
        while (!frontier.empty() && verdicts < limits.max_verdicts_per_stage) {
            Node current = *frontier.begin();
            frontier.erase(frontier.begin());
            for (GenRule rule : spec.rules) {
                for (GeneralizationCandidate& c : apply_generalization_rule(rule, current.goals, registry)) {
                    std::vector<GenRule> used = current.rules;
                    add_rules(used, c.rules_used);
                    Node n = make_node(std::move(c.goals), std::move(used));
                    if (!seen.insert(n.canon).second) {
                        continue;
                    }
                    if (verdicts >= limits.max_verdicts_per_stage) {
                        break;
                    }
                    ++verdicts;
                    if (!verifier(n.goals)) {
                        continue;
                    }
                    if (MoreGeneralFirst{}(n, best)) {
                        best = n;
                    }
                    frontier.insert(std::move(n));
                }
            }
        }
        if (best.key > before) {
            out.push_back(ExplanationStage{spec.label, AssertionKind::Neg, {}, best.goals, best.rules});
        }
    }
    return out;
}

Explanation explain_incorrect_negative(std::span<const Term> goals, const ReferenceRegistry& registry,
                                       const Budget& budget, int anchor_line) {
    Verdict v = reference_verdict(registry, goals, budget);
    if (!v.is_true()) {
        throw PreconditionError("the reference does not prove this assertion");
    }
    const std::vector<Term> applied = v.answer->subst.apply(goals);

    // named variables become equations, anonymous ones are replaced in place
    std::unordered_map<VarId, Term> inline_any;
    std::vector<std::pair<Term, Term>> equations;
    std::size_t next = 0;
    for (const Term& var : term_variables(applied)) {
        Term any = Term::atom("any" + std::to_string(next++));
        if (var.name().empty() || var.name() == "_") {
            inline_any.emplace(var.var_id(), any);
        } else {
            equations.emplace_back(var, any);
        }
    }
    std::vector<Term> specialized;
    for (const Term& g : applied) {
        specialized.push_back(instantiate(g, inline_any));
    }

    Explanation e{Explanation::Kind::SpecializedPositive, {}, anchor_line};
    e.stages.push_back(ExplanationStage{"Also this more specific query should be true.", AssertionKind::Pos,
                                        std::move(equations), std::move(specialized), {}});
    return e;
}

Explanation explain_incorrect_positive(std::span<const Term> goals, const ReferenceRegistry& registry,
                                       const Budget& budget, int anchor_line, SearchLimits limits) {
    if (!reference_verdict(registry, goals, budget).is_false()) {
        throw PreconditionError("the reference does not refute this assertion");
    }
    Verifier refuted = [&](std::span<const Term> candidate) {
        return reference_verdict(registry, candidate, budget).is_false();
    };
    Explanation e{Explanation::Kind::GeneralizedNegative, {}, anchor_line};
    e.stages = generalize_in_stages(goals, default_stages("Generalized negative assertion", "Further generalization"),
                                    registry, refuted, limits);
    return e;
}

}  // namespace lpwb
