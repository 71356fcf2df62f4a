#include "lpwb/diagnosis.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>

namespace lpwb {
namespace {

std::vector<Term> goals(std::string_view text) {
    VarAllocator alloc;
    return parse_goals(text, alloc);
}

const Budget kBudget{100000, 64, 50000};

std::vector<std::string> suggestions(const Explanation& e) {
    std::vector<std::string> out;
    for (const ExplanationStage& s : e.stages) {
        out.push_back(s.suggestion());
    }
    return out;
}

std::vector<std::string> rendered(const std::vector<GeneralizationCandidate>& cs) {
    std::vector<std::string> out;
    for (const GeneralizationCandidate& c : cs) {
        out.push_back(render_conjunction(c.goals));
    }
    return out;
}

bool contains(const std::vector<std::string>& xs, const std::string& x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
}

// One-way matcher written independently of the library.
bool instance_of(const Term& pattern, const Term& target, std::map<VarId, Term>& theta) {
    if (pattern.is_var()) {
        auto [it, fresh] = theta.emplace(pattern.var_id(), target);
        return fresh || identical(it->second, target);
    }
    if (pattern.kind() != target.kind() || pattern.name() != target.name() || pattern.arity() != target.arity()) {
        return false;
    }
    if (pattern.is_int()) {
        return pattern.int_value() == target.int_value();
    }
    for (std::size_t i = 0; i < pattern.arity(); ++i) {
        if (!instance_of(pattern.arg(i), target.arg(i), theta)) {
            return false;
        }
    }
    return true;
}

Term substitute(const Term& t, const std::map<VarId, Term>& theta) {
    if (t.is_var()) {
        auto it = theta.find(t.var_id());
        return it == theta.end() ? t : it->second;
    }
    if (!t.is_compound()) {
        return t;
    }
    std::vector<Term> args;
    for (const Term& a : t.args()) {
        args.push_back(substitute(a, theta));
    }
    return Term::compound(t.name(), std::move(args));
}

bool unifiable(const Term& a, const Term& b) {
    return unify(a, b, Substitution{}, DifStore{}).has_value();
}

// The original is an instance of the candidate: its non-dif goals map onto
// original goals in order and every dif is satisfied afterwards.
bool generalizes(std::span<const Term> candidate, std::span<const Term> original) {
    std::vector<Term> plain;
    std::vector<Term> difs;
    for (const Term& g : candidate) {
        (g.is_compound() && g.name() == "dif" && g.arity() == 2 ? difs : plain).push_back(g);
    }
    auto search = [&](auto& self, std::size_t i, std::size_t from, std::map<VarId, Term> theta) -> bool {
        if (i == plain.size()) {
            for (const Term& d : difs) {
                if (unifiable(substitute(d.arg(0), theta), substitute(d.arg(1), theta))) {
                    return false;
                }
            }
            return true;
        }
        for (std::size_t j = from; j < original.size(); ++j) {
            std::map<VarId, Term> next = theta;
            if (instance_of(plain[i], original[j], next) && self(self, i + 1, j + 1, next)) {
                return true;
            }
        }
        return false;
    };
    return search(search, 0, 0, {});
}

}  // namespace

TEST_CASE("explain_incorrect_negative", "[diagnosis]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    SECTION("open list") {
        Explanation e = explain_incorrect_negative(goals("alldifferent([X,Y|_])"), reg, kBudget, 7);
        REQUIRE(e.kind == Explanation::Kind::SpecializedPositive);
        REQUIRE(suggestions(e) == std::vector<std::string>{"<- X = any0, Y = any1, alldifferent([X,Y])."});
        const std::vector<FeedbackLine> lines = e.lines();
        REQUIRE(lines.size() == 2);
        REQUIRE(lines[0].render() == "%@@ % Also this more specific query should be true.");
        REQUIRE(lines[1].render() == "%@@ <- X = any0, Y = any1, alldifferent([X,Y]).");
        REQUIRE(lines[1].anchor_line == 7);
    }
    SECTION("ground goal") {
        Explanation e = explain_incorrect_negative(goals("alldifferent([a,b])"), reg, kBudget);
        REQUIRE(suggestions(e) == std::vector<std::string>{"<- alldifferent([a,b])."});
    }
    SECTION("anonymous variables are grounded in place") {
        Explanation e = explain_incorrect_negative(goals("alldifferent([_,b|_])"), reg, kBudget);
        REQUIRE(suggestions(e) == std::vector<std::string>{"<- alldifferent([any0,b])."});
    }
    SECTION("precondition") {
        REQUIRE_THROWS_AS(explain_incorrect_negative(goals("alldifferent([a,a])"), reg, kBudget), PreconditionError);
        REQUIRE_THROWS_AS(explain_incorrect_negative(goals("dif(X,Y)"), reg, kBudget), PreconditionError);
    }
}

TEST_CASE("specialization soundness", "[diagnosis][property]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    for (const char* q : {"alldifferent([X,Y|_])", "alldifferent([A,b,C])", "alldifferent(Xs)",
                          "length(L, 2), alldifferent(L)", "nonmember_of(X, [a,b])"}) {
        const std::vector<Term> original = goals(q);
        Explanation e = explain_incorrect_negative(original, reg, kBudget);
        REQUIRE(e.stages.size() == 1);
        const ExplanationStage& s = e.stages[0];
        // equations substituted back give a ground instance of the original
        std::map<VarId, Term> eqs;
        for (const auto& [var, value] : s.equations) {
            eqs.emplace(var.var_id(), value);
        }
        std::vector<Term> ground;
        for (const Term& g : s.goals) {
            ground.push_back(substitute(g, eqs));
            REQUIRE(is_ground(ground.back()));
        }
        REQUIRE(generalizes(original, ground));
        std::vector<Term> all;
        for (const auto& [var, value] : s.equations) {
            all.push_back(Term::compound("=", {var, value}));
        }
        all.insert(all.end(), s.goals.begin(), s.goals.end());
        REQUIRE(reference_verdict(reg, all, kBudget).is_true());
        VarAllocator alloc;
        REQUIRE_NOTHROW(parse_goals(s.suggestion().substr(3, s.suggestion().size() - 4), alloc));
    }
}

TEST_CASE("apply_generalization_rule", "[diagnosis]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    SECTION("R1 deletes goals but never the last one") {
        REQUIRE(rendered(apply_generalization_rule(GenRule::R1, goals("p(a), q(b)"), reg)) ==
                std::vector<std::string>{"q(b)", "p(a)"});
        REQUIRE(apply_generalization_rule(GenRule::R1, goals("p(a)"), reg).empty());
    }
    SECTION("R2 abstracts one position") {
        const auto r = rendered(apply_generalization_rule(GenRule::R2, goals("alldifferent([a,b,c,d,c])"), reg));
        REQUIRE(contains(r, "alldifferent([_,b,c,d,c])"));
        REQUIRE(contains(r, "alldifferent(_)"));
        REQUIRE(contains(r, "alldifferent([a,b,c,d,c|_])"));
        REQUIRE(r.size() == 11);
    }
    SECTION("R3 shares identical subterms") {
        const auto r = rendered(apply_generalization_rule(GenRule::R3, goals("alldifferent([_,_,c,_,c])"), reg));
        REQUIRE(r == std::vector<std::string>{"alldifferent([_,_,V0,_,V0])"});
    }
    SECTION("R4 introduces a disequation") {
        const auto r = rendered(apply_generalization_rule(GenRule::R4, goals("p(a, b)"), reg));
        REQUIRE(r == std::vector<std::string>{"p(V1,V2), dif(V1,V2)"});
        REQUIRE(apply_generalization_rule(GenRule::R4, goals("p(X, b)"), reg).empty());
    }
    SECTION("R5 uses implications") {
        const auto r = rendered(apply_generalization_rule(GenRule::R5, goals("alldifferent([V0,_,V0,_,V1])"), reg));
        REQUIRE(r == std::vector<std::string>{"alldifferent([_,V0,_,V1])"});
    }
}

TEST_CASE("explain_incorrect_positive", "[diagnosis]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    Explanation e = explain_incorrect_positive(goals("alldifferent([a,b,c,d,c])"), reg, kBudget, 3);
    REQUIRE(e.kind == Explanation::Kind::GeneralizedNegative);
    REQUIRE(suggestions(e) == std::vector<std::string>{
                                  "</- alldifferent([_,_,c,_,c]).",
                                  "</- alldifferent([_,_,V0,_,V0]).",
                                  "</- alldifferent([V0,_,V0|_]).",
                              });
    const std::vector<FeedbackLine> lines = e.lines();
    REQUIRE(lines.size() == 6);
    REQUIRE(lines[0].render() == "%@@ % Generalized negative assertion (using R1,R2):");
    REQUIRE(lines[2].render() == "%@@ % Further generalization (using R1-R4):");
    REQUIRE(lines[4].render() == "%@@ % Further generalization (using R1-R5):");
    REQUIRE_THROWS_AS(explain_incorrect_positive(goals("alldifferent([a,b])"), reg, kBudget), PreconditionError);
}

TEST_CASE("generalization properties", "[diagnosis][property]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> len(2, 5);
    std::uniform_int_distribution<int> pick(0, 2);
    const char* const atoms[] = {"a", "b", "c"};
    int explained = 0;
    while (explained < 12) {
        std::vector<Term> elems;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) {
            elems.push_back(Term::atom(atoms[pick(rng)]));
        }
        const std::vector<Term> original{Term::compound("alldifferent", {Term::list(elems)})};
        if (!reference_verdict(reg, original, kBudget).is_false()) {
            continue;
        }
        ++explained;
        Explanation e = explain_incorrect_positive(original, reg, kBudget);
        REQUIRE_FALSE(e.stages.empty());
        GeneralityKey prev = generality_key(original);
        for (const ExplanationStage& s : e.stages) {
            INFO(s.suggestion());
            REQUIRE(reference_verdict(reg, s.goals, kBudget).is_false());
            REQUIRE(generality_key(s.goals) > prev);
            prev = generality_key(s.goals);
            const bool instance_based =
                std::find(s.rules_used.begin(), s.rules_used.end(), GenRule::R5) == s.rules_used.end();
            if (instance_based) {
                REQUIRE(generalizes(s.goals, original));
            }
        }
        Explanation again = explain_incorrect_positive(original, reg, kBudget);
        REQUIRE(suggestions(again) == suggestions(e));
    }
}

TEST_CASE("generalization with a custom verifier", "[diagnosis]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    Verifier keeps_c = [](std::span<const Term> gs) {
        return render_conjunction(gs).find('c') != std::string::npos;
    };
    auto stages = generalize_in_stages(goals("p([c,d])"), {StageSpec{"s", {GenRule::R2}}}, reg, keeps_c);
    REQUIRE(stages.size() == 1);
    REQUIRE(render_conjunction(stages[0].goals) == "p([c|_])");
    REQUIRE(generalize_in_stages(goals("p(c)"), {StageSpec{"s", {GenRule::R2}}}, reg, keeps_c).empty());
}

}  // namespace lpwb
