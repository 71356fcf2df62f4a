#include "lpwb/chr.hpp"
#include "lpwb/reference.hpp"
#include "lpwb/syntax.hpp"

#include <catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

namespace lpwb {
namespace {

std::vector<Term> goals(std::string_view text) {
    VarAllocator alloc;
    return parse_goals(text, alloc);
}

std::vector<std::string> names(const ChrProgram& p, const std::vector<ChrFiring>& trace) {
    std::vector<std::string> out;
    for (const ChrFiring& f : trace) {
        out.push_back(p.rules[f.rule].name);
    }
    return out;
}

std::set<std::string> rendered(const std::vector<Term>& ts) {
    std::set<std::string> out;
    for (const Term& t : ts) {
        out.insert(render_term(t));
    }
    return out;
}

// Semantic model of the family rules on ground stores.
struct FamilyModel {
    bool consistent = true;
    std::set<std::string> store;
};

FamilyModel family_model(const std::vector<std::pair<std::string, std::pair<char, char>>>& facts) {
    std::map<char, std::set<char>> parents;
    std::set<std::pair<char, char>> anc;
    FamilyModel m;
    for (const auto& [pred, xy] : facts) {
        if (pred == "child_of") {
            parents[xy.first].insert(xy.second);
            anc.insert({xy.second, xy.first});
            m.store.insert(std::string("child_of(") + xy.first + "," + xy.second + ")");
        } else {
            anc.insert(xy);
        }
    }
    for (const auto& [c, ps] : parents) {
        if (ps.size() >= 3) {
            m.consistent = false;
        }
    }
    bool grew = true;
    while (grew) {
        grew = false;
        for (auto [a, b] : std::set<std::pair<char, char>>(anc)) {
            for (auto [b2, c] : std::set<std::pair<char, char>>(anc)) {
                if (b == b2 && anc.insert({a, c}).second) {
                    grew = true;
                }
            }
        }
    }
    for (auto [a, b] : anc) {
        if (a == b) {
            m.consistent = false;
        }
        m.store.insert(std::string("ancestor_of(") + a + "," + b + ")");
    }
    return m;
}

}  // namespace

TEST_CASE("parse_chr", "[chr]") {
    const ChrProgram& p = family_rules();
    REQUIRE(p.rules.size() == 4);
    REQUIRE(p.already_in_store);
    REQUIRE(p.rules[0].name == "c1");
    REQUIRE(p.rules[0].kind == ChrRule::Kind::Simplification);
    REQUIRE(p.rules[0].heads.size() == 3);
    REQUIRE(p.rules[0].guard.size() == 3);
    REQUIRE(p.rules[0].fails);
    REQUIRE(p.rules[1].kind == ChrRule::Kind::Propagation);
    REQUIRE(render_term(p.rules[1].body[0]) == "ancestor_of(B,A)");
    REQUIRE(p.rules[2].fails);
    REQUIRE(p.rules[3].heads.size() == 2);
    REQUIRE(p.constraints().size() == 2);

    SECTION("options and errors") {
        REQUIRE_FALSE(parse_chr(":- option(already_in_store, off).\nr @ p(X) ==> q(X).\n").already_in_store);
        REQUIRE(parse_chr(":- chr_constraint p/1.\nr @ p(X) <=> true.\n").rules[0].body.empty());
        REQUIRE_THROWS_AS(parse_chr("r p(X) ==> q(X).\n"), ParseError);
        REQUIRE_THROWS_AS(parse_chr("r @ p(X) <=> q(X) | true.\n"), ParseError);
        REQUIRE_THROWS_AS(parse_chr("r @ p(X) -> q(X).\n"), ParseError);
    }
}

TEST_CASE("chr_run", "[chr]") {
    const ChrProgram& p = family_rules();
    SECTION("mutual children are inconsistent") {
        ChrOutcome o = chr_run(p, goals("child_of(a,b), child_of(b,a)"), {}, 1000);
        REQUIRE(std::holds_alternative<ChrInconsistent>(o));
        REQUIRE(names(p, std::get<ChrInconsistent>(o).trace) == std::vector<std::string>{"c2", "c2", "c4", "c3"});
    }
    SECTION("three distinct parents via pending difs") {
        VarAllocator alloc;
        std::vector<Term> gs = parse_goals("child_of(C,P1), child_of(C,P2), child_of(C,P3), p(P1,P2,P3)", alloc);
        const Term& ps = gs.back();
        Substitution s;
        DifStore d;
        REQUIRE(add_dif(ps.arg(0), ps.arg(1), false, s, d));
        REQUIRE(add_dif(ps.arg(1), ps.arg(2), false, s, d));
        REQUIRE(add_dif(ps.arg(0), ps.arg(2), false, s, d));
        gs.pop_back();
        ChrOutcome o = chr_run(p, gs, d, 1000);
        REQUIRE(std::holds_alternative<ChrInconsistent>(o));
        REQUIRE(names(p, std::get<ChrInconsistent>(o).trace) == std::vector<std::string>{"c1"});

        SECTION("without the difs the guard does not hold") {
            ChrOutcome open = chr_run(p, gs, {}, 1000);
            REQUIRE(std::holds_alternative<ChrConsistent>(open));
        }
    }
    SECTION("single fact") {
        ChrOutcome o = chr_run(p, goals("child_of(a,b)"), {}, 1000);
        REQUIRE(std::holds_alternative<ChrConsistent>(o));
        REQUIRE(rendered(std::get<ChrConsistent>(o).store) ==
                std::set<std::string>{"child_of(a,b)", "ancestor_of(b,a)"});
    }
    SECTION("firing budget") {
        ChrOutcome o = chr_run(p, goals("child_of(a,b), child_of(b,c), child_of(c,d)"), {}, 2);
        REQUIRE(std::holds_alternative<ChrBudgetExhausted>(o));
    }
    SECTION("without duplicate suppression propagation still stops on history") {
        ChrProgram q = parse_chr(":- option(already_in_store, off).\nr @ p(X) ==> q(X).\n");
        ChrOutcome o = chr_run(q, goals("p(a), p(a)"), {}, 100);
        REQUIRE(std::get<ChrConsistent>(o).store.size() == 4);
    }
}

TEST_CASE("chr_run agrees with the family model", "[chr][property]") {
    const ChrProgram& p = family_rules();
    std::mt19937 rng(31337);
    const std::string people = "abcde";
    int inconsistent = 0;
    for (int iter = 0; iter < 400; ++iter) {
        std::uniform_int_distribution<int> size(0, 12);
        std::uniform_int_distribution<int> who(0, static_cast<int>(people.size()) - 1);
        std::vector<std::pair<std::string, std::pair<char, char>>> facts;
        std::vector<Term> store;
        const int n = size(rng);
        for (int i = 0; i < n; ++i) {
            const char x = people[who(rng)];
            const char y = people[who(rng)];
            const std::string pred = rng() % 4 == 0 ? "ancestor_of" : "child_of";
            facts.push_back({pred, {x, y}});
            store.push_back(Term::compound(pred, {Term::atom(std::string(1, x)), Term::atom(std::string(1, y))}));
        }
        FamilyModel model = family_model(facts);
        ChrOutcome o = chr_run(p, store, {}, 100000);
        REQUIRE_FALSE(std::holds_alternative<ChrBudgetExhausted>(o));
        REQUIRE(std::holds_alternative<ChrConsistent>(o) == model.consistent);
        const std::vector<ChrFiring>* trace = nullptr;
        if (const auto* c = std::get_if<ChrConsistent>(&o)) {
            REQUIRE(rendered(c->store) == model.store);
            trace = &c->trace;
        } else {
            ++inconsistent;
            trace = &std::get<ChrInconsistent>(o).trace;
            // any superset is inconsistent as well
            std::vector<Term> bigger = store;
            bigger.push_back(Term::compound("child_of", {Term::atom("z"), Term::atom("y")}));
            std::shuffle(bigger.begin(), bigger.end(), rng);
            REQUIRE(std::holds_alternative<ChrInconsistent>(chr_run(p, bigger, {}, 100000)));
        }
        std::set<std::pair<std::size_t, std::vector<std::size_t>>> seen;
        for (const ChrFiring& f : *trace) {
            REQUIRE(seen.insert({f.rule, f.constraints}).second);
        }
    }
    REQUIRE(inconsistent > 20);
}

TEST_CASE("chr_verdict", "[chr]") {
    const ChrProgram& p = family_rules();
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    const Budget budget{5000, 20, 5000};
    SECTION("cycle through unification") {
        Verdict v = chr_verdict(p, reg.library(), goals("child_of(A,B), child_of(B,C), A = C"), budget);
        REQUIRE(v.is_false());
    }
    SECTION("three parents kept apart by the list reference") {
        Verdict v = chr_verdict(
            p, reg.library(),
            goals("child_of(C,P1), child_of(C,P2), child_of(C,P3), alldifferent([P1,P2,P3])"), budget);
        REQUIRE(v.is_false());
    }
    SECTION("pending constraints") {
        Verdict v = chr_verdict(p, reg.library(), goals("child_of(a,b)"), budget);
        REQUIRE(v.is_unspecified());
        REQUIRE(v.reason == Verdict::Reason::Pending);
    }
    SECTION("empty conjunction") {
        REQUIRE(chr_verdict(p, reg.library(), {}, budget).is_true());
    }
    SECTION("never true with a constraint") {
        std::mt19937 rng(5);
        const char* parts[] = {"child_of(A,B)", "child_of(B,a)", "ancestor_of(A,C)", "A = b", "B = C", "A = C",
                               "alldifferent([A,B])"};
        for (int i = 0; i < 150; ++i) {
            std::string q = "child_of(A,B)";
            const int extra = static_cast<int>(rng() % 4);
            for (int k = 0; k < extra; ++k) {
                q += ", ";
                q += parts[rng() % 7];
            }
            REQUIRE_FALSE(chr_verdict(p, reg.library(), goals(q), budget).is_true());
        }
    }
}

}  // namespace lpwb
