#include "lpwb/syntax.hpp"
#include "lpwb/term.hpp"
#include "oracle/random_terms.hpp"

#include <catch_amalgamated.hpp>

#include <unordered_map>

namespace lpwb {
namespace {

Term parse(std::string_view text, VarAllocator& alloc) { return parse_term(text, alloc); }

Term var_named(const Term& t, const std::string& name) {
    for (const Term& v : term_variables(std::span<const Term>(&t, 1))) {
        if (v.name() == name) {
            return v;
        }
    }
    FAIL("no variable " << name);
    return t;
}

}  // namespace

TEST_CASE("unify", "[term]") {
    VarAllocator alloc;
    SECTION("textbook mgu") {
        Term t1 = parse("f(X,a)", alloc);
        Term t2 = parse("f(b,Y)", alloc);
        auto u = unify(t1, t2, {}, {});
        REQUIRE(u);
        REQUIRE(render_term(u->subst.apply(var_named(t1, "X"))) == "b");
        REQUIRE(render_term(u->subst.apply(var_named(t2, "Y"))) == "a");
        REQUIRE(u->difs.empty());
    }
    SECTION("occurs check") {
        Term x = alloc.fresh("X");
        REQUIRE_FALSE(unify(x, Term::compound("f", {x}), {}, {}));
        Term deep = parse("g(Z, f(f(Z)))", alloc);
        REQUIRE_FALSE(unify(deep.arg(0), deep.arg(1), {}, {}));
    }
    SECTION("dif violated by instantiation") {
        Term x = alloc.fresh("X");
        Substitution s;
        DifStore d;
        REQUIRE(add_dif(x, Term::atom("a"), false, s, d));
        REQUIRE(d.size() == 1);
        REQUIRE_FALSE(unify(x, Term::atom("a"), s, d));
    }
    SECTION("dif entailed by instantiation is dropped") {
        Term x = alloc.fresh("X");
        Substitution s;
        DifStore d;
        REQUIRE(add_dif(x, Term::atom("a"), false, s, d));
        auto u = unify(x, Term::atom("b"), s, d);
        REQUIRE(u);
        REQUIRE(u->difs.empty());
    }
    SECTION("dif on compound stays pending until decided") {
        Term t = parse("p(f(X,Y), f(a,b))", alloc);
        Substitution s;
        DifStore d;
        REQUIRE(add_dif(t.arg(0), t.arg(1), false, s, d));
        auto u = unify(var_named(t, "X"), Term::atom("a"), s, d);
        REQUIRE(u);
        REQUIRE(u->difs.size() == 1);
        REQUIRE_FALSE(unify(var_named(t, "Y"), Term::atom("b"), u->subst, u->difs));
    }
    SECTION("identical dif fails immediately") {
        Term x = alloc.fresh("X");
        Substitution s;
        DifStore d;
        REQUIRE_FALSE(add_dif(x, x, true, s, d));
    }
}

TEST_CASE("unify properties", "[term][property]") {
    const std::vector<Term> domain = testing::ground_domain();
    testing::TermGen gen(20240611, 3);
    int unified = 0;
    for (int iter = 0; iter < 1200; ++iter) {
        Term t1 = gen.term(2);
        Term t2 = gen.term(2);
        auto u = unify(t1, t2, {}, {});
        if (u) {
            ++unified;
            // the unifier equates both sides and is idempotent
            REQUIRE(identical(u->subst.apply(t1), u->subst.apply(t2)));
            Term once = u->subst.apply(t1);
            REQUIRE(identical(u->subst.apply(once), once));
        }
        // brute force over ground assignments of the three variables
        bool some_ground_unifier = false;
        for (const Term& a : domain) {
            for (const Term& b : domain) {
                for (const Term& c : domain) {
                    std::unordered_map<VarId, Term> theta{{0, a}, {1, b}, {2, c}};
                    if (!identical(instantiate(t1, theta), instantiate(t2, theta))) {
                        continue;
                    }
                    some_ground_unifier = true;
                    REQUIRE(u);
                    // theta factors through the mgu: x.sigma.theta == x.theta
                    for (const Term& v : gen.vars()) {
                        REQUIRE(identical(instantiate(u->subst.apply(v), theta), instantiate(v, theta)));
                    }
                }
            }
        }
        if (!u) {
            REQUIRE_FALSE(some_ground_unifier);
        }
    }
    REQUIRE(unified > 100);
}

TEST_CASE("variant_of", "[term]") {
    VarAllocator alloc;
    auto v = [&](std::string_view a, std::string_view b) { return variant_of(parse(a, alloc), parse(b, alloc)); };
    REQUIRE(v("f(X,Y)", "f(A,B)"));
    REQUIRE_FALSE(v("f(X,X)", "f(A,B)"));
    REQUIRE_FALSE(v("f(X,Y)", "f(A,A)"));
    REQUIRE_FALSE(v("f(X,a)", "f(a,X)"));
    REQUIRE(v("[X,Y|X]", "[B,A|B]"));

    SECTION("equivalence relation on random terms") {
        testing::TermGen gen(7, 4);
        std::vector<Term> terms;
        for (int i = 0; i < 60; ++i) {
            terms.push_back(gen.term(2));
        }
        for (const Term& a : terms) {
            REQUIRE(variant_of(a, a));
            Term renamed = shift_vars(a, 100);
            REQUIRE(variant_of(a, renamed));
            REQUIRE(variant_hash(a) == variant_hash(renamed));
            for (const Term& b : terms) {
                REQUIRE(variant_of(a, b) == variant_of(b, a));
                if (variant_of(a, b)) {
                    REQUIRE(variant_hash(a) == variant_hash(b));
                    for (const Term& c : terms) {
                        if (variant_of(b, c)) {
                            REQUIRE(variant_of(a, c));
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("ground_with_any", "[term]") {
    VarAllocator alloc;
    SECTION("numbering from zero in first-occurrence order") {
        Term g = parse("alldifferent([X,Y])", alloc);
        Grounding r = ground_with_any(g, 0);
        REQUIRE(render_term(r.goal) == "alldifferent([any0,any1])");
        REQUIRE(r.bindings.size() == 2);
        REQUIRE(r.bindings[0].first.name() == "X");
        REQUIRE(r.bindings[0].second.name() == "any0");
        REQUIRE(r.bindings[1].second.name() == "any1");
    }
    SECTION("ground goal is unchanged") {
        Term g = parse("alldifferent([a])", alloc);
        Grounding r = ground_with_any(g, 0);
        REQUIRE(identical(r.goal, g));
        REQUIRE(r.bindings.empty());
    }
    SECTION("shared variable gets one constant") {
        Grounding r = ground_with_any(parse("f(Z,Z)", alloc), 3);
        REQUIRE(render_term(r.goal) == "f(any3,any3)");
        REQUIRE(r.bindings.size() == 1);
    }
    SECTION("property: output is ground, and back-substitution is a variant") {
        testing::TermGen gen(99, 3);
        for (int i = 0; i < 200; ++i) {
            Term t = Term::compound("p", {gen.term(3)});
            Grounding r = ground_with_any(t, 0);
            REQUIRE(is_ground(r.goal));
            // map each any<k> back to a fresh variable
            std::function<Term(const Term&)> strip = [&](const Term& x) -> Term {
                if (x.is_atom() && x.name().starts_with("any")) {
                    return Term::var(500 + std::stoll(x.name().substr(3)));
                }
                if (!x.is_compound()) {
                    return x;
                }
                std::vector<Term> args;
                for (const Term& a : x.args()) {
                    args.push_back(strip(a));
                }
                return Term::compound(x.name(), args);
            };
            REQUIRE(variant_of(strip(r.goal), t));
        }
    }
}

TEST_CASE("enumerate_subterms", "[term]") {
    VarAllocator alloc;
    SECTION("pre-order paths") {
        auto subs = enumerate_subterms(parse("f(a, g(a))", alloc));
        REQUIRE(subs.size() == 3);
        REQUIRE(subs[0].path == TermPath{1});
        REQUIRE(render_term(subs[0].term) == "a");
        REQUIRE(subs[1].path == TermPath{2});
        REQUIRE(render_term(subs[1].term) == "g(a)");
        REQUIRE(subs[2].path == TermPath{2, 1});
    }
    SECTION("variable argument") {
        auto subs = enumerate_subterms(parse("f(X)", alloc));
        REQUIRE(subs.size() == 1);
        REQUIRE(subs[0].term.is_var());
    }
    SECTION("lists are nested pairs") {
        auto subs = enumerate_subterms(parse("alldifferent([a,b])", alloc));
        std::vector<std::string> seen;
        for (const auto& s : subs) {
            seen.push_back(render_term(s.term));
        }
        REQUIRE(seen == std::vector<std::string>{"[a,b]", "a", "[b]", "b", "[]"});
    }
    SECTION("count equals nodes minus one of the argument forest") {
        testing::TermGen gen(5, 3);
        for (int i = 0; i < 100; ++i) {
            Term t = Term::compound("p", {gen.term(3), gen.term(2)});
            REQUIRE(enumerate_subterms(t).size() == term_size(t) - 1);
            for (const auto& s : enumerate_subterms(t)) {
                REQUIRE(identical(subterm_at(t, s.path), s.term));
            }
        }
    }
}

TEST_CASE("rename_apart", "[term]") {
    VarAllocator parse_alloc;
    SourceFile f = parse_file("nat(s(N)) :- nat(N).\nnat(0).\np(X,Y,X).\n");
    Program p = f.program();
    VarAllocator alloc(1000);
    SECTION("recursive clause gets fresh shared variable") {
        Clause r = rename_apart(p.clause(0), alloc);
        REQUIRE(variant_of(r.head, p.clause(0).head));
        REQUIRE(r.head.arg(0).arg(0).var_id() >= 1000);
        REQUIRE(r.head.arg(0).arg(0).var_id() == r.body[0].arg(0).var_id());
    }
    SECTION("ground clause unchanged") {
        Clause r = rename_apart(p.clause(1), alloc);
        REQUIRE(identical(r.head, p.clause(1).head));
    }
    SECTION("sharing preserved") {
        Clause r = rename_apart(p.clause(2), alloc);
        REQUIRE(render_term(r.head) == "p(V0,_,V0)");
        REQUIRE(variant_of(r.head, p.clause(2).head));
    }
}

TEST_CASE("program index", "[term]") {
    Program p = parse_file("q(a).\nr.\nq(b).\n").program();
    REQUIRE(p.lookup({"q", 1}).size() == 2);
    REQUIRE(p.lookup({"q", 1})[1] == 2);
    REQUIRE(p.lookup({"r", 0}).size() == 1);
    REQUIRE(p.lookup({"s", 0}).empty());
    REQUIRE(p.predicates().size() == 2);
}

}  // namespace lpwb
