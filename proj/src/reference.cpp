#include "lpwb/reference.hpp"

#include "lpwb/syntax.hpp"
#include "reader.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lpwb {

namespace {

const char* const kListLibrary =
    "alldifferent([]).\n"
    "alldifferent([X|Xs]) :- nonmember_of(X, Xs), alldifferent(Xs).\n"
    "nonmember_of(_, []).\n"
    "nonmember_of(X, [E|Es]) :- '$ref_dif'(X, E), nonmember_of(X, Es).\n"
    "length([], 0).\n"
    "length([_|Xs], N) :- length(Xs, M), '$succ'(M, N).\n";

const char* const kListImplications = "alldifferent([_|Xs]) ==> alldifferent(Xs).\n";

// Keeps open-list calls cheap; the looping cases end up unspecified anyway.
constexpr Budget kListBudget{3000, 20, 3000};

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + p.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Budget tighter(const Budget& a, const Budget& b) {
    return Budget{std::min(a.max_steps, b.max_steps), std::min(a.max_depth, b.max_depth),
                  std::min(a.per_depth_steps, b.per_depth_steps)};
}

Answer without_soft(Answer a) {
    DifStore hard;
    for (const Disequation& d : a.difs.pending()) {
        if (!d.soft) {
            hard.push(d);
        }
    }
    a.difs = std::move(hard);
    return a;
}

}  // namespace

std::vector<ImplicationRule> parse_implications(std::string_view text) {
    std::vector<ImplicationRule> out;
    VarAllocator alloc;
    detail::Reader r(detail::tokenize(text), alloc);
    while (!r.at_eof()) {
        r.new_scope();
        const detail::Token start = r.peek();
        ImplicationRule rule{r.goal(), {}};
        r.expect_symbol("==>");
        rule.rhs = r.conjunction();
        r.expect_end();
        std::vector<Term> lhs_vars = term_variables(std::span<const Term>(&rule.lhs, 1));
        for (const Term& v : term_variables(rule.rhs)) {
            auto same = [&](const Term& w) { return w.var_id() == v.var_id(); };
            if (std::none_of(lhs_vars.begin(), lhs_vars.end(), same)) {
                r.fail_at(start, "right-hand side variable not in left-hand side");
            }
        }
        out.push_back(std::move(rule));
    }
    return out;
}

ReferenceRegistry ReferenceRegistry::builtin() {
    ReferenceRegistry reg;
    reg.add_clauses(kListLibrary, kListBudget);
    reg.chr_ = family_rules();
    reg.add_implications(kListImplications);
    return reg;
}

void ReferenceRegistry::add_clauses(std::string_view text, std::optional<Budget> budget) {
    const Program added = parse_file(text).program();
    for (const Clause& c : added.clauses()) {
        clauses_.push_back(c);
        if (budget) {
            overrides_[pred_key(c.head)] = *budget;
        }
    }
    library_ = Program(clauses_);
}

void ReferenceRegistry::add_chr(std::string_view text) {
    ChrProgram more = parse_chr(text);
    for (ChrRule& r : more.rules) {
        chr_.rules.push_back(std::move(r));
    }
    chr_.already_in_store = chr_.already_in_store && more.already_in_store;
}

void ReferenceRegistry::add_implications(std::string_view text) {
    for (ImplicationRule& r : parse_implications(text)) {
        implications_.push_back(std::move(r));
    }
}

void ReferenceRegistry::load_directory(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file()) {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        const std::string name = p.filename().string();
        if (name.ends_with(".ref.pl")) {
            add_clauses(read_file(p));
        } else if (name.ends_with(".ref.chr")) {
            add_chr(read_file(p));
        } else if (name.ends_with(".imp")) {
            add_implications(read_file(p));
        }
    }
}

bool ReferenceRegistry::defines(const PredKey& key) const {
    return library_.defines(key) || chr_.constraints().count(key) > 0;
}

std::vector<PredKey> ReferenceRegistry::predicates() const {
    std::vector<PredKey> out = library_.predicates();
    for (const PredKey& k : chr_.constraints()) {
        if (std::find(out.begin(), out.end(), k) == out.end()) {
            out.push_back(k);
        }
    }
    std::sort(out.begin(), out.end(), [](const PredKey& a, const PredKey& b) { return a.str() < b.str(); });
    return out;
}

Budget ReferenceRegistry::budget_for(std::span<const Term> goals, const Budget& base) const {
    Budget b = base;
    for (const Term& g : goals) {
        if (!g.is_callable()) {
            continue;
        }
        auto it = overrides_.find(pred_key(g));
        if (it != overrides_.end()) {
            b = tighter(b, it->second);
        }
    }
    return b;
}

Verdict reference_verdict(const ReferenceRegistry& registry, std::span<const Term> goals, const Budget& budget) {
    if (goals.empty()) {
        return Verdict::yes(Answer{});
    }
    bool has_constraint = false;
    for (const Term& g : goals) {
        if (!g.is_callable()) {
            return Verdict::unspecified(Verdict::Reason::UnknownPredicate, render_term(g));
        }
        const PredKey key = pred_key(g);
        if (registry.chr().is_constraint(g)) {
            has_constraint = true;
        } else if (!is_builtin(key) && !registry.library().defines(key)) {
            return Verdict::unspecified(Verdict::Reason::UnknownPredicate, key.str());
        }
    }
    const Budget b = registry.budget_for(goals, budget);
    if (has_constraint) {
        return chr_verdict(registry.chr(), registry.library(), goals, b);
    }

    try {
        Outcome first = solve_dfs(registry.library(), goals, b, Want::First);
        if (std::holds_alternative<FiniteFailure>(first)) {
            return Verdict::no();
        }
        if (const auto* s = std::get_if<Solutions>(&first)) {
            if (s->answers.front().unconditional()) {
                return Verdict::yes(without_soft(s->answers.front()));
            }
            Outcome all = solve_dfs(registry.library(), goals, b, Want::All);
            const auto& every = std::get<Solutions>(all);
            for (const Answer& a : every.answers) {
                if (a.unconditional()) {
                    return Verdict::yes(without_soft(a));
                }
            }
            return Verdict::unspecified(every.exhausted ? Verdict::Reason::Pending : Verdict::Reason::Budget);
        }
        // depth-first search ran out; a fair search may still find a witness
        Outcome fair = solve_fair(registry.library(), goals, b);
        if (std::holds_alternative<FiniteFailure>(fair)) {
            return Verdict::no();
        }
        if (const auto* s = std::get_if<Solutions>(&fair)) {
            for (const Answer& a : s->answers) {
                if (a.unconditional()) {
                    return Verdict::yes(without_soft(a));
                }
            }
        }
        return Verdict::unspecified(Verdict::Reason::Budget);
    } catch (const InstantiationError& e) {
        return Verdict::unspecified(Verdict::Reason::Budget, e.what());
    }
}

std::vector<std::vector<Term>> lookup_implications(const ReferenceRegistry& registry, const Term& goal) {
    std::vector<std::vector<Term>> out;
    for (const ImplicationRule& rule : registry.implications()) {
        // move rule variables above the goal's so the two never collide
        const VarId shift = std::max<VarId>(max_var_id(std::span<const Term>(&goal, 1)) + 1, 0);
        std::unordered_map<VarId, Term> map;
        if (!match(shift_vars(rule.lhs, shift), goal, map)) {
            continue;
        }
        std::vector<Term> rhs;
        for (const Term& t : rule.rhs) {
            rhs.push_back(instantiate(shift_vars(t, shift), map));
        }
        out.push_back(std::move(rhs));
    }
    return out;
}

}  // namespace lpwb
