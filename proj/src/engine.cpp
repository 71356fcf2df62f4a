#include "lpwb/engine.hpp"

#include <algorithm>
#include <memory>

namespace lpwb {

std::int64_t steps_used(const Outcome& o) {
    return std::visit(
        [](const auto& x) -> std::int64_t {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, LoopProven>) {
                return 0;
            } else {
                return x.steps_used;
            }
        },
        o);
}

bool is_builtin(const PredKey& key) {
    if (key.arity == 0) {
        return key.name == "true" || key.name == "false" || key.name == "fail";
    }
    if (key.arity == 2) {
        return key.name == "=" || key.name == "dif" || key.name == "$ref_dif" || key.name == "$succ";
    }
    return false;
}

namespace {

enum class LoopMode { None, Prune, Detect };

// Answers, and goals snapshotted for loop checking, larger than these stop the
// run as over budget.
constexpr std::size_t kMaxTermNodes = 1 << 18;
constexpr std::size_t kMaxGoalNodes = 1 << 13;
// Unification work allowed per run, in visited nodes: a fixed allowance plus
// a share per step. Growing terms otherwise make steps arbitrarily expensive.
constexpr std::uint64_t kWorkAllowance = 1 << 20;
constexpr std::uint64_t kWorkPerStep = 256;

struct Ancestor {
    Term goal;  // as instantiated when it was selected
    std::size_t hash;
    std::shared_ptr<const Ancestor> parent;
};
using AncestorPtr = std::shared_ptr<const Ancestor>;

struct GoalCell {
    Term goal;
    AncestorPtr ancestors;
    std::shared_ptr<const GoalCell> next;
};
using Resolvent = std::shared_ptr<const GoalCell>;

struct ChoicePoint {
    Term goal;
    PredKey key;
    AncestorPtr ancestors;  // chain for the body goals
    Resolvent rest;
    std::size_t next_clause;
    std::size_t trail_mark;
    std::size_t dif_mark;
    int depth;
};

struct MachineConfig {
    std::int64_t max_steps = 0;
    std::optional<int> depth_limit;
    LoopMode loop = LoopMode::None;
    Want want = Want::All;
    EngineOptions options;
};

enum class Status { Exhausted, Stopped, Budget, Loop };

struct MachineResult {
    Status status = Status::Exhausted;
    std::vector<Answer> answers;
    bool cutoff = false;
    std::int64_t steps = 0;
    std::size_t prunings = 0;
    std::optional<LoopCertificate> certificate;
};

bool head_may_match(const Term& goal, const Term& head, const Substitution& subst) {
    if (goal.arity() != head.arity()) {
        return false;
    }
    for (std::size_t i = 0; i < goal.arity(); ++i) {
        const Term& h = head.arg(i);
        if (h.is_var()) {
            continue;
        }
        Term g = subst.walk(goal.arg(i));
        if (g.is_var()) {
            continue;
        }
        if (g.kind() != h.kind()) {
            return false;
        }
        switch (g.kind()) {
        case TermKind::Atom:
            if (g.name() != h.name()) return false;
            break;
        case TermKind::Int:
            if (g.int_value() != h.int_value()) return false;
            break;
        case TermKind::Compound:
            if (g.arity() != h.arity() || g.name() != h.name()) return false;
            break;
        case TermKind::Var: break;
        }
    }
    return true;
}

class Machine {
public:
    Machine(const Program& program, std::span<const Term> goals, MachineConfig config)
        : program_(program), config_(config), query_vars_(term_variables(goals)),
          alloc_(max_var_id(goals) + 1), work_start_(unification_work()) {
        for (auto it = goals.rbegin(); it != goals.rend(); ++it) {
            resolvent_ = std::make_shared<const GoalCell>(GoalCell{*it, nullptr, resolvent_});
        }
    }

    MachineResult run() {
        bool active = true;
        while (active) {
            if (stop_) {
                break;
            }
            if (!resolvent_) {
                if (!record_answer()) {
                    break;
                }
                if (config_.want == Want::First) {
                    result_.status = choicepoints_.empty() && !result_.cutoff ? Status::Exhausted : Status::Stopped;
                    return std::move(result_);
                }
                active = backtrack();
                continue;
            }
            active = step();
        }
        if (!stop_) {
            result_.status = Status::Exhausted;
        }
        return std::move(result_);
    }

private:
    // Returns false when the search space is exhausted or the run stopped.
    bool step() {
        const GoalCell& cell = *resolvent_;
        Term goal = subst_.walk(cell.goal);
        Resolvent rest = cell.next;
        if (!goal.is_callable()) {
            return backtrack();
        }
        PredKey key = pred_key(goal);
        if (is_builtin(key)) {
            return builtin(goal, key, rest);
        }
        std::span<const std::size_t> clauses = program_.lookup(key);
        if (clauses.empty()) {
            if (!config_.options.unknown_fails) {
                throw UnknownPredicate(key);
            }
            return backtrack();
        }

        AncestorPtr chain = cell.ancestors;
        if (config_.loop != LoopMode::None) {
            std::size_t budget = kMaxGoalNodes;
            std::optional<Term> bounded = subst_.apply_bounded(goal, budget);
            if (!bounded) {
                return over_budget();
            }
            Term snapshot = std::move(*bounded);
            const std::size_t h = variant_hash(snapshot);
            std::size_t distance = 0;
            for (const Ancestor* a = chain.get(); a; a = a->parent.get(), ++distance) {
                if (a->hash == h && variant_of(a->goal, snapshot)) {
                    if (config_.loop == LoopMode::Prune) {
                        ++result_.prunings;
                        return backtrack();
                    }
                    result_.certificate = certificate(chain, snapshot, distance);
                    result_.status = Status::Loop;
                    stop_ = true;
                    return false;
                }
            }
            chain = std::make_shared<const Ancestor>(Ancestor{snapshot, h, chain});
        }

        if (config_.depth_limit && depth_ + 1 > *config_.depth_limit) {
            result_.cutoff = true;
            return backtrack();
        }
        switch (try_clauses(goal, std::move(key), std::move(chain), std::move(rest), 0)) {
        case Try::Resolved: return true;
        case Try::Stopped: return false;
        case Try::NoMatch: break;
        }
        return backtrack();
    }

    static LoopCertificate certificate(const AncestorPtr& chain, const Term& current, std::size_t distance) {
        LoopCertificate c;
        for (const Ancestor* a = chain.get(); a; a = a->parent.get()) {
            c.goals.push_back(a->goal);
        }
        std::reverse(c.goals.begin(), c.goals.end());
        c.ancestor_index = c.goals.size() - 1 - distance;
        c.goals.push_back(current);
        return c;
    }

    bool builtin(const Term& goal, const PredKey& key, Resolvent rest) {
        if (key.arity == 0) {
            if (key.name == "true") {
                resolvent_ = std::move(rest);
                return true;
            }
            return backtrack();
        }
        bool ok = false;
        if (key.name == "$succ") {
            ok = succ(goal);
        } else if (key.name == "=") {
            const std::size_t mark = subst_.mark();
            ok = unify_in_place(goal.arg(0), goal.arg(1), subst_) && recheck_difs(difs_, subst_, mark);
        } else {
            ok = add_dif(goal.arg(0), goal.arg(1), key.name == "$ref_dif", subst_, difs_);
        }
        if (!ok) {
            return backtrack();
        }
        resolvent_ = std::move(rest);
        return true;
    }

    // '$succ'(M, N): N = M + 1 over non-negative integers.
    bool succ(const Term& goal) {
        Term m = subst_.walk(goal.arg(0));
        Term n = subst_.walk(goal.arg(1));
        const std::size_t mark = subst_.mark();
        if (m.is_int()) {
            return m.int_value() >= 0 && unify_in_place(n, Term::integer(m.int_value() + 1), subst_) &&
                   recheck_difs(difs_, subst_, mark);
        }
        if (n.is_int()) {
            return n.int_value() > 0 && unify_in_place(m, Term::integer(n.int_value() - 1), subst_) &&
                   recheck_difs(difs_, subst_, mark);
        }
        if (!m.is_var() || !n.is_var()) {
            return false;
        }
        throw InstantiationError("'$succ'/2");
    }

    enum class Try { Resolved, NoMatch, Stopped };

    Try try_clauses(const Term& goal, PredKey key, AncestorPtr chain, Resolvent rest, std::size_t from) {
        std::span<const std::size_t> clauses = program_.lookup(key);
        for (std::size_t i = from; i < clauses.size(); ++i) {
            if (result_.steps >= config_.max_steps || over_work()) {
                over_budget();
                return Try::Stopped;
            }
            ++result_.steps;
            const std::size_t ci = clauses[i];
            const Clause& clause = program_.normalized(ci);
            if (!head_may_match(goal, clause.head, subst_)) {
                continue;
            }
            const VarId base = alloc_.reserve(program_.var_count(ci));
            const std::size_t mark = subst_.mark();
            const std::size_t dif_mark = difs_.mark();
            if (!unify_in_place(goal, shift_vars(clause.head, base), subst_, base) ||
                !recheck_difs(difs_, subst_, mark)) {
                subst_.undo(mark);
                difs_.undo(dif_mark);
                continue;
            }
            if (i + 1 < clauses.size()) {
                choicepoints_.push_back(ChoicePoint{goal, key, chain, rest, i + 1, mark, dif_mark, depth_});
            }
            ++depth_;
            Resolvent r = rest;
            for (auto it = clause.body.rbegin(); it != clause.body.rend(); ++it) {
                r = std::make_shared<const GoalCell>(GoalCell{shift_vars(*it, base), chain, r});
            }
            resolvent_ = std::move(r);
            return Try::Resolved;
        }
        return Try::NoMatch;
    }

    bool backtrack() {
        while (!choicepoints_.empty()) {
            ChoicePoint cp = std::move(choicepoints_.back());
            choicepoints_.pop_back();
            subst_.undo(cp.trail_mark);
            difs_.undo(cp.dif_mark);
            depth_ = cp.depth;
            switch (try_clauses(cp.goal, std::move(cp.key), std::move(cp.ancestors), std::move(cp.rest),
                                cp.next_clause)) {
            case Try::Resolved: return true;
            case Try::Stopped: return false;
            case Try::NoMatch: break;
            }
        }
        return false;
    }

    bool over_work() const {
        const auto steps = static_cast<std::uint64_t>(std::max<std::int64_t>(config_.max_steps, 0));
        return unification_work() - work_start_ > kWorkAllowance + kWorkPerStep * steps;
    }

    bool over_budget() {
        result_.status = Status::Budget;
        stop_ = true;
        return false;
    }

    bool record_answer() {
        std::size_t budget = kMaxTermNodes;
        auto bounded = [&](const Term& t) { return subst_.apply_bounded(t, budget); };
        Answer a;
        for (const Term& v : query_vars_) {
            std::optional<Term> value = bounded(v);
            if (!value) {
                return over_budget();
            }
            if (!(value->is_var() && value->var_id() == v.var_id())) {
                a.subst.bind(v.var_id(), std::move(*value));
            }
        }
        for (const Disequation& d : difs_.pending()) {
            std::optional<Term> l = bounded(d.lhs);
            std::optional<Term> r = bounded(d.rhs);
            if (!l || !r) {
                return over_budget();
            }
            a.difs.push(Disequation{std::move(*l), std::move(*r), d.soft});
        }
        result_.answers.push_back(std::move(a));
        return true;
    }

    const Program& program_;
    MachineConfig config_;
    std::vector<Term> query_vars_;
    VarAllocator alloc_;
    Substitution subst_;
    DifStore difs_;
    std::uint64_t work_start_;
    Resolvent resolvent_;
    std::vector<ChoicePoint> choicepoints_;
    int depth_ = 0;
    bool stop_ = false;
    MachineResult result_;
};

MachineResult run_machine(const Program& program, std::span<const Term> goals, MachineConfig config) {
    return Machine(program, goals, config).run();
}

std::vector<Term> with_false(std::span<const Term> goals) {
    std::vector<Term> g(goals.begin(), goals.end());
    g.push_back(Term::atom("false"));
    return g;
}

}  // namespace

Outcome solve_dfs(const Program& program, std::span<const Term> goals, const Budget& budget, Want want,
                  EngineOptions options) {
    MachineResult r = run_machine(program, goals, MachineConfig{budget.max_steps, std::nullopt, LoopMode::None, want, options});
    if (!r.answers.empty()) {
        return Solutions{std::move(r.answers), r.status == Status::Exhausted, r.steps};
    }
    if (r.status == Status::Budget) {
        return BudgetExhausted{r.steps};
    }
    return FiniteFailure{r.steps};
}

Outcome solve_fair(const Program& program, std::span<const Term> goals, const Budget& budget, EngineOptions options) {
    std::int64_t last_steps = 0;
    for (int depth = 1; depth <= budget.max_depth; ++depth) {
        MachineResult r = run_machine(program, goals,
                                      MachineConfig{budget.per_depth_steps, depth, LoopMode::None, Want::All, options});
        last_steps = r.steps;
        const bool complete = r.status == Status::Exhausted && !r.cutoff;
        if (!r.answers.empty()) {
            return Solutions{std::move(r.answers), complete, r.steps};
        }
        if (complete) {
            return FiniteFailure{r.steps};
        }
    }
    return BudgetExhausted{last_steps};
}

LoopCheckResult prove_failure_loopcheck(const Program& program, std::span<const Term> goals, const Budget& budget,
                                        EngineOptions options) {
    MachineResult r = run_machine(program, goals,
                                  MachineConfig{budget.max_steps, std::nullopt, LoopMode::Prune, Want::First, options});
    LoopCheckResult out;
    out.prunings = r.prunings;
    out.steps_used = r.steps;
    if (!r.answers.empty()) {
        out.kind = LoopCheckResult::Kind::Disproven;
        out.witness = std::move(r.answers.front());
    } else if (r.status == Status::Exhausted) {
        out.kind = LoopCheckResult::Kind::Proven;
    }
    return out;
}

std::optional<LoopCertificate> find_loop(const Program& program, std::span<const Term> goals, const Budget& budget,
                                         EngineOptions options) {
    MachineResult r = run_machine(program, goals,
                                  MachineConfig{budget.max_steps, std::nullopt, LoopMode::Detect, Want::All, options});
    return std::move(r.certificate);
}

TerminationResult check_universal_termination(const Program& program, std::span<const Term> goals,
                                              const Budget& budget, EngineOptions options) {
    const std::vector<Term> query = with_false(goals);
    Outcome o = solve_dfs(program, query, budget, Want::All, options);
    TerminationResult out;
    out.steps_used = steps_used(o);
    if (std::holds_alternative<FiniteFailure>(o)) {
        out.kind = TerminationResult::Kind::Terminates;
        return out;
    }
    if (auto cert = find_loop(program, query, budget, options)) {
        out.kind = TerminationResult::Kind::NonTerminating;
        out.certificate = std::move(cert);
    }
    return out;
}

}  // namespace lpwb
