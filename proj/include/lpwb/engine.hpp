#pragma once

#include "lpwb/term.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace lpwb {

struct Budget {
    std::int64_t max_steps = 100'000;      // head-unification attempts
    int max_depth = 64;                    // iterative deepening limit
    std::int64_t per_depth_steps = 50'000; // steps per deepening pass

    bool valid() const { return max_steps > 0 && max_depth > 0 && per_depth_steps > 0; }
};

class UnknownPredicate : public std::runtime_error {
public:
    explicit UnknownPredicate(PredKey key)
        : std::runtime_error("unknown predicate " + key.str()), key_(std::move(key)) {}
    const PredKey& key() const { return key_; }

private:
    PredKey key_;
};

/// Raised by '$succ'/2 when neither argument is an integer.
class InstantiationError : public std::runtime_error {
public:
    explicit InstantiationError(const std::string& what) : std::runtime_error("instantiation error in " + what) {}
};

/// An answer restricted to the query variables, with pending disequations.
struct Answer {
    Substitution subst;
    DifStore difs;

    /// True when no hard disequation is pending.
    bool unconditional() const { return !difs.has_hard(); }
};

struct Solutions {
    std::vector<Answer> answers;
    bool exhausted = false;
    std::int64_t steps_used = 0;
};

struct FiniteFailure {
    std::int64_t steps_used = 0;
};

struct BudgetExhausted {
    std::int64_t steps_used = 0;
};

/// Selected goals from the root down to a goal that is a variant of one of its ancestors.
struct LoopCertificate {
    std::vector<Term> goals;
    std::size_t ancestor_index = 0;
};

struct LoopProven {
    LoopCertificate certificate;
};

using Outcome = std::variant<Solutions, FiniteFailure, BudgetExhausted, LoopProven>;

std::int64_t steps_used(const Outcome& o);

enum class Want { First, All };

struct EngineOptions {
    /// Treat calls to undefined predicates as failing instead of throwing.
    bool unknown_fails = false;
};

bool is_builtin(const PredKey& key);

/// Depth-first SLD resolution: leftmost goal, clauses in source order.
Outcome solve_dfs(const Program& program, std::span<const Term> goals, const Budget& budget, Want want,
                  EngineOptions options = {});

/// Iterative deepening on the number of clause resolutions along a branch.
Outcome solve_fair(const Program& program, std::span<const Term> goals, const Budget& budget,
                   EngineOptions options = {});

struct LoopCheckResult {
    enum class Kind { Proven, Disproven, Unknown };
    Kind kind = Kind::Unknown;
    std::optional<Answer> witness;
    std::size_t prunings = 0;
    std::int64_t steps_used = 0;
};

/// Failure prover that prunes a branch whenever the selected goal is a variant
/// of an ancestor selected goal on the same branch.
LoopCheckResult prove_failure_loopcheck(const Program& program, std::span<const Term> goals, const Budget& budget,
                                        EngineOptions options = {});

/// Depth-first search for a derivation whose selected goal is a variant of an ancestor.
std::optional<LoopCertificate> find_loop(const Program& program, std::span<const Term> goals, const Budget& budget,
                                         EngineOptions options = {});

struct TerminationResult {
    enum class Kind { Terminates, NonTerminating, Unknown };
    Kind kind = Kind::Unknown;
    std::optional<LoopCertificate> certificate;
    std::int64_t steps_used = 0;
};

/// Universal termination of (goals, false) under the depth-first strategy.
TerminationResult check_universal_termination(const Program& program, std::span<const Term> goals,
                                              const Budget& budget, EngineOptions options = {});

}  // namespace lpwb
