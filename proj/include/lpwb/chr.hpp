#pragma once

#include "lpwb/engine.hpp"
#include "lpwb/verdict.hpp"

#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

namespace lpwb {

struct ChrGuard {
    Term lhs;  // holds when lhs and rhs cannot be made equal
    Term rhs;
};

struct ChrRule {
    enum class Kind { Simplification, Propagation };

    std::string name;
    Kind kind = Kind::Simplification;
    std::vector<Term> heads;
    std::vector<ChrGuard> guard;
    bool fails = false;      // body is `false`
    std::vector<Term> body;  // constraints to add; empty means `true`
    int source_line = 0;
};

struct ChrProgram {
    std::vector<ChrRule> rules;
    bool already_in_store = true;

    /// Predicates occurring in rule heads or bodies.
    std::unordered_set<PredKey, PredKeyHash> constraints() const;
    bool is_constraint(const Term& goal) const;
};

/// Reads `name @ H1, H2 <=> G | B.` and `name @ H ==> B.` rules.
/// `:- option(already_in_store, on|off).` is honoured, other directives ignored.
ChrProgram parse_chr(std::string_view text);

/// The child_of/ancestor_of rules c1-c4.
const ChrProgram& family_rules();

struct ChrFiring {
    std::size_t rule = 0;
    std::vector<std::size_t> constraints;  // store identities matched by the heads
};

struct ChrConsistent {
    std::vector<Term> store;
    std::vector<ChrFiring> trace;
};

struct ChrInconsistent {
    std::vector<ChrFiring> trace;
};

struct ChrBudgetExhausted {
    std::vector<ChrFiring> trace;
};

using ChrOutcome = std::variant<ChrConsistent, ChrInconsistent, ChrBudgetExhausted>;

/// Runs the rules to a fixpoint. `difs` is consulted by guards; constraints
/// and difs are taken as fully instantiated.
ChrOutcome chr_run(const ChrProgram& program, std::span<const Term> initial, const DifStore& difs,
                   std::int64_t max_firings);

/// Evaluates the non-constraint goals with `library` first, then runs the
/// rules on each answer. Only ever False or Unspecified, except for an empty
/// conjunction.
Verdict chr_verdict(const ChrProgram& program, const Program& library, std::span<const Term> goals,
                    const Budget& budget);

}  // namespace lpwb
