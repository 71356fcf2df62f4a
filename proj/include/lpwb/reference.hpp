#pragma once

#include "lpwb/chr.hpp"
#include "lpwb/engine.hpp"
#include "lpwb/verdict.hpp"

#include <filesystem>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lpwb {

/// `lhs ==> rhs1, ..., rhsn.`: whenever lhs holds, so do the rhs goals.
struct ImplicationRule {
    Term lhs;
    std::vector<Term> rhs;
};

std::vector<ImplicationRule> parse_implications(std::string_view text);

/// Reference implementations, hidden from diagnostics. Immutable once built.
class ReferenceRegistry {
public:
    /// No references at all.
    ReferenceRegistry() = default;
    /// alldifferent/1, nonmember_of/2, length/2, the family rules and the
    /// alldifferent implication.
    static ReferenceRegistry builtin();

    void add_clauses(std::string_view text, std::optional<Budget> budget = std::nullopt);
    void add_chr(std::string_view text);
    void add_implications(std::string_view text);
    /// Loads `*.ref.pl`, `*.ref.chr` and `*.imp` files in name order.
    void load_directory(const std::filesystem::path& dir);

    bool defines(const PredKey& key) const;
    std::vector<PredKey> predicates() const;
    const Program& library() const { return library_; }
    const ChrProgram& chr() const { return chr_; }
    const std::vector<ImplicationRule>& implications() const { return implications_; }
    /// Budget for a conjunction: the tightest override among its predicates.
    Budget budget_for(std::span<const Term> goals, const Budget& base) const;

private:
    std::vector<Clause> clauses_;
    Program library_;
    ChrProgram chr_;
    std::vector<ImplicationRule> implications_;
    std::unordered_map<PredKey, Budget, PredKeyHash> overrides_;
};

/// True needs an answer without hard disequations; soft ones (from the
/// reference's own '$ref_dif') hold under any injective grounding and are
/// dropped from the returned answer.
Verdict reference_verdict(const ReferenceRegistry& registry, std::span<const Term> goals, const Budget& budget);

/// Instantiated right-hand sides of every implication whose lhs matches goal.
std::vector<std::vector<Term>> lookup_implications(const ReferenceRegistry& registry, const Term& goal);

}  // namespace lpwb
