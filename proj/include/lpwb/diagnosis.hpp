#pragma once

#include "lpwb/reference.hpp"
#include "lpwb/syntax.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace lpwb {

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class GenRule { R1, R2, R3, R4, R5 };

std::string_view gen_rule_name(GenRule r);

struct GeneralizationCandidate {
    std::vector<Term> goals;
    std::vector<GenRule> rules_used;
};

/// Larger is more general: smaller total size first, then more distinct
/// variables, then fewer goals.
struct GeneralityKey {
    long neg_size = 0;
    long vars = 0;
    long neg_goals = 0;

    auto operator<=>(const GeneralityKey&) const = default;
};

GeneralityKey generality_key(std::span<const Term> goals);

/// Strict order used to pick a stage result: key first, then canonical rendering.
bool more_general(std::span<const Term> a, std::span<const Term> b);

/// Every single application of `rule` to `goals`; candidates are not verified.
std::vector<GeneralizationCandidate> apply_generalization_rule(GenRule rule, std::span<const Term> goals,
                                                               const ReferenceRegistry& registry);

struct ExplanationStage {
    std::string label;
    AssertionKind kind = AssertionKind::Neg;
    std::vector<std::pair<Term, Term>> equations;
    std::vector<Term> goals;
    std::vector<GenRule> rules_used;

    /// The suggested assertion, without the machine prefix.
    std::string suggestion() const;
    std::vector<FeedbackLine> lines(int anchor_line) const;
};

struct Explanation {
    enum class Kind { SpecializedPositive, GeneralizedNegative };

    Kind kind = Kind::GeneralizedNegative;
    std::vector<ExplanationStage> stages;
    int anchor_line = 0;

    std::vector<FeedbackLine> lines() const;
};

/// Decides whether a candidate still shows the problem.
using Verifier = std::function<bool(std::span<const Term>)>;

struct StageSpec {
    std::string label;
    std::vector<GenRule> rules;
};

struct SearchLimits {
    int max_verdicts_per_stage = 500;
};

/// Best-first generalization, one search per stage, each seeded with the
/// previous stage's result. Stages that do not strictly improve are dropped.
std::vector<ExplanationStage> generalize_in_stages(std::span<const Term> goals, const std::vector<StageSpec>& stages,
                                                   const ReferenceRegistry& registry, const Verifier& verifier,
                                                   SearchLimits limits = {});

/// The R1/R2, R1-R4, R1-R5 stage plan with the given labels.
std::vector<StageSpec> default_stages(const std::string& first, const std::string& further);

/// A negative assertion the reference proves: specialize it with the
/// reference's answer, grounding what is left with any0, any1, ...
Explanation explain_incorrect_negative(std::span<const Term> goals, const ReferenceRegistry& registry,
                                       const Budget& budget, int anchor_line = 0);

/// A positive assertion the reference refutes: staged generalization.
Explanation explain_incorrect_positive(std::span<const Term> goals, const ReferenceRegistry& registry,
                                       const Budget& budget, int anchor_line = 0, SearchLimits limits = {});

}  // namespace lpwb
