#pragma once

#include "lpwb/diagnosis.hpp"
#include "lpwb/engine.hpp"
#include "lpwb/syntax.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lpwb {

/// How one clause of the base program appears in a fragment.
struct ClauseMark {
    /// `false` inserted before body goal k; 0 removes the clause.
    std::optional<std::size_t> false_at;
    /// Goals generalized away, rendered "* goal".
    std::vector<bool> deleted;

    bool removed() const { return false_at == std::size_t{0}; }
    bool goal_visible(std::size_t i) const;
};

struct ProgramFragment {
    Program base;
    std::vector<ClauseMark> marks;
    AssertionKind query_kind = AssertionKind::Pos;
    std::vector<Term> query;
    /// Set when some trial ran out of budget, so the slice may not be minimal.
    bool inconclusive = false;

    static ProgramFragment whole(Program base, AssertionKind kind, std::vector<Term> query);

    /// The program the fragment denotes: deleted goals dropped, `false`
    /// inserted, removed clauses left out.
    Program program() const;
    std::size_t deleted_count() const;
    std::size_t removed_count() const;
};

struct LinePart {
    std::size_t clause = 0;
    /// -1 for the head, otherwise the body goal index.
    int goal = -1;

    auto operator<=>(const LinePart&) const = default;
};

using LineSet = std::set<LinePart>;

/// Every head and goal line of `program`; facts count one line.
LineSet all_lines(const Program& program);
LineSet active_lines(const ProgramFragment& fragment);

class SliceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Deletes as many body goals as possible while the query keeps failing finitely.
ProgramFragment slice_insufficiency(const Program& program, std::span<const Term> goals, const Budget& budget);

struct IncorrectnessSlice {
    /// "Xs = [[],[]]. % Incorrect!"
    std::string witness_note;
    std::vector<ExplanationStage> generalizations;
    /// The most general goal that is wrong and still succeeds.
    std::vector<Term> target;
    ProgramFragment fragment;

    std::vector<FeedbackLine> lines(int anchor_line) const;
};

/// `witness` is an answer of `goals` in `program` that the reference refutes.
IncorrectnessSlice slice_incorrectness(const Program& program, std::span<const Term> goals,
                                       const Substitution& witness, const ReferenceRegistry& registry,
                                       const Budget& budget);

/// Hides as much as possible with `false` while a loop certificate remains.
ProgramFragment slice_nontermination(const Program& program, std::span<const Term> goals, const Budget& budget);

LineSet intersect_fragments(std::span<const ProgramFragment> fragments);

/// The query followed by the program, with "~~" around struck text.
std::string render_fragment(const ProgramFragment& fragment);

}  // namespace lpwb
