#pragma once

#include "lpwb/reference.hpp"
#include "lpwb/syntax.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lpwb {

enum class Status {
    Ok,
    RefMismatchNeg,
    RefMismatchPos,
    CodeUnexpectedFailure,
    CodeUnexpectedSuccess,
    WrongFirstAnswer,
    Nontermination,
    FairUnexpectedSuccess,
    FairUnexpectedFailure,
    Inconclusive,
    DefMissing,
};

/// "OK", "REF_MISMATCH_NEG", ...
std::string_view status_name(Status s);

/// What running the user's program showed.
enum class CodeOutcome { NotRun, Success, Failure, Budget, Loop, Terminates, Error };
std::string_view code_outcome_name(CodeOutcome c);

struct AssertionRecord {
    Assertion assertion;
    Verdict reference;
    CodeOutcome code = CodeOutcome::NotRun;
    Status status = Status::Ok;
    /// Why the status is INCONCLUSIVE.
    std::string reason;
    /// First answer of the user's program for positive assertions.
    std::optional<Answer> first_answer;
    /// "Xs = [[],[]]" for WRONG_FIRST_ANSWER.
    std::string witness;
};

struct MissingDefinition {
    PredKey predicate;
    /// Index into CheckReport::records of the last assertion mentioning it.
    std::size_t after_record = 0;
};

struct CheckReport {
    std::string file;
    std::vector<AssertionRecord> records;  // one per assertion, in source order
    std::vector<MissingDefinition> missing;

    /// True when some assertion is not OK or a definition is missing.
    bool has_findings() const;
};

/// Checks every assertion; independent assertions run in parallel.
CheckReport check_file(const SourceFile& file, const ReferenceRegistry& registry, const Budget& budget);
/// Same result, one assertion at a time.
CheckReport check_file_serial(const SourceFile& file, const ReferenceRegistry& registry, const Budget& budget);

/// Checks one assertion against `program` (the file's clauses).
AssertionRecord check_assertion(const Assertion& assertion, const Program& program,
                                const ReferenceRegistry& registry, const Budget& budget);

/// The message for a record, or nothing for OK. `line` is where the
/// assertion starts in the annotated text.
std::optional<FeedbackLine> status_line(const AssertionRecord& record, std::string_view file_name, int line);
FeedbackLine missing_line(const PredKey& key, int anchor_line);

/// Strips old machine lines and inserts one line after each finding.
SourceFile annotate_file(const SourceFile& file, const CheckReport& report);

}  // namespace lpwb
