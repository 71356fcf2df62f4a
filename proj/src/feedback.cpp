#include "lpwb/feedback.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace lpwb {

std::string_view status_name(Status s) {
    switch (s) {
    case Status::Ok: return "OK";
    case Status::RefMismatchNeg: return "REF_MISMATCH_NEG";
    case Status::RefMismatchPos: return "REF_MISMATCH_POS";
    case Status::CodeUnexpectedFailure: return "CODE_UNEXPECTED_FAILURE";
    case Status::CodeUnexpectedSuccess: return "CODE_UNEXPECTED_SUCCESS";
    case Status::WrongFirstAnswer: return "WRONG_FIRST_ANSWER";
    case Status::Nontermination: return "NONTERMINATION";
    case Status::FairUnexpectedSuccess: return "FAIR_UNEXPECTED_SUCCESS";
    case Status::FairUnexpectedFailure: return "FAIR_UNEXPECTED_FAILURE";
    case Status::Inconclusive: return "INCONCLUSIVE";
    case Status::DefMissing: return "DEF_MISSING";
    }
    return "OK";
}

std::string_view code_outcome_name(CodeOutcome c) {
    switch (c) {
    case CodeOutcome::NotRun: return "not_run";
    case CodeOutcome::Success: return "success";
    case CodeOutcome::Failure: return "failure";
    case CodeOutcome::Budget: return "budget";
    case CodeOutcome::Loop: return "loop";
    case CodeOutcome::Terminates: return "terminates";
    case CodeOutcome::Error: return "error";
    }
    return "not_run";
}

bool CheckReport::has_findings() const {
    return !missing.empty() ||
           std::any_of(records.begin(), records.end(), [](const AssertionRecord& r) { return r.status != Status::Ok; });
}

namespace {

constexpr EngineOptions kUserOptions{};

bool ends_in_false(std::span<const Term> goals) { return !goals.empty() && goals.back().is_atom("false"); }

std::vector<Term> ground_all(std::span<const Term> goals) {
    const Term wrapped = Term::compound("$goals", std::vector<Term>(goals.begin(), goals.end()));
    const Term g = ground_with_any(wrapped).goal;
    return std::vector<Term>(g.args().begin(), g.args().end());
}

std::string render_witness(std::span<const Term> goals, const Answer& answer) {
    std::vector<Term> eqs;
    for (const Term& v : term_variables(goals)) {
        if (!v.name().empty() && v.name() != "_") {
            eqs.push_back(Term::compound("=", {v, answer.subst.apply(v)}));
        }
    }
    return render_conjunction(eqs);
}

void inconclusive(AssertionRecord& r, std::string reason) {
    r.status = Status::Inconclusive;
    r.reason = std::move(reason);
}

// The first answer must not be refuted by the reference once grounded.
void verify_answer(AssertionRecord& r, const Answer& answer, const ReferenceRegistry& registry,
                   const Budget& budget) {
    const std::vector<Term>& goals = r.assertion.goals;
    r.first_answer = answer;
    const std::vector<Term> instance = ground_all(answer.subst.apply(goals));
    if (reference_verdict(registry, instance, budget).is_false()) {
        r.status = Status::WrongFirstAnswer;
        r.witness = render_witness(goals, answer);
    }
}

void check_pos(AssertionRecord& r, const Program& program, const ReferenceRegistry& registry, const Budget& budget) {
    const std::vector<Term>& goals = r.assertion.goals;
    Outcome o = solve_dfs(program, goals, budget, Want::First, kUserOptions);
    if (std::holds_alternative<BudgetExhausted>(o)) {
        o = solve_fair(program, goals, budget, kUserOptions);
    }
    if (const auto* s = std::get_if<Solutions>(&o); s && !s->answers.empty()) {
        r.code = CodeOutcome::Success;
        verify_answer(r, s->answers.front(), registry, budget);
    } else if (std::holds_alternative<FiniteFailure>(o) || std::holds_alternative<Solutions>(o)) {
        r.code = CodeOutcome::Failure;
        r.status = Status::CodeUnexpectedFailure;
    } else {
        r.code = CodeOutcome::Budget;
        inconclusive(r, "budget");
    }
}

void check_neg(AssertionRecord& r, const Program& program, const Budget& budget) {
    const std::vector<Term>& goals = r.assertion.goals;
    Outcome o = solve_dfs(program, goals, budget, Want::First, kUserOptions);
    if (const auto* s = std::get_if<Solutions>(&o); s && !s->answers.empty()) {
        r.code = CodeOutcome::Success;
        r.status = Status::CodeUnexpectedSuccess;
        r.first_answer = s->answers.front();
        return;
    }
    if (!std::holds_alternative<BudgetExhausted>(o)) {
        r.code = CodeOutcome::Terminates;
        return;
    }
    TerminationResult t = check_universal_termination(program, goals, budget, kUserOptions);
    if (t.kind == TerminationResult::Kind::NonTerminating) {
        r.code = CodeOutcome::Loop;
        r.status = Status::Nontermination;
    } else {
        r.code = CodeOutcome::Budget;
        inconclusive(r, "budget");
    }
}

void check_pos_fair(AssertionRecord& r, const Program& program, const Budget& budget) {
    const std::vector<Term>& goals = r.assertion.goals;
    Outcome o = solve_fair(program, goals, budget, kUserOptions);
    if (const auto* s = std::get_if<Solutions>(&o); s && !s->answers.empty()) {
        r.code = CodeOutcome::Success;
        r.first_answer = s->answers.front();
        return;
    }
    if (std::holds_alternative<FiniteFailure>(o)) {
        r.code = CodeOutcome::Failure;
        r.status = Status::FairUnexpectedFailure;
        return;
    }
    LoopCheckResult l = prove_failure_loopcheck(program, goals, budget, kUserOptions);
    switch (l.kind) {
    case LoopCheckResult::Kind::Proven:
        r.code = CodeOutcome::Failure;
        r.status = Status::FairUnexpectedFailure;
        break;
    case LoopCheckResult::Kind::Disproven:
        r.code = CodeOutcome::Success;
        r.first_answer = l.witness;
        break;
    case LoopCheckResult::Kind::Unknown:
        r.code = CodeOutcome::Budget;
        inconclusive(r, "budget");
        break;
    }
}

void check_neg_fair(AssertionRecord& r, const Program& program, const Budget& budget) {
    const std::vector<Term>& goals = r.assertion.goals;
    if (ends_in_false(goals)) {
        // the assertion claims universal non-termination
        const std::span<const Term> body(goals.data(), goals.size() - 1);
        TerminationResult t = check_universal_termination(program, body, budget, kUserOptions);
        switch (t.kind) {
        case TerminationResult::Kind::NonTerminating: r.code = CodeOutcome::Loop; break;
        case TerminationResult::Kind::Terminates:
            r.code = CodeOutcome::Terminates;
            r.status = Status::CodeUnexpectedSuccess;
            break;
        case TerminationResult::Kind::Unknown:
            r.code = CodeOutcome::Budget;
            inconclusive(r, "budget");
            break;
        }
        return;
    }
    LoopCheckResult l = prove_failure_loopcheck(program, goals, budget, kUserOptions);
    switch (l.kind) {
    case LoopCheckResult::Kind::Proven: r.code = CodeOutcome::Failure; break;
    case LoopCheckResult::Kind::Disproven:
        r.code = CodeOutcome::Success;
        r.status = Status::FairUnexpectedSuccess;
        r.first_answer = l.witness;
        if (l.witness) {
            r.witness = render_witness(goals, *l.witness);
        }
        break;
    case LoopCheckResult::Kind::Unknown:
        r.code = CodeOutcome::Budget;
        inconclusive(r, "budget");
        break;
    }
}

enum class Coverage { NoUserCode, Missing, Defined };

Coverage coverage(std::span<const Term> goals, const Program& program) {
    bool user = false;
    for (const Term& g : goals) {
        if (!g.is_callable()) {
            continue;
        }
        const PredKey key = pred_key(g);
        if (is_builtin(key)) {
            continue;
        }
        if (!program.defines(key)) {
            return Coverage::Missing;
        }
        user = true;
    }
    return user ? Coverage::Defined : Coverage::NoUserCode;
}

std::vector<PredKey> missing_predicates(std::span<const Term> goals, const Program& program) {
    std::vector<PredKey> out;
    for (const Term& g : goals) {
        if (!g.is_callable()) {
            continue;
        }
        PredKey key = pred_key(g);
        if (!is_builtin(key) && !program.defines(key) && std::find(out.begin(), out.end(), key) == out.end()) {
            out.push_back(std::move(key));
        }
    }
    return out;
}

CheckReport assemble(const SourceFile& file, const Program& program, std::vector<AssertionRecord> records) {
    CheckReport report;
    report.file = file.name;
    std::vector<PredKey> order;
    std::map<PredKey, std::size_t> last;
    for (std::size_t i = 0; i < records.size(); ++i) {
        for (PredKey& key : missing_predicates(records[i].assertion.goals, program)) {
            if (!last.contains(key)) {
                order.push_back(key);
            }
            last[std::move(key)] = i;
        }
    }
    for (const PredKey& key : order) {
        report.missing.push_back(MissingDefinition{key, last[key]});
    }
    report.records = std::move(records);
    return report;
}

}  // namespace

AssertionRecord check_assertion(const Assertion& assertion, const Program& program,
                                const ReferenceRegistry& registry, const Budget& budget) {
    AssertionRecord r;
    r.assertion = assertion;
    const std::vector<Term>& goals = assertion.goals;
    const bool termination_claim = assertion.kind == AssertionKind::NegFair && ends_in_false(goals);
    try {
        if (!termination_claim) {
            r.reference = reference_verdict(registry, goals, budget);
            if (!is_negative(assertion.kind) && r.reference.is_false()) {
                r.status = Status::RefMismatchPos;
                return r;
            }
            if (is_negative(assertion.kind) && r.reference.is_true()) {
                r.status = Status::RefMismatchNeg;
                return r;
            }
        }
        if (coverage(goals, program) != Coverage::Defined) {
            return r;
        }
        switch (assertion.kind) {
        case AssertionKind::Pos: check_pos(r, program, registry, budget); break;
        case AssertionKind::Neg: check_neg(r, program, budget); break;
        case AssertionKind::PosFair: check_pos_fair(r, program, budget); break;
        case AssertionKind::NegFair: check_neg_fair(r, program, budget); break;
        }
    } catch (const std::exception& e) {
        r.code = CodeOutcome::Error;
        inconclusive(r, e.what());
    }
    return r;
}

CheckReport check_file_serial(const SourceFile& file, const ReferenceRegistry& registry, const Budget& budget) {
    const Program program = file.program();
    std::vector<AssertionRecord> records;
    for (const Assertion* a : file.assertions()) {
        records.push_back(check_assertion(*a, program, registry, budget));
    }
    return assemble(file, program, std::move(records));
}

CheckReport check_file(const SourceFile& file, const ReferenceRegistry& registry, const Budget& budget) {
    const Program program = file.program();
    const std::vector<const Assertion*> assertions = file.assertions();
    std::vector<AssertionRecord> records(assertions.size());
    const auto n = static_cast<std::ptrdiff_t>(assertions.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        records[static_cast<std::size_t>(i)] =
            check_assertion(*assertions[static_cast<std::size_t>(i)], program, registry, budget);
    }
    return assemble(file, program, std::move(records));
}

std::optional<FeedbackLine> status_line(const AssertionRecord& record, std::string_view file_name, int line) {
    const std::string at = std::string(file_name) + ":" + std::to_string(line);
    auto make = [&](Severity tag, std::string text) { return FeedbackLine{tag, std::move(text), line}; };
    switch (record.status) {
    case Status::Ok:
    case Status::DefMissing: return std::nullopt;
    case Status::RefMismatchPos:
        return make(Severity::RefMismatch, "!= should be negative — details: explain " + at);
    case Status::RefMismatchNeg:
        return make(Severity::RefMismatch, "!= should be positive — details: explain " + at);
    case Status::CodeUnexpectedFailure:
        return make(Severity::CodeFail, "! unexpected failure — details: slice " + at);
    case Status::CodeUnexpectedSuccess: return make(Severity::CodeFail, "! unexpected success");
    case Status::WrongFirstAnswer:
        return make(Severity::CodeWrongAnswer, "!= first solution is incorrect — details: slice " + at);
    case Status::Nontermination:
        return make(Severity::Nontermination, "! universal non-termination — details: slice " + at);
    case Status::FairUnexpectedSuccess: return make(Severity::FairMismatch, "!++ unexpected success under fair search");
    case Status::FairUnexpectedFailure: return make(Severity::FairMismatch, "!++ unexpected failure under fair search");
    case Status::Inconclusive: return make(Severity::Inconclusive, "? inconclusive (" + record.reason + ")");
    }
    return std::nullopt;
}

FeedbackLine missing_line(const PredKey& key, int anchor_line) {
    return FeedbackLine{Severity::DefMissing, "!def " + key.str() + " missing", anchor_line};
}

SourceFile annotate_file(const SourceFile& file, const CheckReport& report) {
    const SourceFile clean = strip_machine_lines(file);
    const std::vector<const Assertion*> assertions = clean.assertions();
    if (assertions.size() != report.records.size()) {
        throw std::invalid_argument("report does not belong to " + file.name);
    }
    // assertion index by its last line
    std::map<int, std::size_t> ending;
    for (std::size_t i = 0; i < assertions.size(); ++i) {
        ending[assertions[i]->last_line] = i;
    }
    std::vector<std::string> out;
    std::map<int, int> moved;  // clean line -> annotated line
    for (std::size_t i = 0; i < clean.lines.size(); ++i) {
        const int line = static_cast<int>(i) + 1;
        out.push_back(clean.lines[i]);
        moved[line] = static_cast<int>(out.size());
        auto it = ending.find(line);
        if (it == ending.end()) {
            continue;
        }
        const std::size_t k = it->second;
        const int at = moved[assertions[k]->source_line];
        if (auto l = status_line(report.records[k], file.name, at)) {
            out.push_back(l->render());
        }
        for (const MissingDefinition& m : report.missing) {
            if (m.after_record == k) {
                out.push_back(missing_line(m.predicate, at).render());
            }
        }
    }
    std::string text;
    for (std::size_t i = 0; i < out.size(); ++i) {
        text += out[i];
        if (i + 1 < out.size() || clean.trailing_newline) {
            text += '\n';
        }
    }
    return parse_file(text, file.name);
}

}  // namespace lpwb
