#include "lpwb/feedback.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace lpwb {
namespace {

const Budget kBudget{100000, 64, 50000};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SourceFile load(const std::string& name) {
    return parse_file(slurp(std::filesystem::path(LPWB_TEST_DATA) / name), name);
}

std::vector<std::string> data_files() {
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(LPWB_TEST_DATA)) {
        if (e.path().extension() == ".pl") {
            out.push_back(e.path().filename().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Status> statuses(const CheckReport& r) {
    std::vector<Status> out;
    for (const AssertionRecord& a : r.records) {
        out.push_back(a.status);
    }
    return out;
}

std::vector<std::string> user_lines(const SourceFile& f) {
    std::vector<std::string> out;
    for (const std::string& l : f.lines) {
        if (!is_machine_line(l)) {
            out.push_back(l);
        }
    }
    return out;
}

// Everything the report exposes, as text.
std::string fingerprint(const CheckReport& r) {
    std::string out;
    for (const AssertionRecord& a : r.records) {
        out += std::string(status_name(a.status)) + "|" + std::string(code_outcome_name(a.code)) + "|" +
               std::string(verdict_name(a.reference.kind)) + "|" + a.reason + "|" + a.witness + "\n";
    }
    for (const MissingDefinition& m : r.missing) {
        out += m.predicate.str() + "@" + std::to_string(m.after_record) + "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("spec-only file against the reference", "[feedback]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    const SourceFile f = load("alldiff.pl");
    const CheckReport r = check_file(f, reg, kBudget);
    REQUIRE(statuses(r) == std::vector<Status>{Status::Ok, Status::Ok, Status::RefMismatchPos, Status::RefMismatchNeg});
    REQUIRE(r.missing.size() == 1);
    REQUIRE(r.missing[0].predicate == PredKey{"alldifferent", 1});
    REQUIRE(r.has_findings());
    REQUIRE(annotate_file(f, r).text() == slurp(std::filesystem::path(LPWB_TEST_DATA) / "golden/alldiff.annotated.pl"));
}

TEST_CASE("code checking on the swapped-argument program", "[feedback]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    const SourceFile f = load("buggy.pl");
    const CheckReport r = check_file(f, reg, kBudget);
    REQUIRE(statuses(r) == std::vector<Status>{Status::CodeUnexpectedFailure, Status::WrongFirstAnswer,
                                               Status::Nontermination});
    REQUIRE(r.records[1].witness == "Xs = [[],[]]");
    REQUIRE(r.missing.empty());
    REQUIRE(annotate_file(f, r).text() == slurp(std::filesystem::path(LPWB_TEST_DATA) / "golden/buggy.annotated.pl"));
}

TEST_CASE("correct program passes", "[feedback]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    const SourceFile f = load("correct.pl");
    const CheckReport r = check_file(f, reg, kBudget);
    REQUIRE_FALSE(r.has_findings());
    REQUIRE(r.records[1].code == CodeOutcome::Loop);
    REQUIRE(r.records[3].code == CodeOutcome::Terminates);
    REQUIRE(annotate_file(f, r).text() == f.text());
}

TEST_CASE("fair search assertions", "[feedback]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    const CheckReport nat = check_file(load("nat.pl"), reg, kBudget);
    REQUIRE(statuses(nat) == std::vector<Status>{Status::FairUnexpectedSuccess});
    REQUIRE(nat.records[0].witness == "N = 0");
    const CheckReport q = check_file(load("loop.pl"), reg, kBudget);
    REQUIRE(statuses(q) == std::vector<Status>{Status::FairUnexpectedFailure});
    const std::vector<Term> goal{Term::atom("q")};
    REQUIRE(prove_failure_loopcheck(load("loop.pl").program(), goal, kBudget).kind ==
            LoopCheckResult::Kind::Proven);
}

TEST_CASE("constraint-rule references falsify", "[feedback]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    const CheckReport r = check_file(load("family.pl"), reg, kBudget);
    REQUIRE(statuses(r) == std::vector<Status>{Status::RefMismatchPos, Status::RefMismatchPos});
    REQUIRE(r.missing.size() == 2);
    REQUIRE(r.missing[0].predicate == PredKey{"child_of", 2});
}

TEST_CASE("message texts", "[feedback]") {
    AssertionRecord r;
    auto text = [&](Status s) {
        r.status = s;
        auto l = status_line(r, "f.pl", 7);
        return l ? l->render() : std::string();
    };
    REQUIRE(text(Status::Ok).empty());
    REQUIRE(text(Status::RefMismatchPos) == "%@ != should be negative — details: explain f.pl:7");
    REQUIRE(text(Status::RefMismatchNeg) == "%@ != should be positive — details: explain f.pl:7");
    REQUIRE(text(Status::CodeUnexpectedFailure) == "%@ ! unexpected failure — details: slice f.pl:7");
    REQUIRE(text(Status::CodeUnexpectedSuccess) == "%@ ! unexpected success");
    REQUIRE(text(Status::WrongFirstAnswer) == "%@ != first solution is incorrect — details: slice f.pl:7");
    REQUIRE(text(Status::Nontermination) == "%@ ! universal non-termination — details: slice f.pl:7");
    REQUIRE(text(Status::FairUnexpectedSuccess) == "%@ !++ unexpected success under fair search");
    REQUIRE(text(Status::FairUnexpectedFailure) == "%@ !++ unexpected failure under fair search");
    r.reason = "budget";
    REQUIRE(text(Status::Inconclusive) == "%@ ? inconclusive (budget)");
    REQUIRE(missing_line(PredKey{"p", 2}, 1).render() == "%@ !def p/2 missing");
}

TEST_CASE("unexpected success and stale lines", "[feedback]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    const SourceFile f = parse_file("p(a).\n%@ ! unexpected failure\n</- p(X).\n%@ old\n%@ older\n<- p(a).", "s.pl");
    const CheckReport r = check_file(f, reg, kBudget);
    REQUIRE(statuses(r) == std::vector<Status>{Status::CodeUnexpectedSuccess, Status::Ok});
    REQUIRE(annotate_file(f, r).text() == "p(a).\n</- p(X).\n%@ ! unexpected success\n<- p(a).");
}

TEST_CASE("engine errors become inconclusive", "[feedback]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    const SourceFile f = parse_file("p(X) :- q(X).\n<- p(a).\n", "e.pl");
    const CheckReport r = check_file(f, reg, kBudget);
    REQUIRE(r.records[0].status == Status::Inconclusive);
    REQUIRE(r.records[0].reason == "unknown predicate q/1");
    REQUIRE(annotate_file(f, r).text() == "p(X) :- q(X).\n<- p(a).\n%@ ? inconclusive (unknown predicate q/1)\n");
}

TEST_CASE("parallel and serial checks agree", "[feedback][property]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    for (const std::string& name : data_files()) {
        INFO(name);
        const SourceFile f = load(name);
        const std::string serial = fingerprint(check_file_serial(f, reg, kBudget));
        REQUIRE(fingerprint(check_file(f, reg, kBudget)) == serial);
        REQUIRE(fingerprint(check_file(f, reg, kBudget)) == serial);
    }
}

TEST_CASE("annotation properties over the data corpus", "[feedback][property]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    for (const std::string& name : data_files()) {
        INFO(name);
        const SourceFile f = load(name);
        const CheckReport r = check_file(f, reg, kBudget);
        const SourceFile once = annotate_file(f, r);
        // user-authored lines are untouched
        REQUIRE(user_lines(once) == user_lines(f));
        // idempotent, also when re-checking the annotated text
        REQUIRE(annotate_file(strip_machine_lines(once), r).text() == once.text());
        REQUIRE(annotate_file(once, check_file(once, reg, kBudget)).text() == once.text());
        // one line per non-OK assertion plus one per missing definition
        std::size_t expected = r.missing.size();
        for (const AssertionRecord& a : r.records) {
            expected += a.status != Status::Ok;
            // reference messages need a decisive verdict
            if (a.status == Status::RefMismatchPos) {
                REQUIRE(a.reference.is_false());
            }
            if (a.status == Status::RefMismatchNeg) {
                REQUIRE(a.reference.is_true());
            }
        }
        REQUIRE(once.lines.size() - user_lines(once).size() == expected);
    }
}

TEST_CASE("no reference message without a decisive verdict", "[feedback][property]") {
    const ReferenceRegistry reg = ReferenceRegistry::builtin();
    std::mt19937 rng(3);
    const char* const elems[] = {"a", "b", "X", "Y", "_"};
    const char* const kinds[] = {"<-", "</-"};
    std::string text;
    for (int i = 0; i < 60; ++i) {
        std::string list = "[";
        const int n = static_cast<int>(rng() % 4);
        for (int k = 0; k < n; ++k) {
            list += std::string(k ? "," : "") + elems[rng() % 5];
        }
        list += n > 0 && rng() % 3 == 0 ? "|_]" : "]";
        switch (rng() % 3) {
        case 0: text += std::string(kinds[rng() % 2]) + " alldifferent(" + list + ").\n"; break;
        case 1: text += std::string(kinds[rng() % 2]) + " nonmember_of(" + elems[rng() % 5] + ", " + list + ").\n"; break;
        default: text += std::string(kinds[rng() % 2]) + " child_of(X, Y), child_of(Y, X).\n"; break;
        }
    }
    const SourceFile f = parse_file(text, "gen.pl");
    const CheckReport r = check_file(f, reg, kBudget);
    REQUIRE(fingerprint(r) == fingerprint(check_file_serial(f, reg, kBudget)));
    for (const AssertionRecord& a : r.records) {
        INFO(render_assertion(a.assertion));
        const Verdict v = reference_verdict(reg, a.assertion.goals, kBudget);
        const bool neg = is_negative(a.assertion.kind);
        const bool mismatch = neg ? v.is_true() : v.is_false();
        REQUIRE((a.status == Status::RefMismatchNeg || a.status == Status::RefMismatchPos) == mismatch);
    }
}

}  // namespace lpwb
