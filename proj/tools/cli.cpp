#include "cli.hpp"

#include "lpwb/diagnosis.hpp"
#include "lpwb/feedback.hpp"
#include "lpwb/marking.hpp"
#include "lpwb/slicer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lpwb {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kSchemaVersion = "v1";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::int64_t steps = Budget{}.max_steps;
    int fair_depth = Budget{}.max_depth;
    std::int64_t per_depth = Budget{}.per_depth_steps;
    std::string refs;
    bool no_reference = false;
    bool json = false;

    std::string file;
    std::string target;  // FILE:LINE
    bool annotate = false;
    bool in_place = false;
    std::string kind;
    std::string manifest;

    Budget budget() const { return Budget{steps, fair_depth, per_depth}; }
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) {
        throw std::runtime_error("cannot write " + path);
    }
}

SourceFile load(const std::string& path) { return parse_file(read_text(path), path); }

ReferenceRegistry registry(const Options& o) {
    if (o.no_reference) {
        return ReferenceRegistry{};
    }
    ReferenceRegistry reg = ReferenceRegistry::builtin();
    if (!o.refs.empty()) {
        reg.load_directory(o.refs);
    }
    return reg;
}

struct Target {
    SourceFile file;
    const Assertion* assertion = nullptr;
    int line = 0;
};

Target resolve(const std::string& spec) {
    const auto colon = spec.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == spec.size()) {
        throw UsageError("expected FILE:LINE, got '" + spec + "'");
    }
    int line = 0;
    try {
        std::size_t used = 0;
        line = std::stoi(spec.substr(colon + 1), &used);
        if (used != spec.size() - colon - 1) {
            throw std::invalid_argument("trailing text");
        }
    } catch (const std::logic_error&) {
        throw UsageError("bad line number in '" + spec + "'");
    }
    Target t{load(spec.substr(0, colon)), nullptr, line};
    t.assertion = t.file.assertion_at(line);
    if (!t.assertion) {
        throw UsageError(spec + " is not an assertion");
    }
    return t;
}

std::string where(const SourceFile& f, int line) { return f.name + ":" + std::to_string(line); }

std::vector<std::string> rendered(const std::vector<FeedbackLine>& lines) {
    std::vector<std::string> out;
    for (const FeedbackLine& l : lines) {
        out.push_back(l.render());
    }
    return out;
}

// Replaces the machine lines right after `a` with `block`.
std::string insert_after(const SourceFile& f, const Assertion& a, const std::vector<std::string>& block) {
    std::vector<std::string> lines(f.lines.begin(), f.lines.begin() + a.last_line);
    lines.insert(lines.end(), block.begin(), block.end());
    std::size_t rest = static_cast<std::size_t>(a.last_line);
    while (rest < f.lines.size() && is_machine_line(f.lines[rest])) {
        ++rest;
    }
    lines.insert(lines.end(), f.lines.begin() + static_cast<std::ptrdiff_t>(rest), f.lines.end());
    std::string text;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        text += lines[i];
        if (i + 1 < lines.size() || f.trailing_newline) {
            text += '\n';
        }
    }
    return text;
}

// ---------------------------------------------------------------------------
// check

ordered_json record_json(const SourceFile& f, const AssertionRecord& r) {
    ordered_json j;
    j["line"] = r.assertion.source_line;
    j["last_line"] = r.assertion.last_line;
    j["kind"] = assertion_kind_name(r.assertion.kind);
    j["text"] = render_assertion(r.assertion);
    j["status"] = status_name(r.status);
    j["reference"] = {{"verdict", verdict_name(r.reference.kind)}, {"reason", reason_name(r.reference.reason)}};
    j["code"] = code_outcome_name(r.code);
    j["reason"] = r.reason;
    j["witness"] = r.witness;
    auto msg = status_line(r, f.name, r.assertion.source_line);
    j["message"] = msg ? ordered_json(msg->text) : ordered_json(nullptr);
    return j;
}

int cmd_check(const Options& o, std::ostream& out) {
    SourceFile f = load(o.file);
    const CheckReport report = check_file(f, registry(o), o.budget());
    const int code = report.has_findings() ? kExitFindings : kExitOk;
    if (o.annotate) {
        const std::string text = annotate_file(f, report).text();
        if (!o.in_place) {
            out << text;
            return code;
        }
        write_text(o.file, text);
    }
    if (o.json) {
        ordered_json j;
        j["version"] = kSchemaVersion;
        j["command"] = "check";
        j["file"] = f.name;
        j["assertions"] = ordered_json::array();
        for (const AssertionRecord& r : report.records) {
            j["assertions"].push_back(record_json(f, r));
        }
        j["missing"] = ordered_json::array();
        for (const MissingDefinition& m : report.missing) {
            j["missing"].push_back({{"predicate", m.predicate.str()},
                                    {"after_line", report.records[m.after_record].assertion.last_line}});
        }
        j["findings"] = report.has_findings();
        out << j.dump(2) << '\n';
        return code;
    }
    std::size_t findings = 0;
    for (const AssertionRecord& r : report.records) {
        out << where(f, r.assertion.source_line) << ": " << status_name(r.status) << ' '
            << render_assertion(r.assertion) << '\n';
        if (auto msg = status_line(r, f.name, r.assertion.source_line)) {
            out << "    " << msg->text << '\n';
            ++findings;
        }
    }
    for (const MissingDefinition& m : report.missing) {
        out << f.name << ": DEF_MISSING " << m.predicate.str() << '\n';
    }
    out << report.records.size() << " assertions, " << findings << " findings, " << report.missing.size()
        << " missing definitions\n";
    return code;
}

// ---------------------------------------------------------------------------
// explain

int cmd_explain(const Options& o, std::ostream& out) {
    const Target t = resolve(o.target);
    const ReferenceRegistry reg = registry(o);
    const Assertion& a = *t.assertion;
    const Verdict v = reference_verdict(reg, a.goals, o.budget());
    std::optional<Explanation> e;
    if (is_negative(a.kind) && v.is_true()) {
        e = explain_incorrect_negative(a.goals, reg, o.budget(), a.source_line);
    } else if (!is_negative(a.kind) && v.is_false()) {
        e = explain_incorrect_positive(a.goals, reg, o.budget(), a.source_line);
    }
    const std::vector<std::string> lines = e ? rendered(e->lines()) : std::vector<std::string>{};
    const int code = e && !e->stages.empty() ? kExitFindings : kExitOk;

    if (o.annotate && e) {
        const std::string text = insert_after(t.file, a, lines);
        if (!o.in_place) {
            out << text;
            return code;
        }
        write_text(t.file.name, text);
    }
    if (o.json) {
        ordered_json j;
        j["version"] = kSchemaVersion;
        j["command"] = "explain";
        j["file"] = t.file.name;
        j["line"] = a.source_line;
        j["reference"] = {{"verdict", verdict_name(v.kind)}, {"reason", reason_name(v.reason)}};
        j["explanation"] = !e ? "none"
                           : e->kind == Explanation::Kind::SpecializedPositive ? "specialized_positive"
                                                                                : "generalized_negative";
        j["stages"] = ordered_json::array();
        if (e) {
            for (const ExplanationStage& s : e->stages) {
                ordered_json rules = ordered_json::array();
                for (GenRule r : s.rules_used) {
                    rules.push_back(gen_rule_name(r));
                }
                j["stages"].push_back({{"label", s.label}, {"rules", rules}, {"suggestion", s.suggestion()}});
            }
        }
        j["lines"] = lines;
        out << j.dump(2) << '\n';
        return code;
    }
    if (!e) {
        out << "no reference mismatch at " << where(t.file, a.source_line) << " (reference: " << verdict_name(v.kind)
            << ")\n";
        return kExitOk;
    }
    for (const std::string& l : lines) {
        out << l << '\n';
    }
    return code;
}

// ---------------------------------------------------------------------------
// slice

struct SliceResult {
    std::string kind;
    std::string heading;
    std::vector<std::string> notes;
    ProgramFragment fragment;
};

std::optional<std::string> kind_for(Status s) {
    switch (s) {
    case Status::CodeUnexpectedFailure: return "fail";
    case Status::WrongFirstAnswer: return "wrong";
    case Status::Nontermination: return "loop";
    default: return std::nullopt;
    }
}

SliceResult slice_one(const std::string& kind, const Program& program, const Assertion& a,
                      const ReferenceRegistry& reg, const Budget& budget) {
    if (kind == "fail") {
        return SliceResult{kind, "Generalized fragment fails.", {}, slice_insufficiency(program, a.goals, budget)};
    }
    if (kind == "wrong") {
        Outcome o = solve_dfs(program, a.goals, budget, Want::First);
        const auto* s = std::get_if<Solutions>(&o);
        if (!s || s->answers.empty()) {
            throw SliceError("the query has no answer to slice");
        }
        IncorrectnessSlice slice = slice_incorrectness(program, a.goals, s->answers.front().subst, reg, budget);
        return SliceResult{kind, "Specialized fragment succeeds.", rendered(slice.lines(a.source_line)),
                           std::move(slice.fragment)};
    }
    std::vector<Term> goals = a.goals;
    if (!goals.empty() && goals.back().is_atom("false")) {
        goals.pop_back();
    }
    return SliceResult{kind, "Fragment does not terminate.", {}, slice_nontermination(program, goals, budget)};
}

std::string line_text(const Program& program, const LinePart& p) {
    const Clause& c = program.clause(p.clause);
    std::vector<Term> context{c.head};
    context.insert(context.end(), c.body.begin(), c.body.end());
    TermWriter w(context);
    if (p.goal < 0) {
        return w.write(c.head) + (c.body.empty() ? "." : " :-");
    }
    return "    " + w.write(c.body[static_cast<std::size_t>(p.goal)]);
}

ordered_json fragment_json(const SliceResult& r) {
    return {{"kind", r.kind},
            {"heading", r.heading},
            {"notes", r.notes},
            {"fragment", render_fragment(r.fragment)},
            {"inconclusive", r.fragment.inconclusive},
            {"active_lines", active_lines(r.fragment).size()},
            {"total_lines", all_lines(r.fragment.base).size()}};
}

int cmd_slice(const Options& o, std::ostream& out) {
    const Target t = resolve(o.target);
    const ReferenceRegistry reg = registry(o);
    const Program program = t.file.program();
    const Budget budget = o.budget();

    std::vector<SliceResult> slices;
    std::vector<std::string> skipped;
    auto attempt = [&](const std::string& kind, const Assertion& a) {
        try {
            slices.push_back(slice_one(kind, program, a, reg, budget));
        } catch (const SliceError& e) {
            skipped.push_back(where(t.file, a.source_line) + ": " + e.what());
        } catch (const PreconditionError& e) {
            skipped.push_back(where(t.file, a.source_line) + ": " + e.what());
        }
    };

    const bool intersect = o.kind == "intersect";
    if (intersect) {
        for (const Assertion* a : t.file.assertions()) {
            if (auto k = kind_for(check_assertion(*a, program, reg, budget).status)) {
                attempt(*k, *a);
            }
        }
    } else if (!o.kind.empty()) {
        attempt(o.kind, *t.assertion);
    } else {
        const AssertionRecord r = check_assertion(*t.assertion, program, reg, budget);
        if (auto k = kind_for(r.status)) {
            attempt(*k, *t.assertion);
        } else {
            skipped.push_back(where(t.file, t.assertion->source_line) + ": nothing to slice (status " +
                              std::string(status_name(r.status)) + ")");
        }
    }

    std::optional<LineSet> common;
    if (intersect && !slices.empty()) {
        std::vector<ProgramFragment> fragments;
        for (const SliceResult& s : slices) {
            fragments.push_back(s.fragment);
        }
        common = intersect_fragments(fragments);
    }
    const std::size_t total = all_lines(program).size();
    const int code = slices.empty() ? kExitOk : kExitFindings;

    if (o.json) {
        ordered_json j;
        j["version"] = kSchemaVersion;
        j["command"] = "slice";
        j["file"] = t.file.name;
        j["line"] = t.assertion->source_line;
        j["slices"] = ordered_json::array();
        for (const SliceResult& s : slices) {
            j["slices"].push_back(fragment_json(s));
        }
        j["skipped"] = skipped;
        if (common) {
            ordered_json lines = ordered_json::array();
            for (const LinePart& p : *common) {
                lines.push_back({{"clause", p.clause}, {"goal", p.goal}, {"text", line_text(program, p)}});
            }
            j["intersection"] = {{"lines", lines}, {"total_lines", total}};
        } else {
            j["intersection"] = nullptr;
        }
        out << j.dump(2) << '\n';
        return code;
    }
    for (const std::string& s : skipped) {
        out << s << '\n';
    }
    if (common) {
        out << "Intersection: " << common->size() << " of " << total << " lines\n";
        for (const LinePart& p : *common) {
            out << line_text(program, p) << '\n';
        }
        return code;
    }
    for (const SliceResult& s : slices) {
        for (const std::string& n : s.notes) {
            out << n << '\n';
        }
        if (!s.notes.empty()) {
            out << '\n';
        }
        out << s.heading << "\n\n" << render_fragment(s.fragment);
        if (s.fragment.inconclusive) {
            out << "% some trials ran out of budget, the fragment may be larger than needed\n";
        }
    }
    return code;
}

// ---------------------------------------------------------------------------
// mark

int cmd_mark(const Options& o, std::ostream& out) {
    const SourceFile f = load(o.file);
    ExerciseManifest manifest;
    try {
        manifest = parse_manifest(read_text(o.manifest));
    } catch (const ManifestError& e) {
        throw UsageError(o.manifest + ": " + e.what());
    }
    const CheckReport report = check_file(f, registry(o), o.budget());
    const MarkInterval m = mark_exercise(f, report, manifest);
    const int code = m.low_percent == 100 ? kExitOk : kExitFindings;
    auto target = [](const ManifestItem& i) { return i.target ? i.target->str() : std::string("*"); };
    if (o.json) {
        ordered_json j;
        j["version"] = kSchemaVersion;
        j["command"] = "mark";
        j["file"] = f.name;
        j["exercise"] = manifest.name;
        j["low"] = m.low_percent;
        j["high"] = m.high_percent;
        j["satisfied"] = m.count(ItemState::Satisfied);
        j["total"] = m.items.size();
        j["items"] = ordered_json::array();
        for (const ItemResult& r : m.items) {
            j["items"].push_back({{"kind", item_kind_name(r.item.kind)},
                                  {"target", target(r.item)},
                                  {"weight", r.item.weight},
                                  {"state", item_state_name(r.state)}});
        }
        out << j.dump(2) << '\n';
        return code;
    }
    out << m.summary() << '\n';
    for (const ItemResult& r : m.items) {
        std::string kind(item_kind_name(r.item.kind));
        kind.resize(std::max<std::size_t>(kind.size(), 17), ' ');
        std::string tgt = target(r.item);
        tgt.resize(std::max<std::size_t>(tgt.size(), 20), ' ');
        out << "  " << kind << tgt << item_state_name(r.state) << '\n';
    }
    return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Assertion checking, diagnosis and slicing for logic programs", "lpwb"};
    app.require_subcommand(1);
    Options o;
    const CLI::Validator positive(
        [](std::string& v) {
            std::int64_t n = 0;
            const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
            return ec == std::errc{} && end == v.data() + v.size() && n > 0 ? std::string{}
                                                                            : "must be a positive integer";
        },
        "POSITIVE");
    app.add_option("--budget", o.steps, "Resolution steps per search")->check(positive);
    app.add_option("--fair-depth", o.fair_depth, "Iterative deepening limit")->check(positive);
    app.add_option("--per-depth", o.per_depth, "Steps per deepening pass")->check(positive);
    auto* refs = app.add_option("--refs", o.refs, "Directory with extra reference files")->check(CLI::ExistingDirectory);
    app.add_flag("--no-reference", o.no_reference, "Check without any reference")->excludes(refs);
    app.add_flag("--json", o.json, "Machine-readable output");

    auto* check = app.add_subcommand("check", "Check every assertion of a file");
    check->add_option("FILE", o.file)->required();
    auto* check_annotate = check->add_flag("--annotate", o.annotate, "Print the file with feedback lines");
    check->add_flag("--in-place", o.in_place, "Rewrite FILE instead of printing")->needs(check_annotate);

    auto* explain = app.add_subcommand("explain", "Explain an assertion the reference disagrees with");
    explain->add_option("TARGET", o.target, "FILE:LINE of an assertion")->required();
    auto* explain_annotate = explain->add_flag("--annotate", o.annotate, "Insert the suggestions into the file");
    explain->add_flag("--in-place", o.in_place, "Rewrite FILE instead of printing")->needs(explain_annotate);

    auto* slice = app.add_subcommand("slice", "Show the program fragment responsible for a finding");
    slice->add_option("TARGET", o.target, "FILE:LINE of an assertion")->required();
    slice->add_option("--kind", o.kind, "Slicer to run")->check(CLI::IsMember({"fail", "wrong", "loop", "intersect"}));

    auto* mark = app.add_subcommand("mark", "Grade a file against an exercise manifest");
    mark->add_option("FILE", o.file)->required();
    mark->add_option("--manifest", o.manifest, "Exercise manifest")->required();

    for (CLI::App* sub : {check, explain, slice, mark}) {
        sub->fallthrough();
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "lpwb: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*check) {
            return cmd_check(o, out);
        }
        if (*explain) {
            return cmd_explain(o, out);
        }
        if (*slice) {
            return cmd_slice(o, out);
        }
        return cmd_mark(o, out);
    } catch (const UsageError& e) {
        err << "lpwb: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "lpwb: syntax error at " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "lpwb: internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace lpwb
