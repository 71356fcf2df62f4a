#include "lpwb/marking.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace lpwb {

namespace {

struct KindName {
    ItemKind kind;
    std::string_view name;
};

constexpr KindName kKinds[] = {
    {ItemKind::PosGround, "POS_GROUND"}, {ItemKind::PosMostGeneral, "POS_MOST_GENERAL"},
    {ItemKind::Neg, "NEG"},              {ItemKind::Nonterm, "NONTERM"},
    {ItemKind::Term, "TERM"},            {ItemKind::Defined, "DEFINED"},
    {ItemKind::AllPass, "ALL_PASS"},
};

std::optional<int> to_int(std::string_view s) {
    int v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::optional<PredKey> parse_indicator(std::string_view s) {
    const auto slash = s.rfind('/');
    if (slash == std::string_view::npos || slash == 0) {
        return std::nullopt;
    }
    const std::optional<int> arity = to_int(s.substr(slash + 1));
    if (!arity || *arity < 0) {
        return std::nullopt;
    }
    return PredKey{std::string(s.substr(0, slash)), static_cast<std::size_t>(*arity)};
}

bool mentions(const Assertion& a, const PredKey& key) {
    return std::any_of(a.goals.begin(), a.goals.end(),
                       [&](const Term& g) { return g.is_callable() && pred_key(g) == key; });
}

bool most_general(const Assertion& a, const PredKey& key) {
    if (a.goals.size() != 1 || !a.goals[0].is_callable() || pred_key(a.goals[0]) != key) {
        return false;
    }
    const Term& g = a.goals[0];
    std::vector<VarId> seen;
    for (const Term& arg : g.args()) {
        if (!arg.is_var() || std::find(seen.begin(), seen.end(), arg.var_id()) != seen.end()) {
            return false;
        }
        seen.push_back(arg.var_id());
    }
    return true;
}

bool ends_in_false(const Assertion& a) { return !a.goals.empty() && a.goals.back().is_atom("false"); }

bool failing(Status s) { return s != Status::Ok && s != Status::Inconclusive; }

// State of one assertion for an item that needs the given reference verdict
// and, optionally, a confirmed code outcome.
ItemState judge(const AssertionRecord& r, std::optional<Verdict::Kind> reference, std::optional<CodeOutcome> code) {
    if (failing(r.status)) {
        return ItemState::Violated;
    }
    if (r.status == Status::Inconclusive) {
        return ItemState::Inconclusive;
    }
    if (reference && r.reference.kind != *reference) {
        return r.reference.is_unspecified() ? ItemState::Inconclusive : ItemState::Violated;
    }
    if (code && r.code != *code) {
        return ItemState::Inconclusive;
    }
    return ItemState::Satisfied;
}

// Best state over all matching assertions.
ItemState best(const std::vector<ItemState>& states) {
    if (states.empty()) {
        return ItemState::Absent;
    }
    for (ItemState s : {ItemState::Satisfied, ItemState::Inconclusive}) {
        if (std::find(states.begin(), states.end(), s) != states.end()) {
            return s;
        }
    }
    return ItemState::Violated;
}

ItemState classify(const ManifestItem& item, const SourceFile& file, const CheckReport& report) {
    if (item.kind == ItemKind::AllPass) {
        if (report.records.empty()) {
            return ItemState::Absent;
        }
        if (!report.missing.empty() ||
            std::any_of(report.records.begin(), report.records.end(), [](auto& r) { return failing(r.status); })) {
            return ItemState::Violated;
        }
        const bool unsure = std::any_of(report.records.begin(), report.records.end(),
                                        [](auto& r) { return r.status == Status::Inconclusive; });
        return unsure ? ItemState::Inconclusive : ItemState::Satisfied;
    }
    const PredKey& key = *item.target;
    if (item.kind == ItemKind::Defined) {
        return file.program().defines(key) ? ItemState::Satisfied : ItemState::Absent;
    }
    std::vector<ItemState> states;
    for (const AssertionRecord& r : report.records) {
        const Assertion& a = r.assertion;
        if (!mentions(a, key)) {
            continue;
        }
        using K = Verdict::Kind;
        switch (item.kind) {
        case ItemKind::PosGround:
            if (a.kind == AssertionKind::Pos &&
                std::all_of(a.goals.begin(), a.goals.end(), [](const Term& g) { return is_ground(g); })) {
                states.push_back(judge(r, K::True, std::nullopt));
            }
            break;
        case ItemKind::PosMostGeneral:
            if (a.kind == AssertionKind::Pos && most_general(a, key)) {
                states.push_back(judge(r, K::True, std::nullopt));
            }
            break;
        case ItemKind::Neg:
            if (a.kind == AssertionKind::Neg && !ends_in_false(a)) {
                states.push_back(judge(r, K::False, std::nullopt));
            }
            break;
        case ItemKind::Nonterm:
            if (a.kind == AssertionKind::NegFair && ends_in_false(a)) {
                states.push_back(judge(r, std::nullopt, CodeOutcome::Loop));
            }
            break;
        case ItemKind::Term:
            if (a.kind == AssertionKind::Neg && ends_in_false(a)) {
                states.push_back(judge(r, std::nullopt, CodeOutcome::Terminates));
            }
            break;
        case ItemKind::Defined:
        case ItemKind::AllPass: break;
        }
    }
    return best(states);
}

}  // namespace

std::string_view item_kind_name(ItemKind k) {
    for (const KindName& n : kKinds) {
        if (n.kind == k) {
            return n.name;
        }
    }
    return "";
}

std::optional<ItemKind> parse_item_kind(std::string_view s) {
    for (const KindName& n : kKinds) {
        if (n.name == s) {
            return n.kind;
        }
    }
    return std::nullopt;
}

std::string_view item_state_name(ItemState s) {
    switch (s) {
    case ItemState::Satisfied: return "SATISFIED";
    case ItemState::Violated: return "VIOLATED";
    case ItemState::Inconclusive: return "INCONCLUSIVE";
    case ItemState::Absent: return "ABSENT";
    }
    return "ABSENT";
}

ExerciseManifest parse_manifest(std::string_view text) {
    ExerciseManifest m;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string_view l = trim(raw);
        if (l.empty() || l.front() == '#') {
            continue;
        }
        if (l.starts_with("name:")) {
            m.name = std::string(trim(l.substr(5)));
            continue;
        }
        std::istringstream words{std::string(l)};
        std::string word, kind, target, weight, extra;
        words >> word >> kind;
        if (word != "item") {
            throw ManifestError(line, "expected 'item' or 'name:'");
        }
        ManifestItem item;
        const std::optional<ItemKind> k = parse_item_kind(kind);
        if (!k) {
            throw ManifestError(line, "unknown item kind '" + kind + "'");
        }
        item.kind = *k;
        if (words >> target) {
            if (const std::optional<int> w = to_int(target); w && item.kind == ItemKind::AllPass) {
                item.weight = *w;
            } else {
                item.target = parse_indicator(target);
                if (!item.target) {
                    throw ManifestError(line, "expected name/arity, got '" + target + "'");
                }
                if (words >> weight) {
                    const std::optional<int> w = to_int(weight);
                    if (!w) {
                        throw ManifestError(line, "bad weight '" + weight + "'");
                    }
                    item.weight = *w;
                }
            }
        }
        if (words >> extra) {
            throw ManifestError(line, "trailing text '" + extra + "'");
        }
        if (item.weight < 1) {
            throw ManifestError(line, "weight must be positive");
        }
        if (!item.target && item.kind != ItemKind::AllPass) {
            throw ManifestError(line, "missing target predicate");
        }
        m.items.push_back(std::move(item));
    }
    if (m.items.empty()) {
        throw ManifestError(line, "no items");
    }
    return m;
}

std::size_t MarkInterval::count(ItemState s) const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(), [&](const ItemResult& r) { return r.state == s; }));
}

std::string MarkInterval::summary() const {
    return std::to_string(low_percent) + "–" + std::to_string(high_percent) + "% (" +
           std::to_string(count(ItemState::Satisfied)) + "/" + std::to_string(items.size()) + " satisfied)";
}

MarkInterval mark_interval(std::vector<ItemResult> items) {
    long total = 0;
    long sure = 0;
    long maybe = 0;
    for (const ItemResult& r : items) {
        total += r.item.weight;
        if (r.state == ItemState::Satisfied) {
            sure += r.item.weight;
        } else if (r.state == ItemState::Inconclusive) {
            maybe += r.item.weight;
        }
    }
    MarkInterval m;
    if (total > 0) {
        m.low_percent = static_cast<int>(100 * sure / total);
        // rounded down like low, so that low == high iff nothing is open
        m.high_percent = static_cast<int>(100 * (sure + maybe) / total);
    }
    m.items = std::move(items);
    return m;
}

MarkInterval mark_exercise(const SourceFile& file, const CheckReport& report, const ExerciseManifest& manifest) {
    std::vector<ItemResult> items;
    for (const ManifestItem& item : manifest.items) {
        items.push_back(ItemResult{item, classify(item, file, report)});
    }
    return mark_interval(std::move(items));
}

}  // namespace lpwb
