#pragma once

#include "lpwb/feedback.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lpwb {

enum class ItemKind { PosGround, PosMostGeneral, Neg, Nonterm, Term, Defined, AllPass };

std::string_view item_kind_name(ItemKind k);
std::optional<ItemKind> parse_item_kind(std::string_view s);

struct ManifestItem {
    ItemKind kind = ItemKind::Defined;
    /// Absent only for ALL_PASS.
    std::optional<PredKey> target;
    int weight = 1;
};

struct ExerciseManifest {
    std::string name;
    std::vector<ManifestItem> items;
};

class ManifestError : public std::runtime_error {
public:
    ManifestError(int line, const std::string& message)
        : std::runtime_error("manifest line " + std::to_string(line) + ": " + message) {}
};

/// "name: <exercise>" then one "item <KIND> <functor>/<arity> [weight]" per line;
/// blank lines and lines starting with '#' are skipped.
ExerciseManifest parse_manifest(std::string_view text);

enum class ItemState { Satisfied, Violated, Inconclusive, Absent };
std::string_view item_state_name(ItemState s);

struct ItemResult {
    ManifestItem item;
    ItemState state = ItemState::Absent;
};

struct MarkInterval {
    int low_percent = 0;
    int high_percent = 0;
    std::vector<ItemResult> items;

    std::size_t count(ItemState s) const;
    /// "60–80% (3/5 satisfied)"
    std::string summary() const;
};

/// Interval from weights: low counts satisfied items, high also inconclusive
/// ones. Both are rounded down.
MarkInterval mark_interval(std::vector<ItemResult> items);

MarkInterval mark_exercise(const SourceFile& file, const CheckReport& report, const ExerciseManifest& manifest);

}  // namespace lpwb
