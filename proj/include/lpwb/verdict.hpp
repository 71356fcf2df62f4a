#pragma once

#include "lpwb/engine.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace lpwb {

/// Three-valued outcome of running a reference on a conjunction.
struct Verdict {
    enum class Kind { True, False, Unspecified };
    enum class Reason { None, Budget, Pending, UnknownPredicate };

    Kind kind = Kind::Unspecified;
    Reason reason = Reason::None;
    std::optional<Answer> answer;  // set for True; no hard disequations
    std::string detail;

    static Verdict yes(Answer a) { return Verdict{Kind::True, Reason::None, std::move(a), {}}; }
    static Verdict no() { return Verdict{Kind::False, Reason::None, std::nullopt, {}}; }
    static Verdict unspecified(Reason r, std::string detail = {}) {
        return Verdict{Kind::Unspecified, r, std::nullopt, std::move(detail)};
    }

    bool is_true() const { return kind == Kind::True; }
    bool is_false() const { return kind == Kind::False; }
    bool is_unspecified() const { return kind == Kind::Unspecified; }
};

inline std::string_view verdict_name(Verdict::Kind k) {
    switch (k) {
    case Verdict::Kind::True: return "true";
    case Verdict::Kind::False: return "false";
    case Verdict::Kind::Unspecified: return "unspecified";
    }
    return "unspecified";
}

inline std::string_view reason_name(Verdict::Reason r) {
    switch (r) {
    case Verdict::Reason::None: return "";
    case Verdict::Reason::Budget: return "budget";
    case Verdict::Reason::Pending: return "pending";
    case Verdict::Reason::UnknownPredicate: return "unknown_predicate";
    }
    return "";
}

}  // namespace lpwb
