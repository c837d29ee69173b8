#pragma once

#include <string_view>

#include "depwatch/error.hpp"
#include "depwatch/propagate.hpp"

namespace depwatch {

/// What to do about a library reported as suspicious.
enum class Action : std::uint8_t { IgnoreWarnings, Replacement, ContinueDevelopment };

inline std::string_view action_name(Action a) {
    switch (a) {
    case Action::IgnoreWarnings: return "ignore_warnings";
    case Action::Replacement: return "replacement";
    case Action::ContinueDevelopment: return "continue_development";
    }
    return "ignore_warnings";
}

/// Per-library context the tool cannot infer.
struct LibraryContext {
    bool security_relevant = true;
    bool alternatives_exist = false;

    bool operator==(const LibraryContext&) const = default;
};

/// Security-irrelevant libraries can have their warnings ignored. Relevant ones are replaced
/// when alternatives exist and otherwise developed further (in a fork or upstream);
/// `prefer_continue_over_replace` picks continued development even when alternatives exist.
inline Action recommend_action(const LibraryContext& context, bool prefer_continue_over_replace = false) {
    if (!context.security_relevant) return Action::IgnoreWarnings;
    if (context.alternatives_exist && !prefer_continue_over_replace) return Action::Replacement;
    return Action::ContinueDevelopment;
}

inline Action recommend_action(const SuspicionVerdict& verdict, const LibraryContext& context,
                               bool prefer_continue_over_replace = false) {
    if (verdict.verdict != Verdict::Suspicious) {
        throw ValidationError("actions are only recommended for suspicious libraries (" + verdict.node.str() + ")");
    }
    return recommend_action(context, prefer_continue_over_replace);
}

} // namespace depwatch
