#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "depwatch/error.hpp"

namespace depwatch {

inline constexpr std::array<std::string_view, 9> kEcosystems = {
    "cargo", "composer", "gem", "go", "maven", "npm", "nuget", "pypi", "synthetic"};

inline bool is_registered_ecosystem(std::string_view tag) {
    return std::find(kEcosystems.begin(), kEcosystems.end(), tag) != kEcosystems.end();
}

/// A library coordinate, written `ecosystem:name[@version]`.
///
/// The name may itself contain `@` (npm scopes such as `@babel/core`) or `:` (Maven
/// `group:artifact`); only an `@` past the first name character separates the version.
struct LibraryId {
    std::string ecosystem;
    std::string name;
    std::optional<std::string> version;

    static LibraryId parse(std::string_view text) {
        const auto colon = text.find(':');
        if (colon == std::string_view::npos || colon == 0) {
            throw ValidationError("library id '" + std::string(text) + "' lacks an 'ecosystem:' prefix");
        }
        LibraryId id;
        id.ecosystem = std::string(text.substr(0, colon));
        if (!is_registered_ecosystem(id.ecosystem)) {
            throw ValidationError("library id '" + std::string(text) + "' uses unknown ecosystem '" +
                                  id.ecosystem + "'");
        }
        std::string_view rest = text.substr(colon + 1);
        const auto at = rest.rfind('@');
        if (at != std::string_view::npos && at > 0) {
            id.version = std::string(rest.substr(at + 1));
            rest = rest.substr(0, at);
            if (id.version->empty()) {
                throw ValidationError("library id '" + std::string(text) + "' has an empty version");
            }
        }
        if (rest.empty()) throw ValidationError("library id '" + std::string(text) + "' has an empty name");
        id.name = std::string(rest);
        return id;
    }

    std::string str() const {
        std::string out = ecosystem + ":" + name;
        if (version) out += "@" + *version;
        return out;
    }

    auto operator<=>(const LibraryId&) const = default;
    bool operator==(const LibraryId&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const LibraryId& id) { return os << id.str(); }

} // namespace depwatch
