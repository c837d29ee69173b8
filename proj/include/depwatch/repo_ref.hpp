#pragma once

#include <compare>
#include <string>

#include "depwatch/error.hpp"

namespace depwatch {

/// Location of a library's source repository on a forge.
struct RepoRef {
    std::string host;
    std::string owner;
    std::string name;

    void validate() const {
        if (host.empty() || owner.empty() || name.empty()) {
            throw ValidationError("repository reference '" + str() + "' has an empty field");
        }
    }

    std::string str() const { return host + "/" + owner + "/" + name; }

    auto operator<=>(const RepoRef&) const = default;
    bool operator==(const RepoRef&) const = default;
};

} // namespace depwatch
