#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "depwatch/canonical_json.hpp"
#include "depwatch/error.hpp"
#include "depwatch/library_id.hpp"
#include "depwatch/repo_ref.hpp"

namespace depwatch {

inline constexpr int kSnapshotFormatVersion = 1;

struct LibraryRecord {
    LibraryId id;
    std::optional<RepoRef> repo;
    std::vector<LibraryId> deps;

    bool operator==(const LibraryRecord&) const = default;
};

/// An application's libraries and their declared direct dependencies.
struct DependencySnapshot {
    int format_version = kSnapshotFormatVersion;
    std::string ecosystem;
    std::vector<LibraryRecord> libraries;
    std::vector<LibraryId> roots;

    const LibraryRecord* find(const LibraryId& id) const {
        for (const auto& lib : libraries) {
            if (lib.id == id) return &lib;
        }
        return nullptr;
    }

    /// Throws ValidationError on duplicate ids or dangling references.
    void validate() const {
        if (!is_registered_ecosystem(ecosystem)) {
            throw ValidationError("snapshot ecosystem '" + ecosystem + "' is not registered");
        }
        std::set<LibraryId> declared;
        for (const auto& lib : libraries) {
            if (!declared.insert(lib.id).second) {
                throw ValidationError("library '" + lib.id.str() + "' is declared more than once");
            }
            if (lib.repo) lib.repo->validate();
        }
        for (const auto& lib : libraries) {
            for (const auto& dep : lib.deps) {
                if (!declared.count(dep)) {
                    throw ValidationError("library '" + lib.id.str() + "' depends on undeclared library '" +
                                          dep.str() + "'");
                }
            }
        }
        for (const auto& root : roots) {
            if (!declared.count(root)) {
                throw ValidationError("root '" + root.str() + "' is not a declared library");
            }
        }
    }

    bool operator==(const DependencySnapshot&) const = default;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

inline nlohmann::json parse_json_text(std::string_view text, std::string_view what) {
    try {
        return nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte);
        throw ParseError("malformed " + std::string(what) + ": " + e.what(), line, column);
    }
}

template <class T>
T require(const nlohmann::json& obj, const char* key, std::string_view context) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ValidationError(std::string(context) + ": missing key '" + key + "'");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(std::string(context) + ": key '" + key + "' has the wrong type");
    }
}

inline void note_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> known,
                              std::string_view context, std::vector<std::string>* warnings) {
    if (!warnings || !obj.is_object()) return;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            warnings->push_back(std::string(context) + ": ignoring unknown key '" + it.key() + "'");
        }
    }
}

inline RepoRef repo_from_json(const nlohmann::json& j, std::string_view context) {
    RepoRef repo{require<std::string>(j, "host", context), require<std::string>(j, "owner", context),
                 require<std::string>(j, "name", context)};
    repo.validate();
    return repo;
}

inline nlohmann::json repo_to_json(const RepoRef& repo) {
    return {{"host", repo.host}, {"owner", repo.owner}, {"name", repo.name}};
}

} // namespace detail

/// Parses and validates the JSON snapshot format. Unknown keys are skipped and reported
/// through `warnings` when given.
inline DependencySnapshot parse_snapshot(std::string_view text, std::vector<std::string>* warnings = nullptr) {
    const nlohmann::json doc = detail::parse_json_text(text, "snapshot");
    if (!doc.is_object()) throw ValidationError("snapshot: top level must be an object");
    detail::note_unknown_keys(doc, {"format_version", "ecosystem", "libraries", "roots"}, "snapshot", warnings);

    DependencySnapshot snap;
    const auto version = detail::require<long long>(doc, "format_version", "snapshot");
    if (version != kSnapshotFormatVersion) {
        throw VersionError("snapshot: unsupported format_version " + std::to_string(version), version);
    }
    snap.format_version = static_cast<int>(version);
    snap.ecosystem = detail::require<std::string>(doc, "ecosystem", "snapshot");

    const auto libs = detail::require<nlohmann::json>(doc, "libraries", "snapshot");
    if (!libs.is_array()) throw ValidationError("snapshot: 'libraries' must be an array");
    for (const auto& entry : libs) {
        const std::string context = "snapshot library";
        detail::note_unknown_keys(entry, {"id", "repo", "deps"}, context, warnings);
        LibraryRecord rec;
        rec.id = LibraryId::parse(detail::require<std::string>(entry, "id", context));
        const std::string where = "library '" + rec.id.str() + "'";
        if (entry.contains("repo") && !entry.at("repo").is_null()) {
            detail::note_unknown_keys(entry.at("repo"), {"host", "owner", "name"}, where + " repo", warnings);
            rec.repo = detail::repo_from_json(entry.at("repo"), where + " repo");
        }
        if (entry.contains("deps")) {
            for (const auto& dep : detail::require<std::vector<std::string>>(entry, "deps", where)) {
                rec.deps.push_back(LibraryId::parse(dep));
            }
        }
        snap.libraries.push_back(std::move(rec));
    }
    for (const auto& root : detail::require<std::vector<std::string>>(doc, "roots", "snapshot")) {
        snap.roots.push_back(LibraryId::parse(root));
    }
    snap.validate();
    return snap;
}

inline nlohmann::json snapshot_to_json(const DependencySnapshot& snap) {
    nlohmann::json libs = nlohmann::json::array();
    for (const auto& lib : snap.libraries) {
        nlohmann::json entry{{"id", lib.id.str()}, {"deps", nlohmann::json::array()}};
        for (const auto& dep : lib.deps) entry["deps"].push_back(dep.str());
        if (lib.repo) entry["repo"] = detail::repo_to_json(*lib.repo);
        libs.push_back(std::move(entry));
    }
    nlohmann::json roots = nlohmann::json::array();
    for (const auto& root : snap.roots) roots.push_back(root.str());
    return {{"format_version", snap.format_version},
            {"ecosystem", snap.ecosystem},
            {"libraries", std::move(libs)},
            {"roots", std::move(roots)}};
}

inline std::string serialize_snapshot(const DependencySnapshot& snap) {
    return canonical_dump(snapshot_to_json(snap));
}

} // namespace depwatch
