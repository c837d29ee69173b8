#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "depwatch/graph.hpp"
#include "depwatch/provider.hpp"
#include "depwatch/rng.hpp"

namespace depwatch::testing {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(DEPWATCH_FIXTURES) / rel; }

inline LibraryId lib(const std::string& name) { return LibraryId{"npm", name, std::nullopt}; }

inline DependencyGraph make_graph(const std::vector<std::string>& names,
                                  const std::vector<std::pair<std::string, std::string>>& edges) {
    std::vector<LibraryId> nodes;
    for (const auto& n : names) nodes.push_back(lib(n));
    std::vector<std::pair<LibraryId, LibraryId>> e;
    for (const auto& [a, b] : edges) e.emplace_back(lib(a), lib(b));
    return DependencyGraph(nodes, e);
}

inline std::string node_name(std::size_t i) {
    return (i < 10 ? "n0" : "n") + std::to_string(i);
}

/// Random digraph on `n` nodes; with `dag` set, edges only go from lower to higher index.
inline DependencyGraph random_graph(Rng& rng, std::size_t n, double p, bool dag) {
    std::vector<std::string> names;
    std::vector<std::pair<std::string, std::string>> edges;
    for (std::size_t i = 0; i < n; ++i) names.push_back(node_name(i));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || (dag && j < i)) continue;
            if (rng.chance(p)) edges.emplace_back(names[i], names[j]);
        }
    }
    return make_graph(names, edges);
}

/// Floyd-Warshall style boolean closure over a dense adjacency matrix: path[i][j] iff j is
/// reachable from i over >= 1 edge.
inline std::vector<std::vector<bool>> brute_force_reachability(const DependencyGraph& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<bool>> path(n, std::vector<bool>(n, false));
    for (const auto& [u, v] : g.edges()) path[u][v] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (path[i][k] && path[k][j]) path[i][j] = true;
    return path;
}

/// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("depwatch-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace depwatch::testing
