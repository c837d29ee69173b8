#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "depwatch/error.hpp"
#include "depwatch/library_id.hpp"
#include "depwatch/snapshot.hpp"

namespace depwatch {

/// Directed dependency graph, edges pointing dependent -> dependency.
///
/// Nodes are stored in ascending id order, so node indices (and everything derived from
/// them) are independent of declaration order in the input.
class DependencyGraph {
public:
    using Edge = std::pair<std::size_t, std::size_t>;

    DependencyGraph() = default;

    /// Builds from explicit node and edge lists. Duplicate edges collapse; self-loops are
    /// dropped and reported in `warnings`.
    DependencyGraph(std::vector<LibraryId> nodes, const std::vector<std::pair<LibraryId, LibraryId>>& edges,
                    std::vector<std::string>* warnings = nullptr)
        : nodes_(std::move(nodes)) {
        std::sort(nodes_.begin(), nodes_.end());
        if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end()) {
            throw ValidationError("graph: duplicate node id");
        }
        out_.resize(nodes_.size());
        in_.resize(nodes_.size());
        for (const auto& [from, to] : edges) {
            const std::size_t u = require_index(from);
            const std::size_t v = require_index(to);
            if (u == v) {
                if (warnings) warnings->push_back("dropped self-dependency of '" + from.str() + "'");
                continue;
            }
            out_[u].push_back(v);
        }
        for (std::size_t u = 0; u < out_.size(); ++u) {
            auto& adj = out_[u];
            std::sort(adj.begin(), adj.end());
            adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
            for (std::size_t v : adj) in_[v].push_back(u);
        }
    }

    std::size_t size() const noexcept { return nodes_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }
    const std::vector<LibraryId>& nodes() const noexcept { return nodes_; }
    const LibraryId& node(std::size_t index) const { return nodes_.at(index); }

    std::optional<std::size_t> index_of(const LibraryId& id) const {
        const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
        if (it == nodes_.end() || *it != id) return std::nullopt;
        return static_cast<std::size_t>(it - nodes_.begin());
    }

    std::size_t require_index(const LibraryId& id) const {
        if (auto idx = index_of(id)) return *idx;
        throw LookupError("'" + id.str() + "' is not a node of the graph");
    }

    bool contains(const LibraryId& id) const { return index_of(id).has_value(); }

    /// Dependencies of `index`, ascending.
    const std::vector<std::size_t>& successors(std::size_t index) const { return out_.at(index); }
    /// Dependents of `index`, ascending.
    const std::vector<std::size_t>& predecessors(std::size_t index) const { return in_.at(index); }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& adj : out_) n += adj.size();
        return n;
    }

    /// All edges in lexicographic (from, to) order.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (std::size_t u = 0; u < out_.size(); ++u) {
            for (std::size_t v : out_[u]) out.emplace_back(u, v);
        }
        return out;
    }

    std::vector<std::pair<LibraryId, LibraryId>> id_edges() const {
        std::vector<std::pair<LibraryId, LibraryId>> out;
        for (const auto& [u, v] : edges()) out.emplace_back(nodes_[u], nodes_[v]);
        return out;
    }

    bool has_edge(const LibraryId& from, const LibraryId& to) const {
        const auto u = index_of(from), v = index_of(to);
        if (!u || !v) return false;
        const auto& adj = out_[*u];
        return std::binary_search(adj.begin(), adj.end(), *v);
    }

    /// Same nodes, every edge flipped.
    DependencyGraph reversed() const {
        DependencyGraph g;
        g.nodes_ = nodes_;
        g.out_ = in_;
        g.in_ = out_;
        return g;
    }

    bool operator==(const DependencyGraph&) const = default;

private:
    std::vector<LibraryId> nodes_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;
};

struct GraphBuild {
    DependencyGraph graph;
    std::vector<std::string> warnings;
};

inline GraphBuild build_graph(const DependencySnapshot& snapshot) {
    std::vector<LibraryId> nodes;
    std::vector<std::pair<LibraryId, LibraryId>> edges;
    for (const auto& lib : snapshot.libraries) {
        nodes.push_back(lib.id);
        for (const auto& dep : lib.deps) edges.emplace_back(lib.id, dep);
    }
    GraphBuild out;
    out.graph = DependencyGraph(std::move(nodes), edges, &out.warnings);
    return out;
}

/// Reachability mask from `start` over >= 1 edge. `start` is set only when it lies on a cycle.
inline std::vector<bool> reachable_from(const DependencyGraph& graph, std::size_t start) {
    std::vector<bool> seen(graph.size(), false);
    std::vector<std::size_t> stack(graph.successors(start).begin(), graph.successors(start).end());
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        if (seen[u]) continue;
        seen[u] = true;
        for (std::size_t v : graph.successors(u)) {
            if (!seen[v]) stack.push_back(v);
        }
    }
    return seen;
}

inline std::set<LibraryId> transitive_dependencies(const DependencyGraph& graph, const LibraryId& node) {
    const auto mask = reachable_from(graph, graph.require_index(node));
    std::set<LibraryId> out;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) out.insert(graph.node(i));
    }
    return out;
}

/// Tarjan's algorithm, iterative. Members of each component ascend; components are ordered
/// by their smallest member.
inline std::vector<std::vector<LibraryId>> strongly_connected_components(const DependencyGraph& graph) {
    const std::size_t n = graph.size();
    constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> components;
    std::size_t counter = 0;

    struct Frame {
        std::size_t node;
        std::size_t next_edge;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            const auto& succ = graph.successors(f.node);
            if (f.next_edge < succ.size()) {
                const std::size_t v = succ[f.next_edge++];
                if (index[v] == kUnvisited) {
                    index[v] = low[v] = counter++;
                    stack.push_back(v);
                    on_stack[v] = true;
                    frames.push_back({v, 0});
                } else if (on_stack[v]) {
                    low[f.node] = std::min(low[f.node], index[v]);
                }
                continue;
            }
            const std::size_t u = f.node;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().node] = std::min(low[frames.back().node], low[u]);
            if (low[u] == index[u]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != u);
                std::sort(comp.begin(), comp.end());
                components.push_back(std::move(comp));
            }
        }
    }
    std::sort(components.begin(), components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    std::vector<std::vector<LibraryId>> out;
    out.reserve(components.size());
    for (const auto& comp : components) {
        std::vector<LibraryId> ids;
        for (std::size_t i : comp) ids.push_back(graph.node(i));
        out.push_back(std::move(ids));
    }
    return out;
}

/// The subgraph induced by `roots` and everything they transitively depend on.
inline DependencyGraph closure_subgraph(const DependencyGraph& graph, const std::vector<LibraryId>& roots) {
    std::vector<bool> keep(graph.size(), false);
    for (const auto& root : roots) {
        const std::size_t r = graph.require_index(root);
        keep[r] = true;
        const auto mask = reachable_from(graph, r);
        for (std::size_t i = 0; i < mask.size(); ++i) keep[i] = keep[i] || mask[i];
    }
    std::vector<LibraryId> nodes;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        if (keep[i]) nodes.push_back(graph.node(i));
    }
    std::vector<std::pair<LibraryId, LibraryId>> edges;
    for (const auto& [u, v] : graph.edges()) {
        if (keep[u] && keep[v]) edges.emplace_back(graph.node(u), graph.node(v));
    }
    return DependencyGraph(std::move(nodes), edges);
}

} // namespace depwatch
