#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphkern/error.hpp"
#include "graphkern/graph.hpp"

namespace graphkern {

struct DagEdge {
    NodeId node;
    bool gap;

    friend bool operator==(const DagEdge&, const DagEdge&) = default;
};

/// Shortest-path DAG rooted at `root`, optionally extended with gap edges.
///
/// Every directed path starting at the root is a (gappy) shortest path of the
/// source graph. Nodes unreachable from the root keep infinite distance and
/// have no edges. `order` lists the reachable nodes in a topological order
/// (the Dijkstra settle order, which gap edges respect as well).
struct SpDag {
    NodeId root = 0;
    std::vector<double> dist;
    std::vector<std::vector<DagEdge>> children;
    std::vector<std::vector<DagEdge>> parents;
    std::vector<NodeId> order;
    std::size_t gap_size = 0;
    // longest directed path from the root, counted in nodes
    std::size_t max_len = 0;

    std::size_t node_count() const noexcept { return dist.size(); }
    bool contains(NodeId v) const { return std::isfinite(dist.at(v)); }

    std::size_t edge_count() const noexcept {
        std::size_t total = 0;
        for (const auto& c : children) {
            total += c.size();
        }
        return total;
    }

    std::vector<std::pair<NodeId, NodeId>> edges() const {
        std::vector<std::pair<NodeId, NodeId>> out;
        for (NodeId u = 0; u < children.size(); ++u) {
            for (const auto& c : children[u]) {
                out.emplace_back(u, c.node);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

namespace detail {

inline bool all_lengths_integral(const Graph& g) {
    for (const auto& list : g.adjacency()) {
        for (const auto& nb : list) {
            if (nb.length != std::floor(nb.length) || nb.length > 0x1.0p52) {
                return false;
            }
        }
    }
    return true;
}

// Tightness test for dist(u) + l(u,v) == dist(v).
inline bool on_shortest_path(double du, double length, double dv, bool exact) {
    if (exact) {
        return du + length == dv;
    }
    return std::abs(du + length - dv) <= 1e-9 * std::max(1.0, dv);
}

inline std::size_t longest_path_nodes(const SpDag& dag) {
    std::vector<std::size_t> level(dag.node_count(), 0);
    std::size_t best = 0;
    for (const NodeId v : dag.order) {
        std::size_t lv = 1;
        for (const auto& p : dag.parents[v]) {
            lv = std::max(lv, level[p.node] + 1);
        }
        level[v] = lv;
        best = std::max(best, lv);
    }
    return best;
}

} // namespace detail

/// Dijkstra from `root` with a binary heap (O(m log n)); keeps edge (u, v)
/// when dist(u) + l(u, v) matches dist(v). Ties in the heap are broken by node
/// id so the settle order is deterministic.
inline SpDag build_spdag(const Graph& g, NodeId root) {
    const auto n = g.node_count();
    if (root >= n) {
        throw std::out_of_range("root " + std::to_string(root) + " out of range");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();

    SpDag dag;
    dag.root = root;
    dag.dist.assign(n, inf);
    dag.children.resize(n);
    dag.parents.resize(n);
    dag.order.reserve(n);

    using Entry = std::pair<double, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    std::vector<bool> settled(n, false);
    dag.dist[root] = 0.0;
    heap.emplace(0.0, root);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (settled[u]) {
            continue;
        }
        settled[u] = true;
        dag.order.push_back(u);
        for (const auto& [v, length] : g.neighbors(u)) {
            const double candidate = d + length;
            if (!settled[v] && candidate < dag.dist[v]) {
                dag.dist[v] = candidate;
                heap.emplace(candidate, v);
            }
        }
    }

    const bool exact = detail::all_lengths_integral(g);
    std::vector<std::size_t> rank(n, n);
    for (std::size_t i = 0; i < dag.order.size(); ++i) {
        rank[dag.order[i]] = i;
    }
    // Edges may only point forward in settle order, which keeps the DAG
    // acyclic even when the float tolerance admits near-zero lengths.
    for (const NodeId u : dag.order) {
        for (const auto& [v, length] : g.neighbors(u)) {
            if (rank[v] > rank[u] && rank[v] < n &&
                detail::on_shortest_path(dag.dist[u], length, dag.dist[v], exact)) {
                dag.children[u].push_back({v, false});
                dag.parents[v].push_back({u, false});
            }
        }
    }
    for (auto& c : dag.children) {
        std::sort(c.begin(), c.end(), [](const DagEdge& a, const DagEdge& b) { return a.node < b.node; });
    }
    for (auto& p : dag.parents) {
        std::sort(p.begin(), p.end(), [](const DagEdge& a, const DagEdge& b) { return a.node < b.node; });
    }
    dag.max_len = detail::longest_path_nodes(dag);
    return dag;
}

/// Adds a gap edge u -> v for every pair joined by a base path of 2..s+1 edges,
/// i.e. skipping at most s nodes. Targets reachable along several base paths
/// get a single edge, and pairs already joined by a base edge are left alone.
inline SpDag extend_gappy(const SpDag& base, std::size_t s) {
    if (base.gap_size != 0) {
        throw std::invalid_argument("extend_gappy expects a base DAG (gap_size 0)");
    }
    SpDag dag = base;
    if (s == 0) {
        return dag;
    }
    dag.gap_size = s;

    const auto n = base.node_count();
    std::vector<std::uint64_t> layer_mark(n, 0);
    std::vector<std::uint64_t> target_mark(n, 0);
    std::uint64_t layer_stamp = 0;
    std::uint64_t target_stamp = 0;
    std::vector<NodeId> frontier;
    std::vector<NodeId> next;
    std::vector<NodeId> targets;

    for (const NodeId u : base.order) {
        ++target_stamp;
        for (const auto& c : base.children[u]) {
            target_mark[c.node] = target_stamp;
        }
        targets.clear();
        frontier.clear();
        for (const auto& c : base.children[u]) {
            frontier.push_back(c.node);
        }
        for (std::size_t hops = 2; hops <= s + 1 && !frontier.empty(); ++hops) {
            ++layer_stamp;
            next.clear();
            for (const NodeId w : frontier) {
                for (const auto& c : base.children[w]) {
                    if (layer_mark[c.node] != layer_stamp) {
                        layer_mark[c.node] = layer_stamp;
                        next.push_back(c.node);
                    }
                }
            }
            for (const NodeId v : next) {
                if (target_mark[v] != target_stamp) {
                    target_mark[v] = target_stamp;
                    targets.push_back(v);
                }
            }
            frontier.swap(next);
        }
        std::sort(targets.begin(), targets.end());
        for (const NodeId v : targets) {
            dag.children[u].push_back({v, true});
            dag.parents[v].push_back({u, true});
        }
    }
    dag.max_len = detail::longest_path_nodes(dag);
    return dag;
}

/// Path-count vectors of one rooted DAG, stored node-major with stride `len`.
/// Index i (0-based) holds counts of paths with i + 1 nodes.
struct CountVectors {
    std::size_t len = 0;
    // occ(v)[i]: paths starting at v with i + 1 nodes
    std::vector<std::uint64_t> occ_data;
    // desc(v)[i]: paths from the root ending at v with i + 1 nodes
    std::vector<std::uint64_t> desc_data;

    std::span<const std::uint64_t> occ(NodeId v) const {
        return std::span<const std::uint64_t>(occ_data).subspan(std::size_t{v} * len, len);
    }
    std::span<const std::uint64_t> desc(NodeId v) const {
        return std::span<const std::uint64_t>(desc_data).subspan(std::size_t{v} * len, len);
    }
};

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out;
    if (__builtin_add_overflow(a, b, &out)) {
        throw ComputeError("path count overflow (64-bit); lower the gap size");
    }
    return out;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw ComputeError("path count overflow (64-bit); lower the gap size");
    }
    return out;
}

} // namespace detail

/// Message passing over the DAG: a forward sweep in topological order fills
/// desc, a backward sweep fills occ.
inline CountVectors count_vectors(const SpDag& dag) {
    CountVectors cv;
    cv.len = dag.max_len;
    const auto n = dag.node_count();
    const auto len = cv.len;
    cv.occ_data.assign(n * len, 0);
    cv.desc_data.assign(n * len, 0);
    if (len == 0) {
        return cv;
    }

    cv.desc_data[std::size_t{dag.root} * len] = 1;
    for (const NodeId v : dag.order) {
        const std::uint64_t* from = cv.desc_data.data() + std::size_t{v} * len;
        for (const auto& c : dag.children[v]) {
            std::uint64_t* to = cv.desc_data.data() + std::size_t{c.node} * len;
            for (std::size_t i = 0; i + 1 < len; ++i) {
                to[i + 1] = detail::checked_add(to[i + 1], from[i]);
            }
        }
    }

    for (auto it = dag.order.rbegin(); it != dag.order.rend(); ++it) {
        const NodeId v = *it;
        std::uint64_t* to = cv.occ_data.data() + std::size_t{v} * len;
        to[0] = 1;
        for (const auto& c : dag.children[v]) {
            const std::uint64_t* from = cv.occ_data.data() + std::size_t{c.node} * len;
            for (std::size_t i = 0; i + 1 < len; ++i) {
                to[i + 1] = detail::checked_add(to[i + 1], from[i]);
            }
        }
    }
    return cv;
}

using Path = std::vector<NodeId>;

inline constexpr std::size_t default_max_paths = 1'000'000;

/// Every directed path that starts at the root, including [root], sorted
/// lexicographically. Exponential in general; throws SizeGuardError once more
/// than `max_paths` paths have been produced.
inline std::vector<Path> enumerate_paths(const SpDag& dag, std::size_t max_paths = default_max_paths) {
    std::vector<Path> paths;
    if (dag.order.empty()) {
        return paths;
    }
    Path current{dag.root};
    // explicit stack of (node, next child index)
    std::vector<std::pair<NodeId, std::size_t>> stack{{dag.root, 0}};
    paths.push_back(current);
    while (!stack.empty()) {
        auto& [node, next_child] = stack.back();
        if (next_child < dag.children[node].size()) {
            const NodeId child = dag.children[node][next_child++].node;
            current.push_back(child);
            if (paths.size() >= max_paths) {
                throw SizeGuardError("path enumeration exceeded the cap of " + std::to_string(max_paths) + " paths");
            }
            paths.push_back(current);
            stack.emplace_back(child, 0);
        } else {
            stack.pop_back();
            current.pop_back();
        }
    }
    std::sort(paths.begin(), paths.end());
    return paths;
}

/// Golden-file friendly dump: one "u -> v" or "u -> v [gap]" line per edge,
/// ordered by source then target id.
inline std::string to_debug_text(const SpDag& dag) {
    std::ostringstream os;
    for (NodeId u = 0; u < dag.children.size(); ++u) {
        auto sorted = dag.children[u];
        std::sort(sorted.begin(), sorted.end(), [](const DagEdge& a, const DagEdge& b) { return a.node < b.node; });
        for (const auto& c : sorted) {
            os << u << " -> " << c.node << (c.gap ? " [gap]" : "") << '\n';
        }
    }
    return os.str();
}

} // namespace graphkern
