#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "graphkern/error.hpp"
#include "graphkern/graph.hpp"
#include "graphkern/node_kernel.hpp"
#include "graphkern/parallel.hpp"
#include "graphkern/spdag.hpp"

namespace graphkern {

/// Which count vector indexes the rows of a hop-count matrix. Both layouts give
/// the same kernel (the pairwise inner product is transpose invariant).
enum class HopCountLayout { arrival_major, departure_major };

/// Per-node hop-count matrices M^v (max_len x max_len, row-major, node-major
/// overall) with M^v[i][k] = sum over roots a of desc_a^v(i) * occ_a^v(k).
/// Entry [i][k] counts rooted paths in which v sits at position i + 1 of a path
/// with i + k + 1 nodes, so only entries with i + k < max_len can be non-zero.
struct HopCountMatrices {
    std::size_t node_count = 0;
    std::size_t max_len = 0;
    std::vector<std::uint64_t> entries;

    std::span<const std::uint64_t> of(NodeId v) const {
        const auto stride = max_len * max_len;
        return std::span<const std::uint64_t>(entries).subspan(std::size_t{v} * stride, stride);
    }
    std::uint64_t at(NodeId v, std::size_t i, std::size_t k) const { return of(v)[i * max_len + k]; }
};

namespace detail {

inline HopCountMatrices accumulate_hop_counts(std::size_t n, const std::vector<CountVectors>& per_root,
                                              HopCountLayout layout) {
    HopCountMatrices m;
    m.node_count = n;
    for (const auto& cv : per_root) {
        m.max_len = std::max(m.max_len, cv.len);
    }
    const auto len = m.max_len;
    m.entries.assign(n * len * len, 0);
    for (const auto& cv : per_root) {
        for (NodeId v = 0; v < n; ++v) {
            auto desc = cv.desc(v);
            auto occ = cv.occ(v);
            if (layout == HopCountLayout::departure_major) {
                std::swap(desc, occ);
            }
            std::uint64_t* out = m.entries.data() + std::size_t{v} * len * len;
            for (std::size_t i = 0; i < cv.len; ++i) {
                if (desc[i] == 0) {
                    continue;
                }
                for (std::size_t k = 0; i + k < cv.len; ++k) {
                    if (occ[k] != 0) {
                        out[i * len + k] = checked_add(out[i * len + k], checked_mul(desc[i], occ[k]));
                    }
                }
            }
        }
    }
    return m;
}

// <M^v, M'^v'> over the index range both graphs share; entries past a graph's
// own max_len are zero.
inline unsigned __int128 hop_inner_product(std::span<const std::uint64_t> a, std::size_t len_a,
                                           std::span<const std::uint64_t> b, std::size_t len_b) {
    const std::size_t overlap = std::min(len_a, len_b);
    unsigned __int128 total = 0;
    for (std::size_t i = 0; i < overlap; ++i) {
        const std::uint64_t* row_a = a.data() + i * len_a;
        const std::uint64_t* row_b = b.data() + i * len_b;
        for (std::size_t k = 0; i + k < overlap; ++k) {
            const unsigned __int128 term = static_cast<unsigned __int128>(row_a[k]) * row_b[k];
            if (__builtin_add_overflow(total, term, &total)) {
                throw ComputeError("kernel weight overflow (128-bit)");
            }
        }
    }
    return total;
}

} // namespace detail

/// Builds every rooted DAG of `g`, extends it with gaps of size <= s, and sums
/// the outer products of its count vectors per node. Roots are processed in
/// parallel; the integer accumulation makes the result independent of the
/// worker count.
inline HopCountMatrices hop_count_matrices(const Graph& g, std::size_t s, unsigned threads = 1,
                                           HopCountLayout layout = HopCountLayout::arrival_major) {
    const auto n = g.node_count();
    std::vector<CountVectors> per_root(n);
    parallel_for(n, threads, [&](std::size_t a) {
        const auto base = build_spdag(g, static_cast<NodeId>(a));
        per_root[a] = count_vectors(s == 0 ? base : extend_gappy(base, s));
    });
    return detail::accumulate_hop_counts(n, per_root, layout);
}

/// Weighted node-kernel sum: sum over (v, v') of <M^v, M'^v'> * k_n(v, v').
/// Pairs with a zero node kernel are skipped.
inline double graphhopper_kernel(const Graph& g, const HopCountMatrices& m, const Graph& g2,
                                 const HopCountMatrices& m2, const NodeKernelSpec& spec) {
    if (g.node_count() == 0 || g2.node_count() == 0) {
        return 0.0;
    }
    const auto kn = node_kernel_matrix(spec, g, g2);
    const auto n2 = g2.node_count();
    double total = 0.0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
        for (NodeId v2 = 0; v2 < n2; ++v2) {
            const double k = kn[std::size_t{v} * n2 + v2];
            if (k == 0.0) {
                continue;
            }
            const auto w = detail::hop_inner_product(m.of(v), m.max_len, m2.of(v2), m2.max_len);
            total += static_cast<double>(w) * k;
        }
    }
    return total;
}

/// Gappy GraphHopper kernel between two graphs; s = 0 is the original kernel.
inline double graphhopper_kernel(const Graph& g, const Graph& g2, std::size_t s, const NodeKernelSpec& spec) {
    check_node_kernel_inputs(spec, g);
    check_node_kernel_inputs(spec, g2);
    return graphhopper_kernel(g, hop_count_matrices(g, s), g2, hop_count_matrices(g2, s), spec);
}

/// Hop counts of the gap-free kernel computed by memoised recursion over the
/// base DAGs (pull style) rather than by the sweeps in count_vectors.
inline HopCountMatrices hop_count_matrices_gap_free(const Graph& g) {
    const auto n = g.node_count();
    std::vector<CountVectors> per_root(n);
    for (NodeId a = 0; a < n; ++a) {
        const auto dag = build_spdag(g, a);
        const auto len = dag.max_len;
        CountVectors& cv = per_root[a];
        cv.len = len;
        cv.desc_data.assign(n * len, 0);
        cv.occ_data.assign(n * len, 0);
        std::vector<bool> desc_done(n, false);
        std::vector<bool> occ_done(n, false);

        auto arrivals = [&](auto&& self, NodeId v) -> void {
            if (desc_done[v]) {
                return;
            }
            std::uint64_t* out = cv.desc_data.data() + std::size_t{v} * len;
            if (v == a) {
                out[0] = 1;
            }
            for (const auto& p : dag.parents[v]) {
                self(self, p.node);
                const std::uint64_t* in = cv.desc_data.data() + std::size_t{p.node} * len;
                for (std::size_t i = 1; i < len; ++i) {
                    out[i] = detail::checked_add(out[i], in[i - 1]);
                }
            }
            desc_done[v] = true;
        };
        auto departures = [&](auto&& self, NodeId v) -> void {
            if (occ_done[v]) {
                return;
            }
            std::uint64_t* out = cv.occ_data.data() + std::size_t{v} * len;
            out[0] = 1;
            for (const auto& c : dag.children[v]) {
                self(self, c.node);
                const std::uint64_t* in = cv.occ_data.data() + std::size_t{c.node} * len;
                for (std::size_t k = 1; k < len; ++k) {
                    out[k] = detail::checked_add(out[k], in[k - 1]);
                }
            }
            occ_done[v] = true;
        };
        for (const NodeId v : dag.order) {
            arrivals(arrivals, v);
            departures(departures, v);
        }
    }
    return detail::accumulate_hop_counts(n, per_root, HopCountLayout::arrival_major);
}

/// Original GraphHopper kernel, evaluated without any gap machinery.
inline double graphhopper_kernel_gap_free(const Graph& g, const Graph& g2, const NodeKernelSpec& spec) {
    check_node_kernel_inputs(spec, g);
    check_node_kernel_inputs(spec, g2);
    return graphhopper_kernel(g, hop_count_matrices_gap_free(g), g2, hop_count_matrices_gap_free(g2), spec);
}

/// Floyd-Warshall distances; infinity between disconnected nodes.
inline std::vector<std::vector<double>> all_pairs_distances(const Graph& g) {
    const auto n = g.node_count();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    for (NodeId u = 0; u < n; ++u) {
        d[u][u] = 0.0;
        for (const auto& [v, length] : g.neighbors(u)) {
            d[u][v] = std::min(d[u][v], length);
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
            }
        }
    }
    return d;
}

/// Gappy shortest paths rooted at `root`, generated literally: every shortest
/// path from the root (found by walking tight edges of the all-pairs distance
/// table), then every variant that drops interior nodes in runs of at most s
/// consecutive nodes. Duplicated node sequences are kept once.
inline std::vector<Path> brute_force_gappy_paths(const Graph& g, NodeId root, std::size_t s,
                                                 std::size_t max_paths = default_max_paths) {
    if (root >= g.node_count()) {
        throw std::out_of_range("root " + std::to_string(root) + " out of range");
    }
    const auto dist = all_pairs_distances(g);
    const bool exact = detail::all_lengths_integral(g);
    const auto& from_root = dist[root];

    std::vector<Path> shortest;
    Path current{root};
    auto walk = [&](auto&& self, NodeId u) -> void {
        shortest.push_back(current);
        if (shortest.size() > max_paths) {
            throw SizeGuardError("shortest path enumeration exceeded the cap of " + std::to_string(max_paths));
        }
        for (const auto& [v, length] : g.neighbors(u)) {
            if (from_root[v] > from_root[u] &&
                detail::on_shortest_path(from_root[u], length, from_root[v], exact)) {
                current.push_back(v);
                self(self, v);
                current.pop_back();
            }
        }
    };
    walk(walk, root);

    std::set<Path> pool;
    Path variant;
    // Decide keep/drop for position pos of `path`; `run` is the length of the
    // current run of dropped nodes. First and last nodes are always kept.
    auto expand = [&](auto&& self, const Path& path, std::size_t pos, std::size_t run) -> void {
        if (pos + 1 == path.size()) {
            variant.push_back(path[pos]);
            pool.insert(variant);
            variant.pop_back();
            if (pool.size() > max_paths) {
                throw SizeGuardError("gappy path enumeration exceeded the cap of " + std::to_string(max_paths));
            }
            return;
        }
        variant.push_back(path[pos]);
        self(self, path, pos + 1, 0);
        variant.pop_back();
        if (pos > 0 && run < s) {
            self(self, path, pos + 1, run + 1);
        }
    };
    for (const auto& path : shortest) {
        expand(expand, path, 0, 0);
    }
    return {pool.begin(), pool.end()};
}

/// Direct evaluation of the R-convolution sum over all pairs of gappy shortest
/// paths of equal node count, each pair contributing the sum of node kernels
/// position by position. Exponential; meant as a test oracle on small graphs.
inline double kernel_bruteforce(const Graph& g, const Graph& g2, std::size_t s, const NodeKernelSpec& spec,
                                std::size_t max_paths = default_max_paths) {
    if (g.node_count() == 0 || g2.node_count() == 0) {
        return 0.0;
    }
    const auto kn = node_kernel_matrix(spec, g, g2);
    const auto n2 = g2.node_count();

    auto by_length = [&](const Graph& graph) {
        std::map<std::size_t, std::vector<Path>> buckets;
        std::size_t total = 0;
        for (NodeId a = 0; a < graph.node_count(); ++a) {
            for (auto& p : brute_force_gappy_paths(graph, a, s, max_paths)) {
                if (++total > max_paths) {
                    throw SizeGuardError("path pool exceeded the cap of " + std::to_string(max_paths));
                }
                buckets[p.size()].push_back(std::move(p));
            }
        }
        return buckets;
    };
    const auto paths = by_length(g);
    const auto paths2 = by_length(g2);

    double total = 0.0;
    for (const auto& [len, bucket] : paths) {
        const auto it = paths2.find(len);
        if (it == paths2.end()) {
            continue;
        }
        for (const auto& p : bucket) {
            for (const auto& p2 : it->second) {
                double path_kernel = 0.0;
                for (std::size_t i = 0; i < len; ++i) {
                    path_kernel += kn[std::size_t{p[i]} * n2 + p2[i]];
                }
                total += path_kernel;
            }
        }
    }
    return total;
}

} // namespace graphkern
