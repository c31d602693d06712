#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "graphkern/error.hpp"
#include "graphkern/graph.hpp"
#include "graphkern/parallel.hpp"

namespace graphkern {

/// Sparse label histogram of one graph at one refinement depth, sorted by id.
using LabelHistogram = std::vector<std::pair<std::uint32_t, std::uint64_t>>;

/// Weisfeiler-Lehman subtree features for one graph: one histogram per
/// iteration 0..h. Ids are only comparable between features that share the
/// same dictionary token (i.e. came out of the same wl_relabel call).
struct WlFeatures {
    std::vector<LabelHistogram> iterations;
    std::uint64_t dictionary = 0;
    std::size_t node_count = 0;
};

inline constexpr int default_wl_iterations = 5;

namespace detail {

inline std::uint64_t next_dictionary_token() {
    static std::atomic<std::uint64_t> counter{0};
    return ++counter;
}

inline LabelHistogram histogram(std::span<const std::uint32_t> labels) {
    std::map<std::uint32_t, std::uint64_t> counts;
    for (const auto l : labels) {
        ++counts[l];
    }
    return {counts.begin(), counts.end()};
}

} // namespace detail

/// Refines node labels h times with a dictionary shared across all graphs.
/// A node's signature is (own label, sorted neighbour labels); signatures are
/// collected from every graph first and then numbered in sorted order, so ids
/// do not depend on graph order or thread scheduling.
inline std::vector<WlFeatures> wl_relabel(std::span<const Graph> graphs, int h, unsigned threads = 1) {
    if (h < 0) {
        throw ConfigError("WL iteration count must be non-negative");
    }
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        if (!graphs[gi].has_labels() && graphs[gi].node_count() > 0) {
            throw DataError("missing-labels: graph " + std::to_string(gi) +
                            " has no discrete labels (apply degree labels first)");
        }
    }
    const auto token = detail::next_dictionary_token();
    std::vector<WlFeatures> features(graphs.size());
    std::vector<std::vector<std::uint32_t>> current(graphs.size());

    // iteration 0: compress raw labels
    {
        std::map<Label, std::uint32_t> ids;
        for (const auto& g : graphs) {
            for (const auto l : g.labels()) {
                ids.emplace(l, 0);
            }
        }
        std::uint32_t next = 0;
        for (auto& [label, id] : ids) {
            id = next++;
        }
        for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
            const auto labels = graphs[gi].labels();
            current[gi].resize(labels.size());
            for (std::size_t v = 0; v < labels.size(); ++v) {
                current[gi][v] = ids.at(labels[v]);
            }
            features[gi].dictionary = token;
            features[gi].node_count = graphs[gi].node_count();
            features[gi].iterations.push_back(detail::histogram(current[gi]));
        }
    }

    using Signature = std::vector<std::uint32_t>;
    std::vector<std::vector<Signature>> signatures(graphs.size());
    for (int t = 1; t <= h; ++t) {
        parallel_for(graphs.size(), threads, [&](std::size_t gi) {
            const auto& g = graphs[gi];
            auto& sigs = signatures[gi];
            sigs.assign(g.node_count(), {});
            for (NodeId v = 0; v < g.node_count(); ++v) {
                Signature& sig = sigs[v];
                sig.reserve(g.neighbors(v).size() + 1);
                for (const auto& nb : g.neighbors(v)) {
                    sig.push_back(current[gi][nb.node]);
                }
                std::sort(sig.begin(), sig.end());
                sig.insert(sig.begin(), current[gi][v]);
            }
        });

        std::map<Signature, std::uint32_t> dictionary;
        for (const auto& sigs : signatures) {
            for (const auto& sig : sigs) {
                dictionary.emplace(sig, 0);
            }
        }
        std::uint32_t next = 0;
        for (auto& [sig, id] : dictionary) {
            id = next++;
        }
        for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
            for (std::size_t v = 0; v < signatures[gi].size(); ++v) {
                current[gi][v] = dictionary.at(signatures[gi][v]);
            }
            features[gi].iterations.push_back(detail::histogram(current[gi]));
        }
    }
    return features;
}

inline std::vector<WlFeatures> wl_relabel(const Dataset& d, int h, unsigned threads = 1) {
    return wl_relabel(std::span<const Graph>(d.graphs), h, threads);
}

/// Sum over iterations of histogram dot products.
inline double wl_kernel(const WlFeatures& f, const WlFeatures& f2) {
    if (f.dictionary != f2.dictionary) {
        throw ConfigError("dictionary-mismatch: WL features come from different relabeling runs");
    }
    const auto depth = std::min(f.iterations.size(), f2.iterations.size());
    std::uint64_t total = 0;
    for (std::size_t t = 0; t < depth; ++t) {
        const auto& a = f.iterations[t];
        const auto& b = f2.iterations[t];
        auto ia = a.begin();
        auto ib = b.begin();
        while (ia != a.end() && ib != b.end()) {
            if (ia->first < ib->first) {
                ++ia;
            } else if (ib->first < ia->first) {
                ++ib;
            } else {
                total += ia->second * ib->second;
                ++ia;
                ++ib;
            }
        }
    }
    return static_cast<double>(total);
}

} // namespace graphkern
