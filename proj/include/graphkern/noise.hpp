#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "graphkern/error.hpp"
#include "graphkern/graph.hpp"
#include "graphkern/parallel.hpp"
#include "graphkern/rng.hpp"

namespace graphkern {

enum class NoiseLabelPolicy {
    uniform_alphabet,  // uniform over the dataset's label alphabet
    copy_anchor,       // label of the first node the new node attaches to
};

/// Structural noise: round(fraction * |V|) nodes added per graph, each wired
/// to `attachments` distinct nodes already present (original or previously
/// added) with unit-length edges.
struct NoiseConfig {
    double fraction = 0.0;
    std::uint64_t seed = 0;
    std::size_t attachments = 1;
    NoiseLabelPolicy label_policy = NoiseLabelPolicy::uniform_alphabet;
};

/// Number of nodes added to a graph with n nodes (round half up).
inline std::size_t noise_node_count(double fraction, std::size_t n) {
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

/// Non-fatal remark about a configuration outside the usual [0, 0.5] sweep.
inline std::optional<std::string> noise_config_warning(const NoiseConfig& cfg) {
    if (cfg.fraction > 0.5) {
        return "noise fraction " + std::to_string(cfg.fraction) + " lies outside the usual range [0, 0.5]";
    }
    return std::nullopt;
}

/// Adds random nodes to every graph. Graph i draws from its own stream
/// stream_seed(cfg.seed, i), so the noise of a graph does not depend on the
/// other graphs or on the worker count. New labels and attributes are sampled
/// from the whole dataset (label alphabet; empirical attribute rows).
inline Dataset inject_noise(const Dataset& d, const NoiseConfig& cfg, unsigned threads = 1) {
    if (!(cfg.fraction >= 0.0) || !std::isfinite(cfg.fraction)) {
        throw ConfigError("noise fraction must be a finite non-negative number");
    }
    if (cfg.attachments == 0) {
        throw ConfigError("noise attachments must be at least 1");
    }

    const bool labeled = d.all_labeled();
    const bool attributed = d.all_attributed();
    std::vector<Label> alphabet;
    std::vector<const std::vector<double>*> attribute_pool;
    if (labeled) {
        std::set<Label> unique;
        for (const auto& g : d.graphs) {
            unique.insert(g.labels().begin(), g.labels().end());
        }
        alphabet.assign(unique.begin(), unique.end());
    }
    if (attributed) {
        for (const auto& g : d.graphs) {
            for (const auto& row : *g.attribute_rows()) {
                attribute_pool.push_back(&row);
            }
        }
    }

    Dataset out = d;
    out.meta.noise_fraction = cfg.fraction;
    out.meta.seed = cfg.seed;

    parallel_for(d.size(), threads, [&](std::size_t gi) {
        const Graph& g = d.graphs[gi];
        const auto n = g.node_count();
        const auto added = noise_node_count(cfg.fraction, n);
        if (added == 0) {
            return;
        }
        if (n == 0) {
            throw DataError("empty-graph: graph " + std::to_string(gi) + " has no node to attach noise to");
        }
        Rng rng(stream_seed(cfg.seed, gi));
        auto adjacency = g.adjacency();
        std::optional<std::vector<Label>> labels;
        std::optional<std::vector<std::vector<double>>> attributes = g.attribute_rows();
        if (g.has_labels()) {
            labels.emplace(g.labels().begin(), g.labels().end());
        }
        for (std::size_t j = 0; j < added; ++j) {
            const auto existing = adjacency.size();
            const auto fresh = static_cast<NodeId>(existing);
            adjacency.emplace_back();

            std::vector<NodeId> anchors;
            const auto wanted = std::min(cfg.attachments, existing);
            while (anchors.size() < wanted) {
                const auto candidate = static_cast<NodeId>(rng.below(existing));
                if (std::find(anchors.begin(), anchors.end(), candidate) == anchors.end()) {
                    anchors.push_back(candidate);
                }
            }
            for (const NodeId a : anchors) {
                adjacency[a].push_back({fresh, 1.0});
                adjacency[fresh].push_back({a, 1.0});
            }
            if (labels) {
                if (cfg.label_policy == NoiseLabelPolicy::copy_anchor) {
                    labels->push_back((*labels)[anchors.front()]);
                } else {
                    labels->push_back(alphabet[rng.below(alphabet.size())]);
                }
            }
            if (attributes) {
                attributes->push_back(*attribute_pool[rng.below(attribute_pool.size())]);
            }
        }
        out.graphs[gi] = Graph(std::move(adjacency), std::move(labels), std::move(attributes));
    });
    return out;
}

} // namespace graphkern
