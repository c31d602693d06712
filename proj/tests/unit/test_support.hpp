#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "graphkern/graph.hpp"

namespace testing_support {

using graphkern::Graph;
using graphkern::Label;
using graphkern::NodeId;
using graphkern::UndirectedEdge;

// a - b - c - d as nodes 0..3
inline Graph chain(std::optional<std::vector<Label>> labels = std::nullopt) {
    const std::vector<UndirectedEdge> edges{{0, 1}, {1, 2}, {2, 3}};
    return Graph::from_edges(4, edges, std::move(labels));
}

// a - b - c - d - a
inline Graph square(std::optional<std::vector<Label>> labels = std::nullopt) {
    const std::vector<UndirectedEdge> edges{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    return Graph::from_edges(4, edges, std::move(labels));
}

inline Graph cycle(std::size_t n, Label label) {
    std::vector<UndirectedEdge> edges;
    for (std::size_t i = 0; i < n; ++i) {
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>((i + 1) % n)});
    }
    return Graph::from_edges(n, edges, std::vector<Label>(n, label));
}

struct RandomGraphOptions {
    std::size_t min_nodes = 1;
    std::size_t max_nodes = 8;
    double edge_probability = 0.4;
    int label_count = 3;  // 0 -> unlabeled
    std::size_t attribute_dim = 0;
    bool unit_lengths = true;  // otherwise integer lengths in [1, 3]
};

inline Graph random_graph(std::mt19937_64& rng, const RandomGraphOptions& o = {}) {
    std::uniform_int_distribution<std::size_t> size(o.min_nodes, o.max_nodes);
    const auto n = size(rng);
    std::bernoulli_distribution coin(o.edge_probability);
    std::uniform_int_distribution<int> length(1, 3);
    std::vector<UndirectedEdge> edges;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            if (coin(rng)) {
                edges.push_back({u, v, o.unit_lengths ? 1.0 : static_cast<double>(length(rng))});
            }
        }
    }
    std::optional<std::vector<Label>> labels;
    if (o.label_count > 0) {
        std::uniform_int_distribution<int> pick(0, o.label_count - 1);
        labels.emplace(n);
        for (auto& l : *labels) {
            l = pick(rng);
        }
    }
    std::optional<std::vector<std::vector<double>>> attributes;
    if (o.attribute_dim > 0) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        attributes.emplace(n, std::vector<double>(o.attribute_dim));
        for (auto& row : *attributes) {
            for (auto& x : row) {
                x = gauss(rng);
            }
        }
    }
    return Graph::from_edges(n, edges, std::move(labels), std::move(attributes));
}

/// Two-class dataset: class 0 graphs are labelled cycles with one chord,
/// class 1 graphs are labelled random trees, sizes overlapping.
inline graphkern::Dataset two_class_dataset(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> size(6, 12);
    std::uniform_int_distribution<int> label(0, 2);
    graphkern::Dataset d;
    d.meta.source = "SYN";
    for (std::size_t i = 0; i < count; ++i) {
        const auto n = size(rng);
        std::vector<UndirectedEdge> edges;
        const int cls = static_cast<int>(i % 2);
        if (cls == 0) {
            for (std::size_t v = 0; v < n; ++v) {
                edges.push_back({static_cast<NodeId>(v), static_cast<NodeId>((v + 1) % n)});
            }
            edges.push_back({0, static_cast<NodeId>(n / 2)});
        } else {
            for (std::size_t v = 1; v < n; ++v) {
                std::uniform_int_distribution<std::size_t> parent(0, v - 1);
                edges.push_back({static_cast<NodeId>(parent(rng)), static_cast<NodeId>(v)});
            }
        }
        std::vector<Label> labels(n);
        for (auto& l : labels) {
            l = label(rng);
        }
        d.graphs.push_back(Graph::from_edges(n, edges, std::move(labels)));
        d.class_labels.push_back(cls);
    }
    return d;
}

/// Same graph with nodes renamed by `perm` (old id -> new id).
inline Graph permuted(const Graph& g, const std::vector<NodeId>& perm) {
    const auto n = g.node_count();
    std::vector<std::vector<graphkern::Neighbor>> adjacency(n);
    for (NodeId v = 0; v < n; ++v) {
        for (const auto& nb : g.neighbors(v)) {
            adjacency[perm[v]].push_back({perm[nb.node], nb.length});
        }
    }
    std::optional<std::vector<Label>> labels;
    if (g.has_labels()) {
        labels.emplace(n);
        for (NodeId v = 0; v < n; ++v) {
            (*labels)[perm[v]] = g.label(v);
        }
    }
    std::optional<std::vector<std::vector<double>>> attributes;
    if (g.has_attributes()) {
        attributes.emplace(n);
        for (NodeId v = 0; v < n; ++v) {
            (*attributes)[perm[v]] = (*g.attribute_rows())[v];
        }
    }
    return Graph(std::move(adjacency), std::move(labels), std::move(attributes));
}

} // namespace testing_support
