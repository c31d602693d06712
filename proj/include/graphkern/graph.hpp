#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graphkern {

using NodeId = std::uint32_t;
using Label = std::int64_t;

struct Neighbor {
    NodeId node;
    double length;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

struct UndirectedEdge {
    NodeId u;
    NodeId v;
    double length = 1.0;
};

/// Undirected graph with positive edge lengths, optional discrete node labels
/// and optional real-valued node attributes.
///
/// The adjacency lists are stored exactly as given so that validate() can
/// report malformed input; use from_edges() to build a symmetric graph.
class Graph {
public:
    Graph() = default;

    explicit Graph(std::vector<std::vector<Neighbor>> adjacency,
                   std::optional<std::vector<Label>> labels = std::nullopt,
                   std::optional<std::vector<std::vector<double>>> attributes = std::nullopt)
        : adjacency_(std::move(adjacency)), labels_(std::move(labels)), attributes_(std::move(attributes)) {}

    /// Builds a graph from an undirected edge list, inserting both directions.
    static Graph from_edges(std::size_t node_count, std::span<const UndirectedEdge> edges,
                            std::optional<std::vector<Label>> labels = std::nullopt,
                            std::optional<std::vector<std::vector<double>>> attributes = std::nullopt) {
        std::vector<std::vector<Neighbor>> adjacency(node_count);
        for (const auto& e : edges) {
            if (e.u >= node_count || e.v >= node_count) {
                throw std::out_of_range("edge endpoint out of range");
            }
            adjacency[e.u].push_back({e.v, e.length});
            adjacency[e.v].push_back({e.u, e.length});
        }
        return Graph(std::move(adjacency), std::move(labels), std::move(attributes));
    }

    std::size_t node_count() const noexcept { return adjacency_.size(); }

    /// Number of undirected edges (half the adjacency entries).
    std::size_t edge_count() const noexcept {
        std::size_t total = 0;
        for (const auto& list : adjacency_) {
            total += list.size();
        }
        return total / 2;
    }

    std::span<const Neighbor> neighbors(NodeId v) const { return adjacency_.at(v); }
    const std::vector<std::vector<Neighbor>>& adjacency() const noexcept { return adjacency_; }

    bool has_labels() const noexcept { return labels_.has_value(); }
    std::span<const Label> labels() const noexcept {
        return labels_ ? std::span<const Label>(*labels_) : std::span<const Label>();
    }
    Label label(NodeId v) const { return labels_.value().at(v); }

    bool has_attributes() const noexcept { return attributes_.has_value(); }
    std::span<const double> attributes(NodeId v) const { return attributes_.value().at(v); }
    const std::optional<std::vector<std::vector<double>>>& attribute_rows() const noexcept { return attributes_; }

    /// Attribute dimension, 0 when the graph carries no attributes or no nodes.
    std::size_t attribute_dim() const noexcept {
        return (attributes_ && !attributes_->empty()) ? attributes_->front().size() : 0;
    }

    Graph with_labels(std::vector<Label> labels) const {
        Graph copy = *this;
        copy.labels_ = std::move(labels);
        return copy;
    }

    Graph without_labels() const {
        Graph copy = *this;
        copy.labels_.reset();
        return copy;
    }

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::vector<std::vector<Neighbor>> adjacency_;
    std::optional<std::vector<Label>> labels_;
    std::optional<std::vector<std::vector<double>>> attributes_;
};

enum class ViolationKind {
    asymmetric_edge,
    nonpositive_length,
    self_loop,
    parallel_edge,
    neighbor_out_of_range,
    label_count_mismatch,
    attribute_count_mismatch,
    attribute_dim_mismatch,
};

inline const char* to_string(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::asymmetric_edge: return "asymmetric-edge";
        case ViolationKind::nonpositive_length: return "nonpositive-length";
        case ViolationKind::self_loop: return "self-loop";
        case ViolationKind::parallel_edge: return "parallel-edge";
        case ViolationKind::neighbor_out_of_range: return "neighbor-out-of-range";
        case ViolationKind::label_count_mismatch: return "label-count-mismatch";
        case ViolationKind::attribute_count_mismatch: return "attribute-count-mismatch";
        case ViolationKind::attribute_dim_mismatch: return "attribute-dim-mismatch";
    }
    return "unknown";
}

struct GraphViolation {
    ViolationKind kind;
    NodeId u = 0;
    NodeId v = 0;

    std::string message() const {
        std::ostringstream os;
        os << to_string(kind);
        switch (kind) {
            case ViolationKind::asymmetric_edge:
            case ViolationKind::nonpositive_length:
            case ViolationKind::parallel_edge:
            case ViolationKind::neighbor_out_of_range:
                os << " at edge (" << u << ", " << v << ")";
                break;
            case ViolationKind::self_loop:
            case ViolationKind::attribute_dim_mismatch:
                os << " at node " << u;
                break;
            default:
                break;
        }
        return os.str();
    }
};

/// Checks every Graph invariant and returns the first violation found,
/// scanning nodes in id order.
inline std::optional<GraphViolation> validate(const Graph& g) {
    const auto n = g.node_count();
    if (g.has_labels() && g.labels().size() != n) {
        return GraphViolation{ViolationKind::label_count_mismatch};
    }
    if (g.has_attributes()) {
        const auto& rows = *g.attribute_rows();
        if (rows.size() != n) {
            return GraphViolation{ViolationKind::attribute_count_mismatch};
        }
        for (NodeId v = 0; v < n; ++v) {
            if (rows[v].size() != rows.front().size()) {
                return GraphViolation{ViolationKind::attribute_dim_mismatch, v, v};
            }
        }
    }
    std::vector<NodeId> seen(n, static_cast<NodeId>(-1));
    for (NodeId u = 0; u < n; ++u) {
        for (const auto& [v, length] : g.neighbors(u)) {
            if (v >= n) {
                return GraphViolation{ViolationKind::neighbor_out_of_range, u, v};
            }
            if (v == u) {
                return GraphViolation{ViolationKind::self_loop, u, u};
            }
            if (!(length > 0.0)) {
                return GraphViolation{ViolationKind::nonpositive_length, u, v};
            }
            if (seen[v] == u) {
                return GraphViolation{ViolationKind::parallel_edge, u, v};
            }
            seen[v] = u;
            const auto back = g.neighbors(v);
            const bool mirrored = std::any_of(back.begin(), back.end(), [&](const Neighbor& b) {
                return b.node == u && b.length == length;
            });
            if (!mirrored) {
                return GraphViolation{ViolationKind::asymmetric_edge, u, v};
            }
        }
    }
    return std::nullopt;
}

inline std::size_t degree(const Graph& g, NodeId v) {
    if (v >= g.node_count()) {
        throw std::out_of_range("node id " + std::to_string(v) + " out of range");
    }
    return g.neighbors(v).size();
}

/// Δ, the largest node degree (0 for empty graphs).
inline std::size_t max_degree(const Graph& g) {
    std::size_t best = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
        best = std::max(best, g.neighbors(v).size());
    }
    return best;
}

/// Replaces the discrete labels by node degrees. Intended for datasets that
/// ship without discrete labels.
inline Graph with_degree_labels(const Graph& g) {
    std::vector<Label> labels(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) {
        labels[v] = static_cast<Label>(g.neighbors(v).size());
    }
    return g.with_labels(std::move(labels));
}

struct DatasetMeta {
    std::string source;
    double noise_fraction = 0.0;
    std::uint64_t seed = 0;
    // false when the source had no class label file; such datasets cannot be classified
    bool has_class_labels = true;
    // true when discrete labels were derived from degrees rather than read from the source
    bool degree_labels = false;

    friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

struct Dataset {
    std::vector<Graph> graphs;
    std::vector<int> class_labels;
    DatasetMeta meta;

    std::size_t size() const noexcept { return graphs.size(); }

    bool all_labeled() const noexcept {
        return !graphs.empty() &&
               std::all_of(graphs.begin(), graphs.end(), [](const Graph& g) { return g.has_labels(); });
    }

    bool all_attributed() const noexcept {
        return !graphs.empty() &&
               std::all_of(graphs.begin(), graphs.end(), [](const Graph& g) { return g.has_attributes(); });
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Applies degree labels to every graph when the dataset has no discrete labels
/// of its own; otherwise returns the dataset unchanged.
inline Dataset with_degree_labels_if_unlabeled(Dataset d) {
    if (d.all_labeled() && !d.meta.degree_labels) {
        return d;
    }
    for (auto& g : d.graphs) {
        g = with_degree_labels(g);
    }
    d.meta.degree_labels = true;
    return d;
}

} // namespace graphkern
