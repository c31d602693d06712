#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graphkern/error.hpp"
#include "graphkern/graph.hpp"

namespace graphkern {

inline constexpr const char* data_dir_env = "GRAPHKERN_DATA_DIR";

struct TuLoadOptions {
    // When false, a missing {name}_graph_labels.txt is tolerated: class labels
    // are set to 0 and meta.has_class_labels is false.
    bool require_class_labels = true;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (start <= line.size()) {
        const auto comma = line.find(',', start);
        const auto end = comma == std::string_view::npos ? line.size() : comma;
        fields.push_back(trim(line.substr(start, end - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

class LineReader {
public:
    explicit LineReader(std::filesystem::path path) : path_(std::move(path)), in_(path_) {
        if (!in_) {
            throw DataError("missing-file: cannot open " + path_.string());
        }
    }

    // Returns false at end of file; blank lines are skipped.
    bool next(std::string_view& line) {
        while (std::getline(in_, buffer_)) {
            ++line_no_;
            line = trim(buffer_);
            if (!line.empty()) {
                return true;
            }
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError("malformed-line: " + path_.string() + ":" + std::to_string(line_no_) + ": " + what);
    }

    template <class T>
    T parse_integer(std::string_view field) const {
        T value{};
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (ec != std::errc() || ptr != field.data() + field.size()) {
            fail("expected an integer, got '" + std::string(field) + "'");
        }
        return value;
    }

    double parse_real(std::string_view field) const {
        // from_chars for double is unavailable on some toolchains; strtod on a copy.
        const std::string copy(field);
        char* end = nullptr;
        const double value = std::strtod(copy.c_str(), &end);
        if (copy.empty() || end != copy.c_str() + copy.size()) {
            fail("expected a real number, got '" + copy + "'");
        }
        return value;
    }

    const std::filesystem::path& path() const noexcept { return path_; }
    std::size_t line_number() const noexcept { return line_no_; }

private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::string buffer_;
    std::size_t line_no_ = 0;
};

} // namespace detail

/// Locates the directory holding `{name}_A.txt`. An explicit directory wins;
/// otherwise GRAPHKERN_DATA_DIR is used. Both `dir/` and `dir/name/` are tried.
inline std::filesystem::path resolve_dataset_dir(const std::optional<std::filesystem::path>& explicit_dir,
                                                 const std::string& name) {
    std::filesystem::path base;
    if (explicit_dir && !explicit_dir->empty()) {
        base = *explicit_dir;
    } else if (const char* env = std::getenv(data_dir_env); env != nullptr && *env != '\0') {
        base = env;
    } else {
        throw ConfigError("no dataset directory given (use --dataset or set " + std::string(data_dir_env) + ")");
    }
    const auto marker = name + "_A.txt";
    if (std::filesystem::exists(base / marker)) {
        return base;
    }
    if (std::filesystem::exists(base / name / marker)) {
        return base / name;
    }
    throw DataError("missing-file: " + (base / marker).string() + " (also tried " + (base / name / marker).string() +
                    ")");
}

/// Loads a dataset in the TU benchmark text format. Node ids in the files are
/// 1-based and global across graphs; each graph gets dense local ids in file
/// order. Edges are symmetrised and duplicate lines dropped; every edge gets
/// unit length.
inline Dataset load_tu_dataset(const std::filesystem::path& dir, const std::string& name,
                               const TuLoadOptions& options = {}) {
    const auto file = [&](const char* suffix) { return dir / (name + suffix); };

    // graph indicator: one graph id per node
    std::vector<std::size_t> graph_of;
    std::size_t graph_count = 0;
    {
        detail::LineReader reader(file("_graph_indicator.txt"));
        std::string_view line;
        while (reader.next(line)) {
            const auto id = reader.parse_integer<std::int64_t>(line);
            if (id < 1) {
                reader.fail("graph ids are 1-based");
            }
            graph_of.push_back(static_cast<std::size_t>(id - 1));
            graph_count = std::max(graph_count, static_cast<std::size_t>(id));
        }
        if (graph_of.empty()) {
            reader.fail("graph indicator file is empty");
        }
    }

    std::vector<int> class_labels;
    bool has_class_labels = false;
    if (std::filesystem::exists(file("_graph_labels.txt")) || options.require_class_labels) {
        detail::LineReader reader(file("_graph_labels.txt"));
        std::string_view line;
        while (reader.next(line)) {
            class_labels.push_back(reader.parse_integer<int>(detail::split_fields(line).front()));
        }
        if (class_labels.size() < graph_count) {
            throw DataError("indicator/edge inconsistency: " + std::to_string(graph_count) +
                            " graphs referenced but only " + std::to_string(class_labels.size()) + " class labels");
        }
        graph_count = class_labels.size();
        has_class_labels = true;
    } else {
        class_labels.assign(graph_count, 0);
    }

    const auto total_nodes = graph_of.size();
    std::vector<NodeId> local_id(total_nodes);
    std::vector<std::size_t> sizes(graph_count, 0);
    for (std::size_t v = 0; v < total_nodes; ++v) {
        local_id[v] = static_cast<NodeId>(sizes[graph_of[v]]++);
    }

    std::vector<std::vector<std::set<NodeId>>> neighbor_sets(graph_count);
    for (std::size_t gi = 0; gi < graph_count; ++gi) {
        neighbor_sets[gi].resize(sizes[gi]);
    }
    {
        detail::LineReader reader(file("_A.txt"));
        std::string_view line;
        while (reader.next(line)) {
            const auto fields = detail::split_fields(line);
            if (fields.size() != 2) {
                reader.fail("expected 'i, j'");
            }
            const auto a = reader.parse_integer<std::int64_t>(fields[0]);
            const auto b = reader.parse_integer<std::int64_t>(fields[1]);
            if (a < 1 || b < 1 || static_cast<std::size_t>(a) > total_nodes ||
                static_cast<std::size_t>(b) > total_nodes) {
                reader.fail("node id out of range 1.." + std::to_string(total_nodes));
            }
            const auto u = static_cast<std::size_t>(a - 1);
            const auto v = static_cast<std::size_t>(b - 1);
            if (graph_of[u] != graph_of[v]) {
                throw DataError("indicator/edge inconsistency: " + reader.path().string() + ":" +
                                std::to_string(reader.line_number()) + ": edge joins graphs " +
                                std::to_string(graph_of[u] + 1) + " and " + std::to_string(graph_of[v] + 1));
            }
            if (u == v) {
                throw DataError("self-loop: " + reader.path().string() + ":" + std::to_string(reader.line_number()) +
                                ": node " + std::to_string(a));
            }
            auto& sets = neighbor_sets[graph_of[u]];
            sets[local_id[u]].insert(local_id[v]);
            sets[local_id[v]].insert(local_id[u]);
        }
    }

    std::optional<std::vector<Label>> all_labels;
    if (std::filesystem::exists(file("_node_labels.txt"))) {
        detail::LineReader reader(file("_node_labels.txt"));
        std::vector<Label> labels;
        std::string_view line;
        while (reader.next(line)) {
            labels.push_back(reader.parse_integer<Label>(detail::split_fields(line).front()));
        }
        if (labels.size() != total_nodes) {
            throw DataError("malformed-line: " + reader.path().string() + " has " + std::to_string(labels.size()) +
                            " labels for " + std::to_string(total_nodes) + " nodes");
        }
        all_labels = std::move(labels);
    }

    std::optional<std::vector<std::vector<double>>> all_attributes;
    if (std::filesystem::exists(file("_node_attributes.txt"))) {
        detail::LineReader reader(file("_node_attributes.txt"));
        std::vector<std::vector<double>> rows;
        std::string_view line;
        while (reader.next(line)) {
            std::vector<double> row;
            for (const auto field : detail::split_fields(line)) {
                row.push_back(reader.parse_real(field));
            }
            if (!rows.empty() && row.size() != rows.front().size()) {
                reader.fail("attribute-dim-mismatch: expected " + std::to_string(rows.front().size()) + " values");
            }
            rows.push_back(std::move(row));
        }
        if (rows.size() != total_nodes) {
            throw DataError("malformed-line: " + reader.path().string() + " has " + std::to_string(rows.size()) +
                            " rows for " + std::to_string(total_nodes) + " nodes");
        }
        all_attributes = std::move(rows);
    }

    std::vector<std::vector<std::size_t>> members(graph_count);
    for (std::size_t v = 0; v < total_nodes; ++v) {
        members[graph_of[v]].push_back(v);
    }

    Dataset d;
    d.class_labels = std::move(class_labels);
    d.meta.source = name;
    d.meta.has_class_labels = has_class_labels;
    d.graphs.reserve(graph_count);
    for (std::size_t gi = 0; gi < graph_count; ++gi) {
        std::vector<std::vector<Neighbor>> adjacency(sizes[gi]);
        for (NodeId v = 0; v < sizes[gi]; ++v) {
            for (const NodeId w : neighbor_sets[gi][v]) {
                adjacency[v].push_back({w, 1.0});
            }
        }
        std::optional<std::vector<Label>> labels;
        std::optional<std::vector<std::vector<double>>> attributes;
        if (all_labels) {
            labels.emplace();
            for (const auto v : members[gi]) {
                labels->push_back((*all_labels)[v]);
            }
        }
        if (all_attributes) {
            attributes.emplace();
            for (const auto v : members[gi]) {
                attributes->push_back((*all_attributes)[v]);
            }
        }
        Graph g(std::move(adjacency), std::move(labels), std::move(attributes));
        if (const auto violation = validate(g)) {
            throw DataError("graph " + std::to_string(gi + 1) + " of " + name + ": " + violation->message());
        }
        d.graphs.push_back(std::move(g));
    }
    return d;
}

/// Writes a dataset in TU format (edges listed in both directions, reals with
/// round-trip precision). Edge lengths are not representable and are dropped.
inline void write_tu_dataset(const Dataset& d, const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const auto open = [&](const char* suffix) {
        std::ofstream out(dir / (name + suffix));
        if (!out) {
            throw DataError("cannot write " + (dir / (name + suffix)).string());
        }
        return out;
    };
    auto a = open("_A.txt");
    auto indicator = open("_graph_indicator.txt");
    auto graph_labels = open("_graph_labels.txt");
    std::size_t offset = 0;
    for (std::size_t gi = 0; gi < d.graphs.size(); ++gi) {
        const auto& g = d.graphs[gi];
        for (NodeId v = 0; v < g.node_count(); ++v) {
            indicator << gi + 1 << '\n';
            for (const auto& nb : g.neighbors(v)) {
                a << offset + v + 1 << ", " << offset + nb.node + 1 << '\n';
            }
        }
        graph_labels << (gi < d.class_labels.size() ? d.class_labels[gi] : 0) << '\n';
        offset += g.node_count();
    }
    if (d.all_labeled()) {
        auto labels = open("_node_labels.txt");
        for (const auto& g : d.graphs) {
            for (const auto l : g.labels()) {
                labels << l << '\n';
            }
        }
    }
    if (d.all_attributed()) {
        auto attributes = open("_node_attributes.txt");
        attributes << std::setprecision(17);
        for (const auto& g : d.graphs) {
            for (NodeId v = 0; v < g.node_count(); ++v) {
                const auto row = g.attributes(v);
                for (std::size_t i = 0; i < row.size(); ++i) {
                    attributes << (i ? ", " : "") << row[i];
                }
                attributes << '\n';
            }
        }
    }
}

/// Summary statistics matching the columns of the usual dataset property
/// tables. Density is averaged per graph as 2m / (n (n - 1)), graphs with
/// fewer than two nodes counting as 0.
struct DatasetStats {
    std::size_t graph_count = 0;
    std::size_t class_count = 0;
    double mean_nodes = 0.0;
    double mean_edges = 0.0;
    double mean_density = 0.0;
    bool discrete_labels = false;
    std::size_t attribute_dim = 0;
};

inline DatasetStats dataset_stats(const Dataset& d) {
    DatasetStats s;
    s.graph_count = d.size();
    s.class_count = std::set<int>(d.class_labels.begin(), d.class_labels.end()).size();
    s.discrete_labels = d.all_labeled() && !d.meta.degree_labels;
    for (const auto& g : d.graphs) {
        const double n = static_cast<double>(g.node_count());
        const double m = static_cast<double>(g.edge_count());
        s.mean_nodes += n;
        s.mean_edges += m;
        s.mean_density += n > 1 ? 2.0 * m / (n * (n - 1.0)) : 0.0;
        s.attribute_dim = std::max(s.attribute_dim, g.attribute_dim());
    }
    if (s.graph_count > 0) {
        const double count = static_cast<double>(s.graph_count);
        s.mean_nodes /= count;
        s.mean_edges /= count;
        s.mean_density /= count;
    }
    return s;
}

} // namespace graphkern
