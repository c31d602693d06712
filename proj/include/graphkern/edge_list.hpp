#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "graphkern/error.hpp"
#include "graphkern/graph.hpp"

namespace graphkern {

/// A single graph whose nodes carry names, read from a small text file.
struct NamedGraph {
    Graph graph;
    std::vector<std::string> names;  // indexed by NodeId

    NodeId node(const std::string& name) const {
        for (std::size_t v = 0; v < names.size(); ++v) {
            if (names[v] == name) {
                return static_cast<NodeId>(v);
            }
        }
        throw ConfigError("unknown node '" + name + "'");
    }
};

/// Edge-list format: one `u v [length]` per line, a lone name declares an
/// isolated node, `#` starts a comment. Nodes are numbered by first
/// appearance. Undirected; repeating an edge with the same length is allowed.
inline NamedGraph read_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("missing-file: cannot open " + path.string());
    }
    NamedGraph out;
    std::map<std::string, NodeId> ids;
    const auto id_of = [&](std::string_view name) {
        const auto [it, fresh] = ids.emplace(std::string(name), static_cast<NodeId>(ids.size()));
        if (fresh) {
            out.names.emplace_back(name);
        }
        return it->second;
    };
    std::map<std::pair<NodeId, NodeId>, double> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::string spaced = line;
        for (char& c : spaced) {
            if (c == ',' || c == '\t') {
                c = ' ';
            }
        }
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (pos < spaced.size()) {
            const auto start = spaced.find_first_not_of(' ', pos);
            if (start == std::string::npos) {
                break;
            }
            const auto end = spaced.find(' ', start);
            fields.push_back(spaced.substr(start, end == std::string::npos ? std::string::npos : end - start));
            pos = end == std::string::npos ? spaced.size() : end;
        }
        const auto where = path.string() + ":" + std::to_string(line_no);
        if (fields.empty()) {
            continue;
        }
        if (fields.size() > 3) {
            throw DataError("malformed-line: " + where + ": expected 'u v [length]'");
        }
        const auto u = id_of(fields[0]);
        if (fields.size() == 1) {
            continue;
        }
        const auto v = id_of(fields[1]);
        double length = 1.0;
        if (fields.size() == 3) {
            char* end = nullptr;
            length = std::strtod(fields[2].c_str(), &end);
            if (*end != '\0') {
                throw DataError("malformed-line: " + where + ": bad length '" + fields[2] + "'");
            }
        }
        if (u == v) {
            throw DataError("malformed-line: " + where + ": self-loop on '" + fields[0] + "'");
        }
        const auto key = std::minmax(u, v);
        const auto [it, fresh] = edges.emplace(key, length);
        if (!fresh && it->second != length) {
            throw DataError("malformed-line: " + where + ": edge repeated with a different length");
        }
    }
    std::vector<UndirectedEdge> list;
    for (const auto& [key, length] : edges) {
        list.push_back({key.first, key.second, length});
    }
    out.graph = Graph::from_edges(out.names.size(), list);
    if (const auto violation = validate(out.graph)) {
        throw DataError("invalid graph in " + path.string() + ": " + violation->message());
    }
    return out;
}

} // namespace graphkern
