#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <random>
#include <set>

#include "graphkern/edge_list.hpp"
#include "graphkern/noise.hpp"
#include "graphkern/tu_format.hpp"
#include "test_support.hpp"

using namespace graphkern;
namespace fs = std::filesystem;

namespace {

const fs::path data_root = GRAPHKERN_TEST_DATA;

std::string error_text(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

Dataset random_dataset(std::uint64_t seed, std::size_t count, std::size_t attribute_dim = 0) {
    std::mt19937_64 rng(seed);
    Dataset d;
    for (std::size_t i = 0; i < count; ++i) {
        d.graphs.push_back(testing_support::random_graph(
            rng, {.min_nodes = 2, .max_nodes = 15, .label_count = 4, .attribute_dim = attribute_dim}));
        d.class_labels.push_back(static_cast<int>(i % 2));
    }
    return d;
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("graphkern_io_" + std::to_string(std::random_device{}()));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

} // namespace

TEST(LoadTu, ToyDataset) {
    const auto d = load_tu_dataset(data_root / "TOY", "TOY");
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d.class_labels, (std::vector<int>{1, -1, 1}));
    EXPECT_EQ(d.graphs[0].node_count(), 3u);
    EXPECT_EQ(d.graphs[1].node_count(), 2u);
    EXPECT_EQ(d.graphs[2].node_count(), 4u);
    // duplicates dropped, one-direction edges symmetrised
    EXPECT_EQ(d.graphs[0].edge_count(), 3u);
    EXPECT_EQ(d.graphs[1].edge_count(), 1u);
    EXPECT_EQ(d.graphs[2].edge_count(), 3u);
    EXPECT_EQ(degree(d.graphs[2], 1), 2u);
    EXPECT_EQ(d.graphs[2].label(3), 3);
    EXPECT_EQ(d.graphs[2].attribute_dim(), 2u);
    EXPECT_EQ(d.graphs[2].attributes(2)[1], 1.0);
    for (const auto& g : d.graphs) {
        EXPECT_FALSE(validate(g).has_value());
        for (NodeId v = 0; v < g.node_count(); ++v) {
            for (const auto& nb : g.neighbors(v)) {
                EXPECT_EQ(nb.length, 1.0);
            }
        }
    }
    EXPECT_EQ(d.meta.source, "TOY");
    EXPECT_TRUE(d.meta.has_class_labels);
}

TEST(LoadTu, Stats) {
    const auto s = dataset_stats(load_tu_dataset(data_root / "TOY", "TOY"));
    EXPECT_EQ(s.graph_count, 3u);
    EXPECT_EQ(s.class_count, 2u);
    EXPECT_DOUBLE_EQ(s.mean_nodes, 3.0);
    EXPECT_DOUBLE_EQ(s.mean_edges, 7.0 / 3.0);
    // densities 1, 1 and 6 / 12
    EXPECT_DOUBLE_EQ(s.mean_density, 2.5 / 3.0);
    EXPECT_TRUE(s.discrete_labels);
    EXPECT_EQ(s.attribute_dim, 2u);
}

TEST(LoadTu, Errors) {
    EXPECT_EQ(error_text([] { load_tu_dataset(data_root / "NOPE", "NOPE"); }).rfind("missing-file", 0), 0u);

    const auto bad = error_text([] { load_tu_dataset(data_root / "BAD_LINE", "BAD_LINE"); });
    EXPECT_EQ(bad.rfind("malformed-line", 0), 0u) << bad;
    EXPECT_NE(bad.find("BAD_LINE_A.txt:2"), std::string::npos) << bad;

    const auto empty = error_text([] { load_tu_dataset(data_root / "EMPTY_INDICATOR", "EMPTY_INDICATOR"); });
    EXPECT_EQ(empty.rfind("malformed-line", 0), 0u) << empty;

    const auto cross = error_text([] { load_tu_dataset(data_root / "CROSS_EDGE", "CROSS_EDGE"); });
    EXPECT_NE(cross.find("indicator/edge inconsistency"), std::string::npos) << cross;

    EXPECT_THROW(load_tu_dataset(data_root / "BAD_LINE", "BAD_LINE"), DataError);
}

TEST(LoadTu, ClassLabelsOptionalOnRequest) {
    TempDir tmp;
    for (const auto* suffix : {"_A.txt", "_graph_indicator.txt", "_node_labels.txt"}) {
        fs::copy_file(data_root / "TOY" / (std::string("TOY") + suffix), tmp.path() / (std::string("TOY") + suffix));
    }
    EXPECT_THROW(load_tu_dataset(tmp.path(), "TOY"), DataError);
    const auto d = load_tu_dataset(tmp.path(), "TOY", {.require_class_labels = false});
    EXPECT_EQ(d.size(), 3u);
    EXPECT_FALSE(d.meta.has_class_labels);
}

TEST(LoadTu, ResolvesDirectories) {
    EXPECT_EQ(resolve_dataset_dir(data_root, "TOY"), data_root / "TOY");
    EXPECT_EQ(resolve_dataset_dir(data_root / "TOY", "TOY"), data_root / "TOY");
    ::setenv(data_dir_env, data_root.c_str(), 1);
    EXPECT_EQ(resolve_dataset_dir(std::nullopt, "TOY"), data_root / "TOY");
    ::unsetenv(data_dir_env);
    EXPECT_THROW(resolve_dataset_dir(std::nullopt, "TOY"), ConfigError);
    EXPECT_THROW(resolve_dataset_dir(data_root, "MISSING"), DataError);
}

TEST(LoadTu, WriteRoundTrip) {
    TempDir tmp;
    const auto d = load_tu_dataset(data_root / "TOY", "TOY");
    write_tu_dataset(d, tmp.path(), "COPY");
    auto again = load_tu_dataset(tmp.path(), "COPY");
    again.meta.source = d.meta.source;
    EXPECT_EQ(again, d);
}

TEST(EdgeList, ReadsNamedGraph) {
    const auto g = read_edge_list(data_root / "chain.edges");
    EXPECT_EQ(g.names, (std::vector<std::string>{"a", "b", "c", "d"}));
    EXPECT_EQ(g.graph.edge_count(), 3u);
    EXPECT_EQ(g.node("c"), 2u);
    EXPECT_THROW(g.node("z"), ConfigError);
}

TEST(EdgeList, LengthsIsolatedNodesAndErrors) {
    TempDir tmp;
    const auto file = tmp.path() / "g.edges";
    std::ofstream(file) << "x y 2.5\nz\ny x 2.5  # repeated\n";
    const auto g = read_edge_list(file);
    EXPECT_EQ(g.graph.node_count(), 3u);
    EXPECT_EQ(g.graph.edge_count(), 1u);
    EXPECT_EQ(g.graph.neighbors(0)[0].length, 2.5);

    std::ofstream(file) << "x y 2\ny x 3\n";
    EXPECT_THROW(read_edge_list(file), DataError);
    std::ofstream(file) << "x x\n";
    EXPECT_THROW(read_edge_list(file), DataError);
    std::ofstream(file) << "x y 0\n";
    EXPECT_THROW(read_edge_list(file), DataError);
    EXPECT_THROW(read_edge_list(tmp.path() / "absent"), DataError);
}

TEST(Noise, NodeCountRounding) {
    EXPECT_EQ(noise_node_count(0.5, 20), 10u);
    EXPECT_EQ(noise_node_count(0.25, 2), 1u);
    EXPECT_EQ(noise_node_count(0.1, 4), 0u);
    EXPECT_EQ(noise_node_count(0.0, 100), 0u);
}

TEST(Noise, ZeroFractionIsIdentity) {
    const auto d = random_dataset(1, 20, 2);
    const auto noisy = inject_noise(d, {.fraction = 0.0, .seed = 9});
    EXPECT_EQ(noisy.graphs, d.graphs);
    EXPECT_EQ(noisy.class_labels, d.class_labels);
}

TEST(Noise, HalfOnTwentyNodesGivesThirty) {
    Dataset d;
    d.graphs = {testing_support::cycle(20, 0)};
    d.class_labels = {0};
    const auto noisy = inject_noise(d, {.fraction = 0.5, .seed = 3});
    EXPECT_EQ(noisy.graphs[0].node_count(), 30u);
    EXPECT_EQ(noisy.graphs[0].edge_count(), 30u);
}

TEST(Noise, DeterministicAndThreadIndependent) {
    const auto d = random_dataset(2, 30, 3);
    const NoiseConfig cfg{.fraction = 0.3, .seed = 77};
    const auto a = inject_noise(d, cfg, 1);
    const auto b = inject_noise(d, cfg, 4);
    EXPECT_EQ(a, b);
    EXPECT_NE(inject_noise(d, {.fraction = 0.3, .seed = 78}).graphs, a.graphs);
}

TEST(Noise, AttachmentOnly) {
    const auto d = random_dataset(4, 40, 2);
    std::set<Label> alphabet;
    std::set<std::vector<double>> pool;
    for (const auto& g : d.graphs) {
        alphabet.insert(g.labels().begin(), g.labels().end());
        for (const auto& row : *g.attribute_rows()) {
            pool.insert(row);
        }
    }
    for (const std::size_t attachments : {1u, 2u}) {
        const auto noisy = inject_noise(d, {.fraction = 0.4, .seed = 5, .attachments = attachments});
        ASSERT_EQ(noisy.size(), d.size());
        EXPECT_EQ(noisy.class_labels, d.class_labels);
        for (std::size_t gi = 0; gi < d.size(); ++gi) {
            const auto& before = d.graphs[gi];
            const auto& after = noisy.graphs[gi];
            const auto n = before.node_count();
            const auto added = noise_node_count(0.4, n);
            ASSERT_EQ(after.node_count(), n + added);
            EXPECT_FALSE(validate(after).has_value());
            std::size_t expected_edges = before.edge_count();
            for (std::size_t j = 0; j < added; ++j) {
                expected_edges += std::min(attachments, n + j);
            }
            EXPECT_EQ(after.edge_count(), expected_edges);
            for (NodeId v = 0; v < n; ++v) {
                std::vector<Neighbor> original;
                for (const auto& nb : after.neighbors(v)) {
                    if (nb.node < n) {
                        original.push_back(nb);
                    }
                }
                const auto old = before.neighbors(v);
                ASSERT_EQ(original.size(), old.size());
                for (std::size_t i = 0; i < old.size(); ++i) {
                    EXPECT_EQ(original[i].node, old[i].node);
                }
                EXPECT_EQ(after.label(v), before.label(v));
            }
            for (NodeId v = static_cast<NodeId>(n); v < after.node_count(); ++v) {
                EXPECT_TRUE(alphabet.count(after.label(v)));
                const auto row = after.attributes(v);
                EXPECT_TRUE(pool.count(std::vector<double>(row.begin(), row.end())));
            }
        }
    }
}

TEST(Noise, CopyAnchorPolicyCopiesNeighbourLabel) {
    const auto d = random_dataset(6, 10);
    const auto noisy = inject_noise(d, {.fraction = 0.5, .seed = 1, .label_policy = NoiseLabelPolicy::copy_anchor});
    for (std::size_t gi = 0; gi < d.size(); ++gi) {
        const auto& g = noisy.graphs[gi];
        for (NodeId v = static_cast<NodeId>(d.graphs[gi].node_count()); v < g.node_count(); ++v) {
            // with one attachment the first neighbour recorded for v is its anchor
            EXPECT_EQ(g.label(v), g.label(g.neighbors(v)[0].node));
        }
    }
}

TEST(Noise, GraphStreamsDoNotDependOnLaterGraphs) {
    const auto d = random_dataset(8, 12);
    Dataset prefix = d;
    prefix.graphs.resize(5);
    prefix.class_labels.resize(5);
    const NoiseConfig cfg{.fraction = 0.5, .seed = 21};
    const auto full = inject_noise(d, cfg);
    const auto part = inject_noise(prefix, cfg);
    for (std::size_t gi = 0; gi < 5; ++gi) {
        EXPECT_EQ(full.graphs[gi], part.graphs[gi]);
    }
}

TEST(Noise, ConfigChecks) {
    const auto d = random_dataset(9, 3);
    EXPECT_THROW(inject_noise(d, {.fraction = -0.1}), ConfigError);
    EXPECT_THROW(inject_noise(d, {.fraction = std::nan("")}), ConfigError);
    EXPECT_THROW(inject_noise(d, {.fraction = 0.1, .attachments = 0}), ConfigError);
    EXPECT_TRUE(noise_config_warning({.fraction = 0.6}).has_value());
    EXPECT_FALSE(noise_config_warning({.fraction = 0.5}).has_value());
    EXPECT_NO_THROW(inject_noise(d, {.fraction = 0.8}));
}

TEST(Noise, EmptyGraphGetsNoNodes) {
    Dataset d;
    d.graphs = {Graph()};
    d.class_labels = {0};
    EXPECT_EQ(inject_noise(d, {.fraction = 0.5}).graphs[0].node_count(), 0u);
}
