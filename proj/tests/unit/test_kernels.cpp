#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "graphkern/graphhopper.hpp"
#include "graphkern/node_kernel.hpp"
#include "test_support.hpp"

using namespace graphkern;
using testing_support::chain;
using testing_support::random_graph;

namespace {

Graph single_node(Label label) {
    return Graph(std::vector<std::vector<Neighbor>>(1), std::vector<Label>{label});
}

Graph with_attributes(const Graph& g, std::vector<std::vector<double>> rows) {
    return Graph(g.adjacency(), g.has_labels() ? std::optional(std::vector<Label>(g.labels().begin(), g.labels().end()))
                                               : std::nullopt,
                 std::move(rows));
}

// k diamonds in series: 2^k shortest paths between the two ends
Graph diamond_chain(std::size_t k) {
    std::vector<UndirectedEdge> edges;
    NodeId next = 1;
    NodeId tail = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const NodeId up = next++, down = next++, head = next++;
        edges.push_back({tail, up});
        edges.push_back({tail, down});
        edges.push_back({up, head});
        edges.push_back({down, head});
        tail = head;
    }
    return Graph::from_edges(next, edges, std::vector<Label>(next, 0));
}

double relative_gap(double x, double y) {
    return std::abs(x - y) / std::max(1.0, std::abs(y));
}

} // namespace

TEST(NodeKernel, Values) {
    const auto g = single_node(3);
    EXPECT_EQ(node_kernel(NodeKernelSpec::dirac(), g, 0, single_node(3), 0), 1.0);
    EXPECT_EQ(node_kernel(NodeKernelSpec::dirac(), g, 0, single_node(4), 0), 0.0);

    const auto x0 = with_attributes(g, {{0.0}});
    const auto x1 = with_attributes(g, {{1.0}});
    EXPECT_EQ(node_kernel(NodeKernelSpec::gaussian(1.0), x0, 0, x0, 0), 1.0);
    EXPECT_NEAR(node_kernel(NodeKernelSpec::gaussian(1.0), x0, 0, x1, 0), 0.367879, 1e-6);
    EXPECT_NEAR(node_kernel(NodeKernelSpec::gaussian(0.5), x0, 0, x1, 0), std::exp(-0.5), 1e-15);
    EXPECT_NEAR(node_kernel(NodeKernelSpec::product(1.0), x0, 0, x1, 0), std::exp(-1.0), 1e-15);

    const auto other_label = with_attributes(single_node(4), {{0.0}});
    EXPECT_EQ(node_kernel(NodeKernelSpec::product(1.0), x0, 0, other_label, 0), 0.0);
}

TEST(NodeKernel, InputChecks) {
    const Graph unlabeled = chain();
    EXPECT_THROW(check_node_kernel_inputs(NodeKernelSpec::dirac(), unlabeled), DataError);
    EXPECT_THROW(check_node_kernel_inputs(NodeKernelSpec::gaussian(1.0), single_node(0)), DataError);
    const auto attributed = with_attributes(single_node(0), {{1.0}});
    EXPECT_THROW(check_node_kernel_inputs(NodeKernelSpec::gaussian(0.0), attributed), ConfigError);
    EXPECT_NO_THROW(check_node_kernel_inputs(NodeKernelSpec::product(2.0), attributed));
}

TEST(NodeKernel, DefaultChoiceFollowsAvailableData) {
    Dataset d;
    d.graphs = {single_node(1)};
    EXPECT_EQ(default_node_kernel(d), NodeKernelSpec::dirac());
    d.graphs = {with_attributes(single_node(1), {{1.0, 2.0, 3.0, 4.0}})};
    EXPECT_EQ(default_node_kernel(d), NodeKernelSpec::product(0.25));
    d.graphs = {with_attributes(chain(), {{1.0, 2.0}, {0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}})};
    EXPECT_EQ(default_node_kernel(d), NodeKernelSpec::gaussian(0.5));
}

TEST(HopCounts, SingleNode) {
    const auto m = hop_count_matrices(single_node(0), 0);
    EXPECT_EQ(m.max_len, 1u);
    EXPECT_EQ(m.at(0, 0, 0), 1u);
}

TEST(HopCounts, ChainEndpointIncidences) {
    // a is an endpoint of the chain: 4 rooted paths start at a and one path
    // from each of b, c, d ends there, 7 incidences in total
    const auto g = chain();
    std::uint64_t incidences = 0;
    for (NodeId root = 0; root < 4; ++root) {
        for (const auto& p : enumerate_paths(build_spdag(g, root))) {
            incidences += static_cast<std::uint64_t>(std::count(p.begin(), p.end(), NodeId{0}));
        }
    }
    EXPECT_EQ(incidences, 7u);

    const auto m = hop_count_matrices(g, 0);
    std::uint64_t total = 0;
    for (const auto x : m.of(0)) {
        total += x;
    }
    EXPECT_EQ(total, incidences);
}

TEST(HopCounts, TriangleHasNoRoomForGaps) {
    const std::vector<UndirectedEdge> tri{{0, 1}, {1, 2}, {2, 0}};
    const auto g = Graph::from_edges(3, tri, std::vector<Label>{0, 1, 2});
    const auto m0 = hop_count_matrices(g, 0);
    const auto m1 = hop_count_matrices(g, 1);
    EXPECT_EQ(m0.max_len, m1.max_len);
    EXPECT_EQ(m0.entries, m1.entries);
}

TEST(HopCounts, EntryCountsPositionsInPaths) {
    // M^v[i][k] = number of rooted gappy shortest paths of i + k + 1 nodes with v at position i + 1
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        const auto g = random_graph(rng, {.max_nodes = 7});
        for (std::size_t s = 0; s <= 2; ++s) {
            const auto m = hop_count_matrices(g, s);
            std::vector<std::uint64_t> expected(m.entries.size(), 0);
            for (NodeId root = 0; root < g.node_count(); ++root) {
                for (const auto& p : brute_force_gappy_paths(g, root, s)) {
                    for (std::size_t pos = 0; pos < p.size(); ++pos) {
                        const auto i = pos, k = p.size() - pos - 1;
                        expected[std::size_t{p[pos]} * m.max_len * m.max_len + i * m.max_len + k] += 1;
                    }
                }
            }
            ASSERT_EQ(m.entries, expected) << "trial " << trial << " s " << s;
        }
    }
}

TEST(HopCounts, IndependentOfThreadsAndLayout) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        const auto g = random_graph(rng, {.max_nodes = 12});
        const auto one = hop_count_matrices(g, 2, 1);
        const auto many = hop_count_matrices(g, 2, 4);
        EXPECT_EQ(one.entries, many.entries);
        const auto g2 = random_graph(rng, {.max_nodes = 12});
        const auto spec = NodeKernelSpec::dirac();
        const auto arrival = graphhopper_kernel(g, one, g2, hop_count_matrices(g2, 2), spec);
        const auto departure =
            graphhopper_kernel(g, hop_count_matrices(g, 2, 1, HopCountLayout::departure_major), g2,
                               hop_count_matrices(g2, 2, 1, HopCountLayout::departure_major), spec);
        EXPECT_EQ(arrival, departure);
    }
}

TEST(HopCounts, OverflowIsReported) {
    EXPECT_NO_THROW(hop_count_matrices(diamond_chain(20), 0));
    EXPECT_THROW(hop_count_matrices(diamond_chain(70), 0), ComputeError);
}

TEST(GraphHopper, SmallExamples) {
    EXPECT_EQ(graphhopper_kernel(single_node(1), single_node(1), 0, NodeKernelSpec::dirac()), 1.0);

    const std::vector<UndirectedEdge> edge{{0, 1}};
    const auto pair = Graph::from_edges(2, edge, std::vector<Label>{0, 0});
    // paths [a], [b] (length 1) pair 4 ways with value 1; [a,b], [b,a] pair 4 ways with value 2
    EXPECT_EQ(graphhopper_kernel(pair, pair, 0, NodeKernelSpec::dirac()), 12.0);
    EXPECT_EQ(kernel_bruteforce(pair, pair, 0, NodeKernelSpec::dirac()), 12.0);

    const auto c = chain(std::vector<Label>(4, 0));
    EXPECT_GT(graphhopper_kernel(c, c, 2, NodeKernelSpec::dirac()),
              graphhopper_kernel(c, c, 0, NodeKernelSpec::dirac()));
}

TEST(GraphHopper, EmptyGraphGivesZero) {
    const Graph empty;
    EXPECT_EQ(graphhopper_kernel(empty, single_node(0), 1, NodeKernelSpec::dirac()), 0.0);
    EXPECT_EQ(graphhopper_kernel(empty, empty, 0, NodeKernelSpec::dirac()), 0.0);
}

TEST(BruteForce, PathPoolSizes) {
    const auto g = chain();
    std::size_t total = 0;
    for (NodeId root = 0; root < 4; ++root) {
        total += brute_force_gappy_paths(g, root, 0).size();
    }
    // every ordered pair (u, v) has exactly one shortest path, [u] included
    EXPECT_EQ(total, 16u);
    EXPECT_EQ(brute_force_gappy_paths(g, 0, 1).size(), 7u);
    EXPECT_EQ(brute_force_gappy_paths(g, 0, 2).size(), 8u);
}

TEST(GraphHopper, MatchesBruteForce) {
    std::mt19937_64 rng(47);
    const auto gaussian = NodeKernelSpec::gaussian(0.5);
    const auto product = NodeKernelSpec::product(0.5);
    for (int trial = 0; trial < 220; ++trial) {
        const testing_support::RandomGraphOptions o{.max_nodes = 8, .label_count = 3, .attribute_dim = 2};
        const auto g = random_graph(rng, o);
        const auto g2 = random_graph(rng, o);
        for (std::size_t s = 0; s <= 3; ++s) {
            const auto dirac_fast = graphhopper_kernel(g, g2, s, NodeKernelSpec::dirac());
            const auto dirac_slow = kernel_bruteforce(g, g2, s, NodeKernelSpec::dirac());
            ASSERT_EQ(dirac_fast, dirac_slow) << "trial " << trial << " s " << s;
            ASSERT_EQ(dirac_fast, std::floor(dirac_fast));
            for (const auto& spec : {gaussian, product}) {
                const auto fast = graphhopper_kernel(g, g2, s, spec);
                const auto slow = kernel_bruteforce(g, g2, s, spec);
                ASSERT_LE(relative_gap(fast, slow), 1e-9) << "trial " << trial << " s " << s;
            }
        }
    }
}

TEST(GraphHopper, Symmetric) {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        const testing_support::RandomGraphOptions o{.max_nodes = 10, .attribute_dim = 3};
        const auto g = random_graph(rng, o);
        const auto g2 = random_graph(rng, o);
        for (const auto& spec : {NodeKernelSpec::dirac(), NodeKernelSpec::product(1.0 / 3.0)}) {
            const auto x = graphhopper_kernel(g, g2, 2, spec);
            const auto y = graphhopper_kernel(g2, g, 2, spec);
            EXPECT_LE(std::abs(x - y), 1e-12 * std::max(1.0, std::abs(x)));
        }
    }
}

TEST(GraphHopper, GapFreeRouteAgreesBitForBit) {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 50; ++trial) {
        const testing_support::RandomGraphOptions o{.max_nodes = 12, .attribute_dim = 2, .unit_lengths = trial % 2 == 0};
        const auto g = random_graph(rng, o);
        const auto g2 = random_graph(rng, o);
        EXPECT_EQ(hop_count_matrices(g, 0).entries, hop_count_matrices_gap_free(g).entries);
        for (const auto& spec : {NodeKernelSpec::dirac(), NodeKernelSpec::gaussian(0.5), NodeKernelSpec::product(0.5)}) {
            EXPECT_EQ(graphhopper_kernel(g, g2, 0, spec), graphhopper_kernel_gap_free(g, g2, spec));
        }
    }
}

TEST(GraphHopper, NonDecreasingInGapSizeForConstantLabels) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        const testing_support::RandomGraphOptions o{.max_nodes = 10, .label_count = 1};
        const auto g = random_graph(rng, o);
        const auto g2 = random_graph(rng, o);
        double previous = 0.0;
        for (std::size_t s = 0; s <= 3; ++s) {
            const auto k = graphhopper_kernel(g, g2, s, NodeKernelSpec::dirac());
            EXPECT_GE(k, previous);
            previous = k;
        }
    }
}
