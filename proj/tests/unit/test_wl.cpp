#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "graphkern/wl.hpp"
#include "test_support.hpp"

using namespace graphkern;
using testing_support::chain;
using testing_support::random_graph;

namespace {

// Naive refinement with nested strings as labels: a node's label at step t
// spells out its whole depth-t unfolding tree, so equal strings mean equal
// subtree patterns without any shared dictionary.
std::vector<std::map<std::string, std::uint64_t>> string_features(const Graph& g, int h) {
    std::vector<std::string> label(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) {
        label[v] = std::to_string(g.label(v));
    }
    std::vector<std::map<std::string, std::uint64_t>> out;
    for (int t = 0; t <= h; ++t) {
        if (t > 0) {
            std::vector<std::string> next(g.node_count());
            for (NodeId v = 0; v < g.node_count(); ++v) {
                std::vector<std::string> around;
                for (const auto& nb : g.neighbors(v)) {
                    around.push_back(label[nb.node]);
                }
                std::sort(around.begin(), around.end());
                next[v] = "(" + label[v] + ":";
                for (const auto& s : around) {
                    next[v] += s + ",";
                }
                next[v] += ")";
            }
            label = std::move(next);
        }
        std::map<std::string, std::uint64_t> counts;
        for (const auto& l : label) {
            ++counts[l];
        }
        out.push_back(std::move(counts));
    }
    return out;
}

double string_kernel(const Graph& g, const Graph& g2, int h) {
    const auto a = string_features(g, h);
    const auto b = string_features(g2, h);
    double total = 0.0;
    for (int t = 0; t <= h; ++t) {
        for (const auto& [label, count] : a[t]) {
            if (const auto it = b[t].find(label); it != b[t].end()) {
                total += static_cast<double>(count * it->second);
            }
        }
    }
    return total;
}

} // namespace

TEST(WlRelabel, ChainDegreeLabelsSplitInTwo) {
    const std::vector<Graph> graphs{chain(std::vector<Label>{1, 2, 2, 1})};
    const auto f = wl_relabel(graphs, 1);
    ASSERT_EQ(f[0].iterations.size(), 2u);
    const auto& it1 = f[0].iterations[1];
    ASSERT_EQ(it1.size(), 2u);
    EXPECT_EQ(it1[0].second, 2u);
    EXPECT_EQ(it1[1].second, 2u);
}

TEST(WlRelabel, SingleNodeKeepsOneLabel) {
    const std::vector<Graph> graphs{Graph(std::vector<std::vector<Neighbor>>(1), std::vector<Label>{7})};
    const auto f = wl_relabel(graphs, 2);
    ASSERT_EQ(f[0].iterations.size(), 3u);
    for (const auto& hist : f[0].iterations) {
        ASSERT_EQ(hist.size(), 1u);
        EXPECT_EQ(hist[0].second, 1u);
    }
}

TEST(WlRelabel, PermutationInvariant) {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 50; ++trial) {
        const auto g = random_graph(rng, {.max_nodes = 10});
        std::vector<NodeId> perm(g.node_count());
        std::iota(perm.begin(), perm.end(), NodeId{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        const std::vector<Graph> graphs{g, testing_support::permuted(g, perm)};
        const auto f = wl_relabel(graphs, 4);
        EXPECT_EQ(f[0].iterations, f[1].iterations);
    }
}

TEST(WlRelabel, IndependentOfThreadCount) {
    std::mt19937_64 rng(73);
    std::vector<Graph> graphs;
    for (int i = 0; i < 40; ++i) {
        graphs.push_back(random_graph(rng, {.max_nodes = 12}));
    }
    const auto one = wl_relabel(graphs, 5, 1);
    const auto many = wl_relabel(graphs, 5, 4);
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        EXPECT_EQ(one[i].iterations, many[i].iterations);
    }
}

TEST(WlRelabel, RequiresLabels) {
    const std::vector<Graph> graphs{chain()};
    EXPECT_THROW(wl_relabel(graphs, 2), DataError);
    EXPECT_THROW(wl_relabel(std::vector<Graph>{chain(std::vector<Label>(4, 0))}, -1), ConfigError);
}

TEST(WlKernel, DisjointAlphabetsGiveZero) {
    const std::vector<Graph> graphs{chain(std::vector<Label>(4, 0)), chain(std::vector<Label>(4, 1))};
    const auto f = wl_relabel(graphs, 3);
    EXPECT_EQ(wl_kernel(f[0], f[1]), 0.0);
}

TEST(WlKernel, ConstantCycle) {
    const int h = 5;
    const std::size_t n = 6;
    const std::vector<Graph> graphs{testing_support::cycle(n, 3)};
    const auto f = wl_relabel(graphs, h);
    EXPECT_EQ(wl_kernel(f[0], f[0]), static_cast<double>((h + 1) * n * n));
}

TEST(WlKernel, SelfSimilarityAtLeastNodeCount) {
    std::mt19937_64 rng(79);
    std::vector<Graph> graphs;
    for (int i = 0; i < 30; ++i) {
        graphs.push_back(random_graph(rng, {.max_nodes = 10}));
    }
    const auto f = wl_relabel(graphs, 3);
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        EXPECT_GE(wl_kernel(f[i], f[i]), static_cast<double>(graphs[i].node_count()));
    }
}

TEST(WlKernel, MatchesStringRefinement) {
    std::mt19937_64 rng(83);
    std::vector<Graph> graphs;
    for (int i = 0; i < 40; ++i) {
        graphs.push_back(random_graph(rng, {.max_nodes = 8, .label_count = 2}));
    }
    const int h = 3;
    const auto f = wl_relabel(graphs, h);
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        for (std::size_t j = i; j < graphs.size(); ++j) {
            ASSERT_EQ(wl_kernel(f[i], f[j]), string_kernel(graphs[i], graphs[j], h)) << i << " " << j;
        }
    }
}

TEST(WlKernel, GramIsPositiveSemidefinite) {
    std::mt19937_64 rng(89);
    std::vector<Graph> graphs;
    for (int i = 0; i < 40; ++i) {
        graphs.push_back(random_graph(rng, {.max_nodes = 12, .label_count = 3}));
    }
    const auto f = wl_relabel(graphs, 5);
    Eigen::MatrixXd k(graphs.size(), graphs.size());
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        for (std::size_t j = 0; j < graphs.size(); ++j) {
            k(i, j) = wl_kernel(f[i], f[j]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, Eigen::EigenvaluesOnly);
    EXPECT_GE(solver.eigenvalues().minCoeff(), -1e-8 * k.cwiseAbs().maxCoeff());
}

TEST(WlKernel, RejectsFeaturesFromDifferentRuns) {
    const std::vector<Graph> graphs{chain(std::vector<Label>(4, 0))};
    const auto a = wl_relabel(graphs, 1);
    const auto b = wl_relabel(graphs, 1);
    EXPECT_THROW(wl_kernel(a[0], b[0]), ConfigError);
}
