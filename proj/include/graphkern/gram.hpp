#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "graphkern/error.hpp"
#include "graphkern/graph.hpp"
#include "graphkern/graphhopper.hpp"
#include "graphkern/node_kernel.hpp"
#include "graphkern/parallel.hpp"
#include "graphkern/wl.hpp"

namespace graphkern {

struct GraphHopperParams {
    std::size_t gap_size = 0;
    NodeKernelSpec node_kernel;
};

struct WlParams {
    int iterations = default_wl_iterations;
};

using KernelChoice = std::variant<GraphHopperParams, WlParams>;

struct GramProvenance {
    std::string kernel;  // "gh" or "wl"
    std::size_t gap_size = 0;
    int wl_iterations = 0;
    std::string node_kernel;
    double bandwidth = 0.0;
    std::string dataset;
    double noise_fraction = 0.0;
    std::uint64_t seed = 0;
};

struct GramMatrix {
    Eigen::MatrixXd values;
    bool normalized = false;
    GramProvenance provenance;

    std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

inline GramProvenance describe(const KernelChoice& kernel, const Dataset& d) {
    GramProvenance p;
    p.dataset = d.meta.source;
    p.noise_fraction = d.meta.noise_fraction;
    p.seed = d.meta.seed;
    if (const auto* gh = std::get_if<GraphHopperParams>(&kernel)) {
        p.kernel = "gh";
        p.gap_size = gh->gap_size;
        p.node_kernel = to_string(gh->node_kernel.kind);
        p.bandwidth = gh->node_kernel.needs_attributes() ? gh->node_kernel.bandwidth : 0.0;
    } else {
        p.kernel = "wl";
        p.wl_iterations = std::get<WlParams>(kernel).iterations;
    }
    return p;
}

namespace detail {

template <class PairFn>
Eigen::MatrixXd fill_symmetric(std::size_t n, unsigned threads, PairFn&& pair_value) {
    Eigen::MatrixXd values(n, n);
    // upper-triangle pairs in row-major order, index -> (i, j)
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            pairs.emplace_back(i, j);
        }
    }
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const double v = pair_value(i, j);
        values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    });
    return values;
}

} // namespace detail

/// Unnormalised Gram matrix of a dataset. Per-graph work (DAGs and hop counts,
/// or WL histograms) runs once per graph; the pairwise stage fills the upper
/// triangle and mirrors it. Entries do not depend on the thread count.
inline GramMatrix gram(const Dataset& d, const KernelChoice& kernel, unsigned threads = 1) {
    const auto n = d.size();
    GramMatrix out;
    out.provenance = describe(kernel, d);

    if (const auto* gh = std::get_if<GraphHopperParams>(&kernel)) {
        for (const auto& g : d.graphs) {
            check_node_kernel_inputs(gh->node_kernel, g);
        }
        std::vector<HopCountMatrices> counts(n);
        parallel_for(n, threads, [&](std::size_t i) { counts[i] = hop_count_matrices(d.graphs[i], gh->gap_size); });
        out.values = detail::fill_symmetric(n, threads, [&](std::size_t i, std::size_t j) {
            return graphhopper_kernel(d.graphs[i], counts[i], d.graphs[j], counts[j], gh->node_kernel);
        });
    } else {
        const auto& wl = std::get<WlParams>(kernel);
        const auto features = wl_relabel(d, wl.iterations, threads);
        out.values = detail::fill_symmetric(
            n, threads, [&](std::size_t i, std::size_t j) { return wl_kernel(features[i], features[j]); });
    }
    return out;
}

/// k(G, G') / sqrt(k(G, G) k(G', G')); the diagonal is set to exactly 1.
inline GramMatrix normalize(const GramMatrix& m) {
    const auto n = m.values.rows();
    Eigen::VectorXd scale(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = m.values(i, i);
        if (!(d > 0.0)) {
            throw ComputeError("zero-diagonal: entry " + std::to_string(i) +
                               " has non-positive self-similarity; cannot normalise");
        }
        scale(i) = std::sqrt(d);
    }
    GramMatrix out = m;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            out.values(i, j) = i == j ? 1.0 : m.values(i, j) / (scale(i) * scale(j));
        }
    }
    out.normalized = true;
    return out;
}

inline double max_abs_entry(const GramMatrix& m) {
    return m.values.size() == 0 ? 0.0 : m.values.cwiseAbs().maxCoeff();
}

inline double max_asymmetry(const GramMatrix& m) {
    return m.values.size() == 0 ? 0.0 : (m.values - m.values.transpose()).cwiseAbs().maxCoeff();
}

/// Smallest eigenvalue via a dense symmetric eigensolve. Rejects matrices
/// whose asymmetry exceeds 1e-12 (absolute).
inline double check_psd(const GramMatrix& m) {
    if (m.values.rows() != m.values.cols()) {
        throw ComputeError("Gram matrix is not square");
    }
    if (m.values.size() == 0) {
        return 0.0;
    }
    if (max_asymmetry(m) > 1e-12) {
        throw ComputeError("Gram matrix asymmetric beyond 1e-12");
    }
    const Eigen::MatrixXd symmetric = 0.5 * (m.values + m.values.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ComputeError("symmetric eigensolve failed");
    }
    return solver.eigenvalues().minCoeff();
}

/// The block of `values` picked out by `rows` x `cols`, in the given order.
inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& values, std::span<const std::size_t> rows,
                                 std::span<const std::size_t> cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                values(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
        }
    }
    return out;
}

} // namespace graphkern
