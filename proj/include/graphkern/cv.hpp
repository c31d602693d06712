#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphkern/error.hpp"
#include "graphkern/gram.hpp"
#include "graphkern/parallel.hpp"
#include "graphkern/rng.hpp"
#include "graphkern/svm.hpp"

namespace graphkern {

/// c in {1e-9, 1e-7, ..., 1e9}.
inline std::vector<double> default_c_grid() {
    std::vector<double> grid;
    for (int e = -9; e <= 9; e += 2) {
        grid.push_back(std::pow(10.0, e));
    }
    return grid;
}

struct CvProtocol {
    std::size_t outer_folds = 10;
    std::size_t inner_folds = 10;
    std::size_t repetitions = 10;
    std::vector<double> c_grid = default_c_grid();
    // gap sizes for GraphHopper (or the single WL depth); keys of the Gram map
    std::vector<int> param_grid = {0, 1, 2, 3, 4, 5};
    // repetition r derives all of its randomness from seed + r
    std::uint64_t seed = 0;
    SvmParams svm;
};

struct FoldSelection {
    std::size_t repetition = 0;
    std::size_t fold = 0;
    int param = 0;
    double c = 0.0;
    double inner_accuracy = 0.0;
    double test_accuracy = 0.0;
};

struct CvResult {
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // sample std over repetitions (0 for one repetition)
    std::vector<double> repetition_accuracy;
    std::vector<FoldSelection> selections;  // ordered by (repetition, fold)
    std::size_t nonconverged_fits = 0;
};

/// Stratified fold assignment: each class is shuffled separately, then the
/// classes (in ascending label order) are dealt round-robin into k folds with
/// one running counter, which keeps fold sizes within one of each other.
inline std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
    if (k == 0) {
        throw ConfigError("fold count must be positive");
    }
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        by_class[labels[i]].push_back(i);
    }
    Rng rng(seed);
    std::vector<std::size_t> fold(labels.size());
    std::size_t counter = 0;
    for (auto& [label, members] : by_class) {
        shuffle(members, rng);
        for (const auto i : members) {
            fold[i] = counter++ % k;
        }
    }
    return fold;
}

namespace detail {

inline void split_by_fold(std::span<const std::size_t> fold, std::size_t f, std::vector<std::size_t>& train,
                          std::vector<std::size_t>& test) {
    train.clear();
    test.clear();
    for (std::size_t i = 0; i < fold.size(); ++i) {
        (fold[i] == f ? test : train).push_back(i);
    }
}

inline std::vector<int> pick(std::span<const int> labels, std::span<const std::size_t> index) {
    std::vector<int> out;
    out.reserve(index.size());
    for (const auto i : index) {
        out.push_back(labels[i]);
    }
    return out;
}

inline std::vector<std::size_t> compose(std::span<const std::size_t> outer, std::span<const std::size_t> inner) {
    std::vector<std::size_t> out;
    out.reserve(inner.size());
    for (const auto i : inner) {
        out.push_back(outer[i]);
    }
    return out;
}

inline void require_all_classes(std::span<const int> all_labels, std::span<const int> train_labels,
                                const std::string& where) {
    const std::set<int> present(train_labels.begin(), train_labels.end());
    for (const int c : all_labels) {
        if (!present.count(c)) {
            throw DataError("degenerate fold (" + where + "): class " + std::to_string(c) +
                            " absent from the training portion");
        }
    }
}

struct FitOutcome {
    double accuracy = 0.0;
    std::size_t nonconverged = 0;
};

inline FitOutcome fit_and_score(const Eigen::MatrixXd& values, std::span<const int> labels,
                                std::span<const std::size_t> train, std::span<const std::size_t> test,
                                const SvmParams& params) {
    const auto train_labels = pick(labels, train);
    const auto model = svm_train(submatrix(values, train, train), train_labels, params);
    const auto predicted = svm_predict(model, submatrix(values, test, train));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        correct += predicted[i] == labels[test[i]];
    }
    FitOutcome out;
    out.accuracy = test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test.size());
    out.nonconverged = model.nonconverged();
    return out;
}

} // namespace detail

/// Fills mean_accuracy and std_accuracy from repetition_accuracy.
inline void summarize(CvResult& result) {
    const auto reps = result.repetition_accuracy.size();
    result.mean_accuracy = 0.0;
    result.std_accuracy = 0.0;
    if (reps == 0) {
        return;
    }
    double sum = 0.0;
    for (const double a : result.repetition_accuracy) {
        sum += a;
    }
    result.mean_accuracy = sum / static_cast<double>(reps);
    if (reps > 1) {
        double sq = 0.0;
        for (const double a : result.repetition_accuracy) {
            sq += (a - result.mean_accuracy) * (a - result.mean_accuracy);
        }
        result.std_accuracy = std::sqrt(sq / static_cast<double>(reps - 1));
    }
}

/// Concatenates single-repetition results (run with seeds seed, seed + 1, ...)
/// into the result a multi-repetition run with base seed `seed` reports.
inline CvResult merge_repetitions(const std::vector<CvResult>& parts) {
    CvResult merged;
    for (std::size_t r = 0; r < parts.size(); ++r) {
        if (parts[r].repetition_accuracy.size() != 1) {
            throw ConfigError("merge_repetitions expects single-repetition results");
        }
        merged.repetition_accuracy.push_back(parts[r].repetition_accuracy.front());
        merged.nonconverged_fits += parts[r].nonconverged_fits;
        for (auto s : parts[r].selections) {
            s.repetition = r;
            merged.selections.push_back(s);
        }
    }
    summarize(merged);
    return merged;
}

/// Plain k-fold accuracy for a fixed fold assignment and c (mean over folds).
inline double cross_validate(const Eigen::MatrixXd& values, std::span<const int> labels,
                             std::span<const std::size_t> fold, std::size_t k, const SvmParams& params) {
    std::vector<std::size_t> train, test;
    double total = 0.0;
    for (std::size_t f = 0; f < k; ++f) {
        detail::split_by_fold(fold, f, train, test);
        detail::require_all_classes(labels, detail::pick(labels, train), "fold " + std::to_string(f));
        total += detail::fit_and_score(values, labels, train, test, params).accuracy;
    }
    return total / static_cast<double>(k);
}

/// Outer fold assignment used by nested_cv for repetition r.
inline std::vector<std::size_t> outer_fold_assignment(std::span<const int> labels, const CvProtocol& protocol,
                                                      std::size_t repetition) {
    return stratified_folds(labels, protocol.outer_folds, stream_seed(protocol.seed + repetition, 0));
}

/// Nested cross-validation: for every repetition and outer fold, a grid search
/// over (param, c) by inner k-fold CV on the outer training part, then a refit
/// with the best pair scored on the outer test fold. Ties prefer the smaller
/// param, then the smaller c. Work is spread over (repetition, fold) tasks.
inline CvResult nested_cv(const std::map<int, GramMatrix>& grams, std::span<const int> labels,
                          const CvProtocol& protocol, unsigned threads = 1) {
    if (protocol.param_grid.empty() || protocol.c_grid.empty()) {
        throw ConfigError("parameter grids must be non-empty");
    }
    if (protocol.repetitions == 0 || protocol.outer_folds < 2 || protocol.inner_folds < 2) {
        throw ConfigError("need at least one repetition and two folds");
    }
    std::vector<int> params(protocol.param_grid);
    std::sort(params.begin(), params.end());
    params.erase(std::unique(params.begin(), params.end()), params.end());
    std::vector<double> cs(protocol.c_grid);
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    for (const int p : params) {
        const auto it = grams.find(p);
        if (it == grams.end()) {
            throw ConfigError("no Gram matrix for grid value " + std::to_string(p));
        }
        if (!it->second.normalized) {
            throw ConfigError("nested_cv expects normalised Gram matrices");
        }
        if (it->second.size() != labels.size()) {
            throw ConfigError("Gram matrix size does not match the label count");
        }
    }

    const auto tasks = protocol.repetitions * protocol.outer_folds;
    std::vector<FoldSelection> selections(tasks);
    std::vector<std::size_t> nonconverged(tasks, 0);
    std::vector<std::vector<std::size_t>> outer(protocol.repetitions);
    for (std::size_t r = 0; r < protocol.repetitions; ++r) {
        outer[r] = outer_fold_assignment(labels, protocol, r);
    }

    parallel_for(tasks, threads, [&](std::size_t task) {
        const auto r = task / protocol.outer_folds;
        const auto f = task % protocol.outer_folds;
        std::vector<std::size_t> train, test;
        detail::split_by_fold(outer[r], f, train, test);
        const auto train_labels = detail::pick(labels, train);
        detail::require_all_classes(labels, train_labels,
                                    "repetition " + std::to_string(r) + ", outer fold " + std::to_string(f));

        const auto inner =
            stratified_folds(train_labels, protocol.inner_folds, stream_seed(protocol.seed + r, f + 1));
        std::vector<std::vector<std::size_t>> inner_train(protocol.inner_folds), inner_test(protocol.inner_folds);
        for (std::size_t g = 0; g < protocol.inner_folds; ++g) {
            std::vector<std::size_t> a, b;
            detail::split_by_fold(inner, g, a, b);
            detail::require_all_classes(train_labels, detail::pick(train_labels, a),
                                        "repetition " + std::to_string(r) + ", outer fold " + std::to_string(f) +
                                            ", inner fold " + std::to_string(g));
            inner_train[g] = detail::compose(train, a);
            inner_test[g] = detail::compose(train, b);
        }

        FoldSelection best;
        best.repetition = r;
        best.fold = f;
        best.inner_accuracy = -1.0;
        SvmParams svm = protocol.svm;
        for (const int p : params) {
            const auto& values = grams.at(p).values;
            for (const double c : cs) {
                svm.c = c;
                double acc = 0.0;
                for (std::size_t g = 0; g < protocol.inner_folds; ++g) {
                    const auto outcome = detail::fit_and_score(values, labels, inner_train[g], inner_test[g], svm);
                    acc += outcome.accuracy;
                    nonconverged[task] += outcome.nonconverged;
                }
                acc /= static_cast<double>(protocol.inner_folds);
                if (acc > best.inner_accuracy) {
                    best.inner_accuracy = acc;
                    best.param = p;
                    best.c = c;
                }
            }
        }
        svm.c = best.c;
        const auto outcome = detail::fit_and_score(grams.at(best.param).values, labels, train, test, svm);
        best.test_accuracy = outcome.accuracy;
        nonconverged[task] += outcome.nonconverged;
        selections[task] = best;
    });

    CvResult result;
    result.selections = std::move(selections);
    result.repetition_accuracy.assign(protocol.repetitions, 0.0);
    for (const auto& s : result.selections) {
        result.repetition_accuracy[s.repetition] += s.test_accuracy;
    }
    for (auto& a : result.repetition_accuracy) {
        a /= static_cast<double>(protocol.outer_folds);
    }
    for (const auto n : nonconverged) {
        result.nonconverged_fits += n;
    }
    summarize(result);
    return result;
}

} // namespace graphkern
