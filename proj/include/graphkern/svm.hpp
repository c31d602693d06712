#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphkern/error.hpp"

namespace graphkern {

struct SvmParams {
    double c = 1.0;
    // stop when the maximal KKT violation m(a) - M(a) drops below this
    double tolerance = 1e-3;
    // added to the kernel diagonal while training
    double diagonal_jitter = 1e-8;
    // 0 selects max(10^7, 100 l)
    std::size_t max_iterations = 0;
};

/// Solution of the binary C-SVC dual
///   min 1/2 a'Qa - e'a   s.t. 0 <= a_i <= C, y'a = 0,   Q_ij = y_i y_j K_ij.
struct DualSolution {
    std::vector<double> alpha;
    double rho = 0.0;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// SMO with second-order working set selection (as in LibSVM, without
/// shrinking or caching: the kernel matrix is already dense in memory).
inline DualSolution solve_dual(const Eigen::MatrixXd& kernel, std::span<const int> y, const SvmParams& params) {
    const auto l = y.size();
    if (static_cast<std::size_t>(kernel.rows()) != l || static_cast<std::size_t>(kernel.cols()) != l) {
        throw ConfigError("kernel matrix size does not match the label count");
    }
    if (!(params.c > 0.0)) {
        throw ConfigError("SVM c must be positive");
    }
    constexpr double tau = 1e-12;
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double c = params.c;
    const auto K = [&](std::size_t i, std::size_t j) {
        return kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    };
    const auto Q = [&](std::size_t i, std::size_t j) {
        return static_cast<double>(y[i] * y[j]) * K(i, j) + (i == j ? params.diagonal_jitter : 0.0);
    };

    DualSolution sol;
    sol.alpha.assign(l, 0.0);
    std::vector<double> grad(l, -1.0);
    std::vector<double> qd(l);
    for (std::size_t i = 0; i < l; ++i) {
        qd[i] = Q(i, i);
    }
    auto& alpha = sol.alpha;
    const auto at_upper = [&](std::size_t t) { return alpha[t] >= c; };
    const auto at_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

    const std::size_t max_iter =
        params.max_iterations != 0 ? params.max_iterations : std::max<std::size_t>(10'000'000, 100 * l);

    while (sol.iterations < max_iter) {
        // i: maximal violator among I_up
        double gmax = -inf;
        std::size_t i = l;
        for (std::size_t t = 0; t < l; ++t) {
            if (y[t] == +1) {
                if (!at_upper(t) && -grad[t] >= gmax) {
                    gmax = -grad[t];
                    i = t;
                }
            } else if (!at_lower(t) && grad[t] >= gmax) {
                gmax = grad[t];
                i = t;
            }
        }
        // j: second-order choice among I_low
        double gmax2 = -inf;
        double best_obj = inf;
        std::size_t j = l;
        for (std::size_t t = 0; t < l; ++t) {
            if (y[t] == +1) {
                if (!at_lower(t)) {
                    const double grad_diff = gmax + grad[t];
                    gmax2 = std::max(gmax2, grad[t]);
                    if (grad_diff > 0.0 && i < l) {
                        const double quad = qd[i] + qd[t] - 2.0 * y[i] * Q(i, t);
                        const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : tau);
                        if (obj <= best_obj) {
                            best_obj = obj;
                            j = t;
                        }
                    }
                }
            } else if (!at_upper(t)) {
                const double grad_diff = gmax - grad[t];
                gmax2 = std::max(gmax2, -grad[t]);
                if (grad_diff > 0.0 && i < l) {
                    const double quad = qd[i] + qd[t] + 2.0 * y[i] * Q(i, t);
                    const double obj = -(grad_diff * grad_diff) / (quad > 0.0 ? quad : tau);
                    if (obj <= best_obj) {
                        best_obj = obj;
                        j = t;
                    }
                }
            }
        }
        if (gmax + gmax2 < params.tolerance || j == l || i == l) {
            sol.converged = true;
            break;
        }
        ++sol.iterations;

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        const double qij = Q(i, j);
        if (y[i] != y[j]) {
            double quad = qd[i] + qd[j] + 2.0 * qij;
            if (quad <= 0.0) {
                quad = tau;
            }
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = qd[i] + qd[j] - 2.0 * qij;
            if (quad <= 0.0) {
                quad = tau;
            }
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < l; ++t) {
            grad[t] += Q(t, i) * di + Q(t, j) * dj;
        }
    }

    // rho: mean y*G over free variables, else midpoint of the feasible interval
    double ub = inf;
    double lb = -inf;
    double sum_free = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < l; ++t) {
        const double yg = y[t] * grad[t];
        if (at_upper(t)) {
            if (y[t] == -1) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else if (at_lower(t)) {
            if (y[t] == +1) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else {
            ++free_count;
            sum_free += yg;
        }
    }
    sol.rho = free_count > 0 ? sum_free / static_cast<double>(free_count) : (ub + lb) / 2.0;

    double objective = 0.0;
    for (std::size_t t = 0; t < l; ++t) {
        objective += alpha[t] * (grad[t] - 1.0);
    }
    sol.objective = objective / 2.0;
    return sol;
}

/// Dual objective 1/2 a'Qa - e'a evaluated directly (jitter included).
inline double dual_objective(const Eigen::MatrixXd& kernel, std::span<const int> y, std::span<const double> alpha,
                             double diagonal_jitter) {
    const auto l = y.size();
    double quad = 0.0;
    double linear = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
        linear += alpha[i];
        for (std::size_t j = 0; j < l; ++j) {
            quad += alpha[i] * alpha[j] * y[i] * y[j] *
                    (kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +
                     (i == j ? diagonal_jitter : 0.0));
        }
    }
    return 0.5 * quad - linear;
}

struct BinaryMachine {
    int positive = 0;  // class voted for when the decision value is > 0
    int negative = 0;
    std::vector<std::size_t> support;  // indices into the training set
    std::vector<double> coef;          // alpha_i * y_i
    double rho = 0.0;
    DualSolution solution;
};

/// One-vs-one C-SVC over a precomputed kernel. `classes` is sorted; machine
/// (a, b) with a < b votes for a on a positive decision value.
struct SvmModel {
    std::vector<int> classes;
    std::vector<BinaryMachine> machines;

    bool converged() const noexcept {
        return std::all_of(machines.begin(), machines.end(),
                           [](const BinaryMachine& m) { return m.solution.converged; });
    }
    std::size_t nonconverged() const noexcept {
        return static_cast<std::size_t>(std::count_if(
            machines.begin(), machines.end(), [](const BinaryMachine& m) { return !m.solution.converged; }));
    }
};

inline SvmModel svm_train(const Eigen::MatrixXd& kernel, std::span<const int> labels, const SvmParams& params) {
    if (static_cast<std::size_t>(kernel.rows()) != labels.size() || kernel.rows() != kernel.cols()) {
        throw ConfigError("training kernel must be square with one row per label");
    }
    if (labels.empty()) {
        throw DataError("cannot train an SVM on an empty training set");
    }
    SvmModel model;
    model.classes.assign(labels.begin(), labels.end());
    std::sort(model.classes.begin(), model.classes.end());
    model.classes.erase(std::unique(model.classes.begin(), model.classes.end()), model.classes.end());

    for (std::size_t a = 0; a < model.classes.size(); ++a) {
        for (std::size_t b = a + 1; b < model.classes.size(); ++b) {
            BinaryMachine m;
            m.positive = model.classes[a];
            m.negative = model.classes[b];
            std::vector<std::size_t> index;
            std::vector<int> y;
            for (std::size_t t = 0; t < labels.size(); ++t) {
                if (labels[t] == m.positive || labels[t] == m.negative) {
                    index.push_back(t);
                    y.push_back(labels[t] == m.positive ? +1 : -1);
                }
            }
            Eigen::MatrixXd sub(static_cast<Eigen::Index>(index.size()), static_cast<Eigen::Index>(index.size()));
            for (std::size_t i = 0; i < index.size(); ++i) {
                for (std::size_t j = 0; j < index.size(); ++j) {
                    sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                        kernel(static_cast<Eigen::Index>(index[i]), static_cast<Eigen::Index>(index[j]));
                }
            }
            m.solution = solve_dual(sub, y, params);
            m.rho = m.solution.rho;
            for (std::size_t i = 0; i < index.size(); ++i) {
                if (m.solution.alpha[i] > 0.0) {
                    m.support.push_back(index[i]);
                    m.coef.push_back(m.solution.alpha[i] * y[i]);
                }
            }
            model.machines.push_back(std::move(m));
        }
    }
    return model;
}

/// `kernel` holds k(test_i, train_j) with columns in training order.
inline std::vector<int> svm_predict(const SvmModel& model, const Eigen::MatrixXd& kernel) {
    const auto rows = static_cast<std::size_t>(kernel.rows());
    std::vector<int> out(rows, model.classes.empty() ? 0 : model.classes.front());
    if (model.classes.size() <= 1) {
        return out;
    }
    std::map<int, std::size_t> position;
    for (std::size_t i = 0; i < model.classes.size(); ++i) {
        position[model.classes[i]] = i;
    }
    std::vector<std::size_t> votes(model.classes.size());
    for (std::size_t r = 0; r < rows; ++r) {
        std::fill(votes.begin(), votes.end(), 0);
        for (const auto& m : model.machines) {
            double decision = -m.rho;
            for (std::size_t s = 0; s < m.support.size(); ++s) {
                decision += m.coef[s] * kernel(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m.support[s]));
            }
            ++votes[position[decision > 0.0 ? m.positive : m.negative]];
        }
        // ties go to the smallest class
        const auto best = std::max_element(votes.begin(), votes.end());
        out[r] = model.classes[static_cast<std::size_t>(best - votes.begin())];
    }
    return out;
}

} // namespace graphkern
