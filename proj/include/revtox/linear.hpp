#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "revtox/vectorizer.hpp"

namespace revtox {

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;

    double margin(const FeatureVector& x) const {
        double m = bias;
        for (std::size_t j = 0; j < x.indices.size(); ++j)
            m += weights[x.indices[j]] * x.values[j];
        return m;
    }
};

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

namespace detail {

inline double log1p_exp(double z) {
    // log(1 + e^z) without overflow
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

}  // namespace detail

/// Mean regularized logistic loss:
///   L(w,b) = (1/n) sum log(1 + exp(-s_i (w.x_i + b))) + (l2/(2n)) |w|^2
/// with s_i = 2 y_i - 1. The bias is not regularized.
inline double logistic_loss(const std::vector<FeatureVector>& rows, const std::vector<int>& y,
                            const LinearModel& model, double l2) {
    double n = static_cast<double>(rows.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double s = y[i] == 1 ? 1.0 : -1.0;
        loss += detail::log1p_exp(-s * model.margin(rows[i]));
    }
    double reg = 0.0;
    for (double w : model.weights) reg += w * w;
    return loss / n + (l2 / (2.0 * n)) * reg;
}

/// Gradient of logistic_loss; grad.weights matches the weight vector, the
/// returned double is d/d(bias).
inline double logistic_gradient(const std::vector<FeatureVector>& rows, const std::vector<int>& y,
                                const LinearModel& model, double l2,
                                std::vector<double>& grad_w) {
    double n = static_cast<double>(rows.size());
    grad_w.assign(model.weights.size(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double s = y[i] == 1 ? 1.0 : -1.0;
        double coeff = -s * sigmoid(-s * model.margin(rows[i])) / n;
        const auto& x = rows[i];
        for (std::size_t j = 0; j < x.indices.size(); ++j)
            grad_w[x.indices[j]] += coeff * x.values[j];
        grad_b += coeff;
    }
    for (std::size_t f = 0; f < grad_w.size(); ++f)
        grad_w[f] += (l2 / n) * model.weights[f];
    return grad_b;
}

/// Full-batch gradient descent with Armijo backtracking. Deterministic:
/// no RNG is involved.
inline LinearModel train_logistic(const std::vector<FeatureVector>& rows,
                                  const std::vector<int>& y, std::uint32_t dim, double l2,
                                  std::uint32_t max_iters, double tol = 1e-7) {
    LinearModel model;
    model.weights.assign(dim, 0.0);
    std::vector<double> grad_w;
    double loss = logistic_loss(rows, y, model, l2);
    double step = 1.0;
    for (std::uint32_t iter = 0; iter < max_iters; ++iter) {
        double grad_b = logistic_gradient(rows, y, model, l2, grad_w);
        double grad_sq = grad_b * grad_b;
        double grad_inf = std::fabs(grad_b);
        for (double g : grad_w) {
            grad_sq += g * g;
            grad_inf = std::max(grad_inf, std::fabs(g));
        }
        if (grad_inf < tol) break;

        step = std::min(step * 2.0, 1e6);
        LinearModel trial = model;
        bool advanced = false;
        while (step >= 1e-16) {
            for (std::size_t f = 0; f < dim; ++f)
                trial.weights[f] = model.weights[f] - step * grad_w[f];
            trial.bias = model.bias - step * grad_b;
            double trial_loss = logistic_loss(rows, y, trial, l2);
            if (trial_loss <= loss - 0.5 * step * grad_sq) {
                model = trial;
                loss = trial_loss;
                advanced = true;
                break;
            }
            step *= 0.5;
        }
        if (!advanced) break;  // no step improves: numerically converged
    }
    return model;
}

/// Linear SVM trained by deterministic full-batch subgradient descent on
/// the hinge loss (Pegasos-style schedule with lambda = 1/(C n), including
/// the projection onto the |w| <= 1/sqrt(lambda) ball). The intercept is
/// folded in as a regularized constant feature, matching the common
/// liblinear-style treatment.
inline LinearModel train_svm(const std::vector<FeatureVector>& rows, const std::vector<int>& y,
                             std::uint32_t dim, double c, std::uint32_t max_iters) {
    std::vector<double> w(dim + 1, 0.0);  // slot dim is the intercept
    double n = static_cast<double>(rows.size());
    double lambda = 1.0 / (c * n);
    double limit = 1.0 / std::sqrt(lambda);
    std::vector<double> grad(dim + 1);
    for (std::uint32_t t = 1; t <= max_iters; ++t) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double s = y[i] == 1 ? 1.0 : -1.0;
            const auto& x = rows[i];
            double margin = w[dim];
            for (std::size_t j = 0; j < x.indices.size(); ++j)
                margin += w[x.indices[j]] * x.values[j];
            if (s * margin < 1.0) {
                for (std::size_t j = 0; j < x.indices.size(); ++j)
                    grad[x.indices[j]] -= s * x.values[j] / n;
                grad[dim] -= s / n;
            }
        }
        double eta = 1.0 / (lambda * static_cast<double>(t));
        double shrink = 1.0 - 1.0 / static_cast<double>(t);
        double norm_sq = 0.0;
        for (std::size_t f = 0; f <= dim; ++f) {
            w[f] = shrink * w[f] - eta * grad[f];
            norm_sq += w[f] * w[f];
        }
        if (norm_sq > limit * limit) {
            double scale = limit / std::sqrt(norm_sq);
            for (double& v : w) v *= scale;
        }
    }
    LinearModel model;
    model.bias = w[dim];
    w.pop_back();
    model.weights = std::move(w);
    return model;
}

}  // namespace revtox
