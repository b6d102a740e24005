#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "veristyle/error.hpp"

// Binary logistic regression trained by full-batch gradient descent on the
// mean cross-entropy objective. Features are standardized internally; the
// step size backs off when the objective worsens. Convergence: gradient
// max-norm below tol or the epoch cap.

namespace veristyle::ml {

struct LogisticModel {
    std::vector<double> weights;  // in standardized feature space
    double bias = 0.0;
    std::vector<double> means;
    std::vector<double> sds;
    int epochs_run = 0;
    bool converged = false;

    double predict_proba(const std::vector<double>& row) const {
        double z = bias;
        for (std::size_t j = 0; j < weights.size(); ++j)
            z += weights[j] * ((row[j] - means[j]) / sds[j]);
        return 1.0 / (1.0 + std::exp(-z));
    }

    int predict(const std::vector<double>& row) const { return predict_proba(row) > 0.5 ? 1 : 0; }
};

inline LogisticModel train_logistic(const std::vector<std::vector<double>>& X,
                                    const std::vector<int>& y, double l2 = 0.0,
                                    double tol = 1e-6, int max_epochs = 10000) {
    if (X.empty()) throw EmptyMatrix();
    if (X.size() != y.size()) throw LengthMismatch("train_logistic: labels do not match rows");
    const std::size_t n = X.size(), p = X.front().size();

    LogisticModel model;
    model.means.assign(p, 0.0);
    model.sds.assign(p, 1.0);
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (const auto& row : X) s += row[j];
        model.means[j] = s / static_cast<double>(n);
        double ss = 0.0;
        for (const auto& row : X) {
            const double d = row[j] - model.means[j];
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n));
        model.sds[j] = sd > 1e-12 ? sd : 1.0;
    }

    std::vector<std::vector<double>> Z(n, std::vector<double>(p));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) Z[i][j] = (X[i][j] - model.means[j]) / model.sds[j];

    model.weights.assign(p, 0.0);
    std::vector<double> grad_w(p, 0.0);
    auto objective = [&](const std::vector<double>& w, double b) {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = b;
            for (std::size_t j = 0; j < p; ++j) z += w[j] * Z[i][j];
            // log(1 + exp(-margin)) stated stably
            const double margin = y[i] == 1 ? z : -z;
            loss += margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
        }
        loss /= static_cast<double>(n);
        if (l2 > 0.0)
            for (double wj : w) loss += 0.5 * l2 * wj * wj;
        return loss;
    };

    double lr = 1.0;
    double current = objective(model.weights, model.bias);
    for (int epoch = 0; epoch < max_epochs; ++epoch) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double z = model.bias;
            for (std::size_t j = 0; j < p; ++j) z += model.weights[j] * Z[i][j];
            const double err = 1.0 / (1.0 + std::exp(-z)) - static_cast<double>(y[i]);
            for (std::size_t j = 0; j < p; ++j) grad_w[j] += err * Z[i][j];
            grad_b += err;
        }
        for (auto& g : grad_w) g /= static_cast<double>(n);
        grad_b /= static_cast<double>(n);
        if (l2 > 0.0)
            for (std::size_t j = 0; j < p; ++j) grad_w[j] += l2 * model.weights[j];

        double max_norm = std::fabs(grad_b);
        for (double g : grad_w) max_norm = std::max(max_norm, std::fabs(g));
        model.epochs_run = epoch + 1;
        if (max_norm < tol) {
            model.converged = true;
            break;
        }

        while (true) {
            std::vector<double> w_next = model.weights;
            for (std::size_t j = 0; j < p; ++j) w_next[j] -= lr * grad_w[j];
            const double b_next = model.bias - lr * grad_b;
            const double next = objective(w_next, b_next);
            if (next <= current + 1e-15 || lr < 1e-8) {
                model.weights = std::move(w_next);
                model.bias = b_next;
                current = next;
                break;
            }
            lr *= 0.5;
        }
        lr = std::min(lr * 1.05, 64.0);
    }
    return model;
}

}
