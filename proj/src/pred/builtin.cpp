#include "trajadv/pred/builtin.hpp"

#include <algorithm>
#include <cmath>

namespace trajadv::pred {

namespace {

Vec2 window_velocity(const std::vector<Vec2>& history, double dt) {
    if (history.size() < 2) return {0.0, 0.0};
    return (history.back() - history.front()) /
           (static_cast<double>(history.size() - 1) * dt);
}

}  // namespace

Prediction ConstantVelocityPredictor::predict(const PredictionRequest& req) const {
    validate(req);
    Prediction out;
    out.futures.reserve(req.histories.size());
    for (const auto& h : req.histories) {
        const Vec2 v = window_velocity(h, req.dt);
        std::vector<Vec2> fut;
        fut.reserve(static_cast<std::size_t>(req.future_len));
        for (int k = 1; k <= req.future_len; ++k) fut.push_back(h.back() + v * (req.dt * k));
        out.futures.push_back(std::move(fut));
    }
    return out;
}

std::vector<Vec2> ConstantVelocityPredictor::backprop_adversary(
    const PredictionRequest& req, const std::vector<Vec2>& dloss_dfuture) const {
    validate(req);
    const std::size_t n = req.histories[req.adversary].size();
    std::vector<Vec2> grad(n, Vec2{0.0, 0.0});
    // future_k = q + (q - p) * k/(n-1): only the window endpoints q (last)
    // and p (first) carry gradient.
    for (std::size_t i = 0; i < dloss_dfuture.size(); ++i) {
        const double k = static_cast<double>(i + 1);
        const Vec2& g = dloss_dfuture[i];
        if (n == 1) {
            grad[0] += g;
            continue;
        }
        const double ratio = k / static_cast<double>(n - 1);
        grad[0] += g * (-ratio);
        grad[n - 1] += g * (1.0 + ratio);
    }
    return grad;
}

std::vector<double> PolynomialPredictor::extrapolation_matrix(int history_len,
                                                              int future_len) const {
    const int deg = std::min(degree_, history_len - 1);
    const int terms = deg + 1;

    // Least squares in the normalized time variable t_j = j: the fitted
    // polynomial (and so the matrix) is invariant to affine reparametrization
    // of time, which removes dt from the picture.
    auto basis = [&](double t) {
        std::vector<double> row(terms);
        double p = 1.0;
        for (int m = 0; m < terms; ++m, p *= t) row[m] = p;
        return row;
    };

    // Normal equations N = A^T A, solved against A^T to get the coefficient
    // map C (terms x history_len); Gaussian elimination with partial pivoting.
    std::vector<std::vector<double>> aug(terms, std::vector<double>(terms + history_len, 0.0));
    for (int j = 0; j < history_len; ++j) {
        const auto row = basis(static_cast<double>(j));
        for (int a = 0; a < terms; ++a) {
            for (int b = 0; b < terms; ++b) aug[a][b] += row[a] * row[b];
            aug[a][terms + j] += row[a];
        }
    }
    for (int col = 0; col < terms; ++col) {
        int pivot = col;
        for (int r = col + 1; r < terms; ++r) {
            if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
        }
        std::swap(aug[col], aug[pivot]);
        const double diag = aug[col][col];
        for (int c = col; c < terms + history_len; ++c) aug[col][c] /= diag;
        for (int r = 0; r < terms; ++r) {
            if (r == col) continue;
            const double f = aug[r][col];
            if (f == 0.0) continue;
            for (int c = col; c < terms + history_len; ++c) aug[r][c] -= f * aug[col][c];
        }
    }

    std::vector<double> m(static_cast<std::size_t>(future_len) * history_len, 0.0);
    for (int k = 0; k < future_len; ++k) {
        const auto row = basis(static_cast<double>(history_len - 1 + k + 1));
        for (int j = 0; j < history_len; ++j) {
            double v = 0.0;
            for (int a = 0; a < terms; ++a) v += row[a] * aug[a][terms + j];
            m[static_cast<std::size_t>(k) * history_len + j] = v;
        }
    }
    return m;
}

Prediction PolynomialPredictor::predict(const PredictionRequest& req) const {
    validate(req);
    const auto m = extrapolation_matrix(req.history_len, req.future_len);
    Prediction out;
    out.futures.reserve(req.histories.size());
    for (const auto& h : req.histories) {
        std::vector<Vec2> fut(static_cast<std::size_t>(req.future_len), Vec2{0.0, 0.0});
        for (int k = 0; k < req.future_len; ++k) {
            for (int j = 0; j < req.history_len; ++j) {
                fut[k] += h[j] * m[static_cast<std::size_t>(k) * req.history_len + j];
            }
        }
        out.futures.push_back(std::move(fut));
    }
    return out;
}

std::vector<Vec2> PolynomialPredictor::backprop_adversary(
    const PredictionRequest& req, const std::vector<Vec2>& dloss_dfuture) const {
    validate(req);
    const auto m = extrapolation_matrix(req.history_len, req.future_len);
    std::vector<Vec2> grad(static_cast<std::size_t>(req.history_len), Vec2{0.0, 0.0});
    for (int k = 0; k < req.future_len; ++k) {
        for (int j = 0; j < req.history_len; ++j) {
            grad[j] += dloss_dfuture[k] * m[static_cast<std::size_t>(k) * req.history_len + j];
        }
    }
    return grad;
}

}  // namespace trajadv::pred
