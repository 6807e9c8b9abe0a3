#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "trajadv/core/types.hpp"

namespace trajadv::optim {

struct AdamConfig {
    double learning_rate{0.001};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};
};

// Adam with bias correction over a flat parameter vector. step() descends,
// step_ascent() climbs; both share the same moment estimates, so pick one
// direction per optimizer instance.
class Adam {
public:
    explicit Adam(std::size_t size, AdamConfig config = {})
        : config_(config), m_(size, 0.0), v_(size, 0.0) {}

    void step(std::vector<double>& params, const std::vector<double>& grad) {
        apply(params, grad, -1.0);
    }

    void step_ascent(std::vector<double>& params, const std::vector<double>& grad) {
        apply(params, grad, 1.0);
    }

    void reset() {
        std::fill(m_.begin(), m_.end(), 0.0);
        std::fill(v_.begin(), v_.end(), 0.0);
        t_ = 0;
    }

private:
    void apply(std::vector<double>& params, const std::vector<double>& grad, double direction) {
        if (params.size() != m_.size() || grad.size() != m_.size()) {
            throw core::ValidationError("optimizer size mismatch");
        }
        ++t_;
        const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
            v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
            const double m_hat = m_[i] / bc1;
            const double v_hat = v_[i] / bc2;
            params[i] += direction * config_.learning_rate * m_hat /
                         (std::sqrt(v_hat) + config_.epsilon);
        }
    }

    AdamConfig config_;
    std::vector<double> m_;
    std::vector<double> v_;
    long t_{0};
};

}  // namespace trajadv::optim
