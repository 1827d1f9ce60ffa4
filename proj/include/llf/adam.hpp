#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "llf/errors.hpp"

namespace llf {

struct Adam {
    double lr;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    Adam(size_t n, double learning_rate) : lr(learning_rate), m_(n, 0.0), v_(n, 0.0) {
        if (learning_rate <= 0.0) throw config_error("learning rate must be positive");
    }

    void step(std::span<double> params, std::span<const double> grads) {
        if (params.size() != m_.size() || grads.size() != m_.size())
            throw config_error("optimizer state size mismatch");
        ++t_;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
        for (size_t i = 0; i < params.size(); ++i) {
            const double g = grads[i];
            m_[i] = beta1 * m_[i] + (1.0 - beta1) * g;
            v_[i] = beta2 * v_[i] + (1.0 - beta2) * g * g;
            const double mhat = m_[i] / c1;
            const double vhat = v_[i] / c2;
            params[i] -= lr * mhat / (std::sqrt(vhat) + epsilon);
        }
    }

    long steps_taken() const { return t_; }

private:
    std::vector<double> m_, v_;
    long t_ = 0;
};

}  // namespace llf
