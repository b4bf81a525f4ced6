#pragma once

#include "spreadq/nn/params.hpp"

namespace spreadq::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adaptive-moment optimizer with bias-corrected first and second moments.
class Adam {
public:
    Adam() = default;
    Adam(Eigen::Index size, AdamConfig cfg);

    void step(Flat& params, const Flat& grads);

    long steps() const { return t_; }
    const AdamConfig& config() const { return cfg_; }
    const Flat& first_moment() const { return m_; }
    const Flat& second_moment() const { return v_; }

private:
    AdamConfig cfg_;
    Flat m_;
    Flat v_;
    long t_ = 0;
};

}  // namespace spreadq::nn
