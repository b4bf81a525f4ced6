#include "spreadq/nn/adam.hpp"

#include <cmath>

#include "spreadq/error.hpp"

namespace spreadq::nn {

Adam::Adam(Eigen::Index size, AdamConfig cfg) : cfg_(cfg), m_(Flat::Zero(size)), v_(Flat::Zero(size)) {}

void Adam::step(Flat& params, const Flat& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        fail(ErrorCode::ShapeMismatch, "optimizer state, parameters and gradients differ in size");
    }
    ++t_;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grads;
    v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grads.cwiseAbs2();
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    params.array() -= cfg_.lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.eps);
}

}  // namespace spreadq::nn
