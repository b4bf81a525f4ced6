#pragma once

#include <functional>
#include <span>
#include <string>

#include "spreadq/nn/params.hpp"
#include "spreadq/nn/qnet.hpp"

namespace spreadq::nn {

struct GradCheckResult {
    double max_rel_error = 0.0;
    Eigen::Index worst_index = -1;
    std::string worst_block;
    Eigen::Index checked = 0;
};

// Elementwise relative error |a-n| / max(|a|, |n|, floor), defined as 0 when
// both values are below 1e-12. The floor keeps round-off on gradients that
// are numerically zero from dominating.
double relative_error(double analytic, double numeric, double floor = 1e-8);

// Central differences of `loss` around `params` for every coordinate,
// compared against `analytic`. The floor is 1e-6 of the largest analytic
// entry, so entries many orders below the gradient scale are judged on
// absolute error.
GradCheckResult finite_difference_check(const Flat& params, const Flat& analytic,
                                        const std::function<double(const Flat&)>& loss, const ParamLayout& layout,
                                        double eps = 1e-5);

// Loss defined on the three Q-values of the final window position.
struct QLoss {
    std::function<double(const QValues&)> value;
    std::function<QValues(const QValues&)> gradient;
};

// Checks QNetwork::backward against central differences for one window.
// `sign` scales the analytic gradient (-1 reproduces a sign-flip fault).
GradCheckResult check_network_gradient(const QNetwork& net, std::span<const Observation> window, const QLoss& loss,
                                       double eps = 1e-5, double sign = 1.0);

}  // namespace spreadq::nn
