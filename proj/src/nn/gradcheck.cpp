#include "spreadq/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "spreadq/error.hpp"

namespace spreadq::nn {

double relative_error(double analytic, double numeric, double floor) {
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    if (scale < 1e-12) return 0.0;
    return std::abs(analytic - numeric) / std::max(scale, floor);
}

GradCheckResult finite_difference_check(const Flat& params, const Flat& analytic,
                                        const std::function<double(const Flat&)>& loss, const ParamLayout& layout,
                                        double eps) {
    if (analytic.size() != params.size()) fail(ErrorCode::ShapeMismatch, "analytic gradient has wrong size");
    GradCheckResult out;
    const double floor = std::max(1e-8, 1e-6 * analytic.cwiseAbs().maxCoeff());
    Flat probe = params;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        const double saved = probe(i);
        probe(i) = saved + eps;
        const double up = loss(probe);
        probe(i) = saved - eps;
        const double down = loss(probe);
        probe(i) = saved;
        const double numeric = (up - down) / (2.0 * eps);
        const double err = relative_error(analytic(i), numeric, floor);
        ++out.checked;
        if (out.worst_index < 0 || err > out.max_rel_error) {
            out.max_rel_error = err;
            out.worst_index = i;
        }
    }
    if (out.worst_index >= 0) out.worst_block = layout.block_of(out.worst_index).name;
    return out;
}

GradCheckResult check_network_gradient(const QNetwork& net, std::span<const Observation> window, const QLoss& loss,
                                       double eps, double sign) {
    const ForwardRecord rec = net.forward(window);
    Flat grad = net.zero_grad();
    net.backward(rec, loss.gradient(rec.q), grad);
    grad *= sign;

    QNetwork probe = net;
    auto eval = [&](const Flat& p) {
        probe.params() = p;
        return loss.value(probe.q_values(window));
    };
    return finite_difference_check(net.params(), grad, eval, net.layout(), eps);
}

}  // namespace spreadq::nn
