#pragma once

#include <string>

#include <Eigen/Dense>

#include "spreadq/nn/params.hpp"

namespace spreadq::nn {

struct GruIds {
    std::size_t Wz, Wr, Wn, Uz, Ur, Un, bz, br, bn;
};

// Registers the nine blocks of a GRU cell under `prefix`.
GruIds add_gru(ParamLayout& layout, const std::string& prefix, Eigen::Index input, Eigen::Index hidden);

template <typename M>
struct GruMats {
    M Wz, Wr, Wn;  // hidden x input
    M Uz, Ur, Un;  // hidden x hidden
    M bz, br, bn;  // hidden x 1
};

using GruView = GruMats<ConstMatMap>;
using GruGrad = GruMats<MatMap>;

GruView gru_view(const Flat& values, const ParamLayout& layout, const GruIds& ids);
GruGrad gru_grad(Flat& grads, const ParamLayout& layout, const GruIds& ids);

struct GruCache {
    Eigen::VectorXd x, h_prev, z, r, n, h;
};

// z = sig(Wz x + Uz h + bz), r = sig(Wr x + Ur h + br),
// n = tanh(Wn x + Un (r*h) + bn), h' = (1-z)*n + z*h
Eigen::VectorXd gru_cell_forward(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev, const GruView& w,
                                 GruCache* cache = nullptr);

// Accumulates parameter gradients into `g`; writes dL/dx and dL/dh_prev.
void gru_cell_backward(const GruCache& cache, const Eigen::VectorXd& dh, const GruView& w, GruGrad& g,
                       Eigen::VectorXd& dx, Eigen::VectorXd& dh_prev);

}  // namespace spreadq::nn
