#include "spreadq/nn/gru.hpp"

#include "spreadq/error.hpp"

namespace spreadq::nn {

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& a) {
    return (1.0 + (-a.array()).exp()).inverse().matrix();
}

}  // namespace

GruIds add_gru(ParamLayout& layout, const std::string& prefix, Eigen::Index input, Eigen::Index hidden) {
    GruIds ids{};
    ids.Wz = layout.add(prefix + ".Wz", hidden, input);
    ids.Wr = layout.add(prefix + ".Wr", hidden, input);
    ids.Wn = layout.add(prefix + ".Wn", hidden, input);
    ids.Uz = layout.add(prefix + ".Uz", hidden, hidden);
    ids.Ur = layout.add(prefix + ".Ur", hidden, hidden);
    ids.Un = layout.add(prefix + ".Un", hidden, hidden);
    ids.bz = layout.add(prefix + ".bz", hidden, 1);
    ids.br = layout.add(prefix + ".br", hidden, 1);
    ids.bn = layout.add(prefix + ".bn", hidden, 1);
    return ids;
}

GruView gru_view(const Flat& v, const ParamLayout& l, const GruIds& ids) {
    return GruView{view(v, l.block(ids.Wz)), view(v, l.block(ids.Wr)), view(v, l.block(ids.Wn)),
                   view(v, l.block(ids.Uz)), view(v, l.block(ids.Ur)), view(v, l.block(ids.Un)),
                   view(v, l.block(ids.bz)), view(v, l.block(ids.br)), view(v, l.block(ids.bn))};
}

GruGrad gru_grad(Flat& v, const ParamLayout& l, const GruIds& ids) {
    return GruGrad{view(v, l.block(ids.Wz)), view(v, l.block(ids.Wr)), view(v, l.block(ids.Wn)),
                   view(v, l.block(ids.Uz)), view(v, l.block(ids.Ur)), view(v, l.block(ids.Un)),
                   view(v, l.block(ids.bz)), view(v, l.block(ids.br)), view(v, l.block(ids.bn))};
}

Eigen::VectorXd gru_cell_forward(const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev, const GruView& w,
                                 GruCache* cache) {
    if (x.size() != w.Wz.cols() || h_prev.size() != w.Uz.cols()) {
        fail(ErrorCode::ShapeMismatch, "GRU input/hidden size does not match weights");
    }
    Eigen::VectorXd z = sigmoid(w.Wz * x + w.Uz * h_prev + w.bz);
    Eigen::VectorXd r = sigmoid(w.Wr * x + w.Ur * h_prev + w.br);
    Eigen::VectorXd rh = r.cwiseProduct(h_prev);
    Eigen::VectorXd n = (w.Wn * x + w.Un * rh + w.bn).array().tanh().matrix();
    Eigen::VectorXd h = (1.0 - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(h_prev);
    if (cache) {
        cache->x = x;
        cache->h_prev = h_prev;
        cache->z = std::move(z);
        cache->r = std::move(r);
        cache->n = std::move(n);
        cache->h = h;
    }
    return h;
}

void gru_cell_backward(const GruCache& c, const Eigen::VectorXd& dh, const GruView& w, GruGrad& g,
                       Eigen::VectorXd& dx, Eigen::VectorXd& dh_prev) {
    const Eigen::ArrayXd z = c.z.array(), r = c.r.array(), n = c.n.array(), hp = c.h_prev.array();

    const Eigen::VectorXd dn_pre = (dh.array() * (1.0 - z) * (1.0 - n * n)).matrix();
    const Eigen::VectorXd dz_pre = (dh.array() * (hp - n) * z * (1.0 - z)).matrix();
    const Eigen::VectorXd rh = (r * hp).matrix();

    g.Wn.noalias() += dn_pre * c.x.transpose();
    g.Un.noalias() += dn_pre * rh.transpose();
    g.bn += dn_pre;
    const Eigen::VectorXd d_rh = w.Un.transpose() * dn_pre;
    const Eigen::VectorXd dr_pre = (d_rh.array() * hp * r * (1.0 - r)).matrix();

    g.Wz.noalias() += dz_pre * c.x.transpose();
    g.Uz.noalias() += dz_pre * c.h_prev.transpose();
    g.bz += dz_pre;
    g.Wr.noalias() += dr_pre * c.x.transpose();
    g.Ur.noalias() += dr_pre * c.h_prev.transpose();
    g.br += dr_pre;

    dx = w.Wn.transpose() * dn_pre + w.Wz.transpose() * dz_pre + w.Wr.transpose() * dr_pre;
    dh_prev = (dh.array() * z).matrix() + (d_rh.array() * r).matrix() + w.Uz.transpose() * dz_pre +
              w.Ur.transpose() * dr_pre;
}

}  // namespace spreadq::nn
