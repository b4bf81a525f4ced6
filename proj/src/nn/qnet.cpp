#include "spreadq/nn/qnet.hpp"

#include <cmath>

#include "spreadq/error.hpp"

namespace spreadq::nn {

EncoderKind parse_encoder(const std::string& s) {
    if (s == "bigru_attention") return EncoderKind::BiGruAttention;
    if (s == "feedforward") return EncoderKind::Feedforward;
    fail(ErrorCode::ConfigError, "unknown encoder '" + s + "'");
}

std::string to_string(EncoderKind e) {
    return e == EncoderKind::BiGruAttention ? "bigru_attention" : "feedforward";
}

QNetwork::QNetwork(ModelConfig cfg) : cfg_(cfg) {
    if (cfg_.embed_dim < 1 || cfg_.head_hidden < 1 || cfg_.hidden_dim < 2 || cfg_.hidden_dim % 2 != 0) {
        fail(ErrorCode::ShapeMismatch, "model sizes must be positive and hidden_dim even");
    }
    const Eigen::Index in = input_dim();
    const Eigen::Index dh = cfg_.hidden_dim;
    ids_.embed = layout_.add("embed", kNumActions, cfg_.embed_dim);
    if (cfg_.encoder == EncoderKind::BiGruAttention) {
        ids_.fwd = add_gru(layout_, "gru_fwd", in, dh / 2);
        ids_.bwd = add_gru(layout_, "gru_bwd", in, dh / 2);
    } else {
        ids_.ff_w = layout_.add("ff.W", 2 * dh, in);
        ids_.ff_b = layout_.add("ff.b", 2 * dh, 1);
    }
    ids_.w1 = layout_.add("head.W1", cfg_.head_hidden, 2 * dh);
    ids_.b1 = layout_.add("head.b1", cfg_.head_hidden, 1);
    ids_.w2 = layout_.add("head.W2", kNumActions, cfg_.head_hidden);
    ids_.b2 = layout_.add("head.b2", kNumActions, 1);
    values_ = Flat::Zero(layout_.total());
}

void QNetwork::init(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (const auto& b : layout_.blocks()) {
        auto m = view(values_, b);
        const bool is_bias = b.cols == 1 && b.name != "embed";
        if (is_bias) {
            m.setZero();
            continue;
        }
        // the embedding is a lookup from a 3-way one-hot
        const double fan_in = b.name == "embed" ? static_cast<double>(kNumActions) : static_cast<double>(b.cols);
        const double bound = 1.0 / std::sqrt(fan_in);
        for (Eigen::Index j = 0; j < b.cols; ++j) {
            for (Eigen::Index i = 0; i < b.rows; ++i) m(i, j) = bound * unit(rng);
        }
    }
}

Eigen::VectorXd QNetwork::input_vector(const Observation& o) const {
    Eigen::VectorXd x(input_dim());
    const auto embed = view(values_, layout_.block(ids_.embed));
    const auto slot = static_cast<Eigen::Index>(action_slot(o.account.prev_action));
    x.head(cfg_.embed_dim) = embed.row(slot).transpose();
    Eigen::Index k = cfg_.embed_dim;
    x(k++) = o.account.cash_ratio;
    x(k++) = o.account.asset_ratio;
    x(k++) = o.account.net_ratio;
    for (double p : o.prices) x(k++) = p;
    return x;
}

void QNetwork::encode_states(std::span<const Observation> window, std::vector<GruCache>* fwd,
                             std::vector<GruCache>* bwd, std::vector<Eigen::VectorXd>& h) const {
    const std::size_t L = window.size();
    const Eigen::Index half = cfg_.hidden_dim / 2;
    const GruView wf = gru_view(values_, layout_, ids_.fwd);
    const GruView wb = gru_view(values_, layout_, ids_.bwd);
    std::vector<Eigen::VectorXd> x(L);
    for (std::size_t i = 0; i < L; ++i) x[i] = input_vector(window[i]);

    std::vector<Eigen::VectorXd> hf(L), hb(L);
    Eigen::VectorXd state = Eigen::VectorXd::Zero(half);
    for (std::size_t i = 0; i < L; ++i) {
        state = gru_cell_forward(x[i], state, wf, fwd ? &(*fwd)[i] : nullptr);
        hf[i] = state;
    }
    state = Eigen::VectorXd::Zero(half);
    for (std::size_t k = L; k-- > 0;) {
        state = gru_cell_forward(x[k], state, wb, bwd ? &(*bwd)[k] : nullptr);
        hb[k] = state;
    }
    h.resize(L);
    for (std::size_t i = 0; i < L; ++i) {
        h[i].resize(cfg_.hidden_dim);
        h[i] << hf[i], hb[i];
    }
}

Eigen::VectorXd QNetwork::attend(const std::vector<Eigen::VectorXd>& h, std::size_t t,
                                 Eigen::VectorXd& weights) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(cfg_.hidden_dim);
    weights.resize(static_cast<Eigen::Index>(t));
    if (t == 0) return c;
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg_.hidden_dim));
    for (std::size_t i = 0; i < t; ++i) weights(static_cast<Eigen::Index>(i)) = h[t].dot(h[i]) * scale;
    weights = (weights.array() - weights.maxCoeff()).exp().matrix();
    weights /= weights.sum();
    for (std::size_t i = 0; i < t; ++i) c += weights(static_cast<Eigen::Index>(i)) * h[i];
    return c;
}

std::vector<EncodedState> QNetwork::encode_window(std::span<const Observation> window) const {
    if (window.empty()) fail(ErrorCode::EmptyWindow, "encode_window needs at least one observation");
    const Eigen::Index dh = cfg_.hidden_dim;
    std::vector<EncodedState> out(window.size());
    if (cfg_.encoder == EncoderKind::Feedforward) {
        const auto W = view(values_, layout_.block(ids_.ff_w));
        const auto b = view(values_, layout_.block(ids_.ff_b));
        for (std::size_t i = 0; i < window.size(); ++i) {
            Eigen::VectorXd a = (W * input_vector(window[i]) + b).array().tanh().matrix();
            out[i].h = a.head(dh);
            out[i].c = a.tail(dh);
            out[i].h_hat = std::move(a);
        }
        return out;
    }
    std::vector<Eigen::VectorXd> h;
    encode_states(window, nullptr, nullptr, h);
    for (std::size_t t = 0; t < window.size(); ++t) {
        EncodedState& s = out[t];
        s.h = h[t];
        s.c = attend(h, t, s.attention);
        s.h_hat.resize(2 * dh);
        s.h_hat << s.h, s.c;
    }
    return out;
}

QValues QNetwork::q_forward(const Eigen::VectorXd& h_hat) const {
    if (h_hat.size() != 2 * cfg_.hidden_dim) fail(ErrorCode::ShapeMismatch, "h_hat must have 2*d_h entries");
    const auto W1 = view(values_, layout_.block(ids_.w1));
    const auto b1 = view(values_, layout_.block(ids_.b1));
    const auto W2 = view(values_, layout_.block(ids_.w2));
    const auto b2 = view(values_, layout_.block(ids_.b2));
    const Eigen::VectorXd u = (W1 * h_hat + b1).cwiseMax(0.0);
    return W2 * u + b2;
}

QValues QNetwork::q_values(std::span<const Observation> window) const {
    return forward(window).q;
}

ForwardRecord QNetwork::forward(std::span<const Observation> window) const {
    if (window.empty()) fail(ErrorCode::EmptyWindow, "forward needs at least one observation");
    const std::size_t L = window.size();
    const Eigen::Index dh = cfg_.hidden_dim;
    ForwardRecord rec;
    rec.slots.resize(L);
    for (std::size_t i = 0; i < L; ++i) rec.slots[i] = action_slot(window[i].account.prev_action);

    rec.h_hat.resize(2 * dh);
    if (cfg_.encoder == EncoderKind::Feedforward) {
        const auto W = view(values_, layout_.block(ids_.ff_w));
        const auto b = view(values_, layout_.block(ids_.ff_b));
        rec.x_last = input_vector(window.back());
        rec.ff_out = (W * rec.x_last + b).array().tanh().matrix();
        rec.h_hat = rec.ff_out;
    } else {
        rec.fwd.resize(L);
        rec.bwd.resize(L);
        encode_states(window, &rec.fwd, &rec.bwd, rec.h);
        const Eigen::VectorXd c = attend(rec.h, L - 1, rec.attention);
        rec.h_hat << rec.h[L - 1], c;
    }

    const auto W1 = view(values_, layout_.block(ids_.w1));
    const auto b1 = view(values_, layout_.block(ids_.b1));
    const auto W2 = view(values_, layout_.block(ids_.w2));
    const auto b2 = view(values_, layout_.block(ids_.b2));
    rec.z1 = W1 * rec.h_hat + b1;
    rec.u = rec.z1.cwiseMax(0.0);
    rec.q = W2 * rec.u + b2;
    rec.valid = true;
    return rec;
}

void QNetwork::backward(const ForwardRecord& rec, const QValues& dq, Flat& grad) const {
    if (!rec.valid) fail(ErrorCode::NoRecordedForward, "backward called without a recorded forward pass");
    if (grad.size() != layout_.total()) fail(ErrorCode::ShapeMismatch, "gradient vector has wrong size");
    const Eigen::Index dh = cfg_.hidden_dim;

    // head
    const auto W1 = view(values_, layout_.block(ids_.w1));
    const auto W2 = view(values_, layout_.block(ids_.w2));
    view(grad, layout_.block(ids_.w2)).noalias() += dq * rec.u.transpose();
    view(grad, layout_.block(ids_.b2)) += dq;
    const Eigen::VectorXd du = W2.transpose() * dq;
    const Eigen::VectorXd dz1 = (rec.z1.array() > 0.0).select(du.array(), 0.0).matrix();
    view(grad, layout_.block(ids_.w1)).noalias() += dz1 * rec.h_hat.transpose();
    view(grad, layout_.block(ids_.b1)) += dz1;
    const Eigen::VectorXd dh_hat = W1.transpose() * dz1;

    auto embed_grad = view(grad, layout_.block(ids_.embed));

    if (cfg_.encoder == EncoderKind::Feedforward) {
        const Eigen::VectorXd da = (dh_hat.array() * (1.0 - rec.ff_out.array().square())).matrix();
        view(grad, layout_.block(ids_.ff_w)).noalias() += da * rec.x_last.transpose();
        view(grad, layout_.block(ids_.ff_b)) += da;
        const Eigen::VectorXd dx = view(values_, layout_.block(ids_.ff_w)).transpose() * da;
        embed_grad.row(static_cast<Eigen::Index>(rec.slots.back())) += dx.head(cfg_.embed_dim).transpose();
        return;
    }

    const std::size_t L = rec.h.size();
    const std::size_t t = L - 1;
    std::vector<Eigen::VectorXd> dstate(L, Eigen::VectorXd::Zero(dh));
    dstate[t] += dh_hat.head(dh);

    // attention: c = sum_i a_i h_i, a = softmax(h_t . h_i / sqrt(d_h))
    if (t > 0) {
        const Eigen::VectorXd dc = dh_hat.tail(dh);
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
        Eigen::VectorXd da(static_cast<Eigen::Index>(t));
        for (std::size_t i = 0; i < t; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            dstate[i] += rec.attention(ii) * dc;
            da(ii) = dc.dot(rec.h[i]);
        }
        const double mean_da = rec.attention.dot(da);
        for (std::size_t i = 0; i < t; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const double ds = rec.attention(ii) * (da(ii) - mean_da) * scale;
            dstate[t] += ds * rec.h[i];
            dstate[i] += ds * rec.h[t];
        }
    }

    const Eigen::Index half = dh / 2;
    const GruView wf = gru_view(values_, layout_, ids_.fwd);
    const GruView wb = gru_view(values_, layout_, ids_.bwd);
    GruGrad gf = gru_grad(grad, layout_, ids_.fwd);
    GruGrad gb = gru_grad(grad, layout_, ids_.bwd);
    std::vector<Eigen::VectorXd> dx(L, Eigen::VectorXd::Zero(input_dim()));
    Eigen::VectorXd dx_step, carry_prev;

    // forward direction ran left to right, so unwind right to left
    Eigen::VectorXd carry = Eigen::VectorXd::Zero(half);
    for (std::size_t k = L; k-- > 0;) {
        const Eigen::VectorXd total = carry + dstate[k].head(half);
        gru_cell_backward(rec.fwd[k], total, wf, gf, dx_step, carry_prev);
        dx[k] += dx_step;
        carry = carry_prev;
    }
    carry = Eigen::VectorXd::Zero(half);
    for (std::size_t k = 0; k < L; ++k) {
        const Eigen::VectorXd total = carry + dstate[k].tail(half);
        gru_cell_backward(rec.bwd[k], total, wb, gb, dx_step, carry_prev);
        dx[k] += dx_step;
        carry = carry_prev;
    }
    for (std::size_t k = 0; k < L; ++k) {
        embed_grad.row(static_cast<Eigen::Index>(rec.slots[k])) += dx[k].head(cfg_.embed_dim).transpose();
    }
}

}  // namespace spreadq::nn
