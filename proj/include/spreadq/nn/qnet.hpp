#pragma once

#include <array>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spreadq/nn/gru.hpp"
#include "spreadq/nn/params.hpp"
#include "spreadq/observation.hpp"

namespace spreadq::nn {

enum class EncoderKind { BiGruAttention, Feedforward };

EncoderKind parse_encoder(const std::string& s);
std::string to_string(EncoderKind e);

struct ModelConfig {
    int embed_dim = 4;     // d_a
    int hidden_dim = 32;   // d_h, split evenly between the two GRU directions
    int head_hidden = 64;  // width of the Q-head hidden layer
    EncoderKind encoder = EncoderKind::BiGruAttention;

    bool operator==(const ModelConfig&) const = default;
};

// cash, asset and net ratios
inline constexpr int kAccountScalars = 3;

using QValues = Eigen::Vector3d;  // order: short, clear, long

struct EncodedState {
    Eigen::VectorXd h;      // [forward, backward] hidden state, d_h
    Eigen::VectorXd c;      // attention context, d_h
    Eigen::VectorXd h_hat;  // [h, c]
    Eigen::VectorXd attention;  // weights over earlier window positions
};

// Everything the backward pass needs from one forward evaluation at the
// last window position.
struct ForwardRecord {
    bool valid = false;
    std::vector<std::size_t> slots;
    std::vector<GruCache> fwd;
    std::vector<GruCache> bwd;
    std::vector<Eigen::VectorXd> h;
    Eigen::VectorXd attention;
    Eigen::VectorXd ff_out;  // feedforward encoder activation
    Eigen::VectorXd x_last;
    Eigen::VectorXd h_hat;
    Eigen::VectorXd z1;
    Eigen::VectorXd u;
    QValues q = QValues::Zero();
};

// Q-network over an observation window: action embedding, bidirectional GRU
// with scaled dot-product attention over earlier positions (or a per-day
// perceptron), then a two-layer ReLU head producing three action values.
// Parameters live in one flat vector so copies, optimizer steps and
// checkpoints treat the network as a value.
class QNetwork {
public:
    QNetwork() = default;
    explicit QNetwork(ModelConfig cfg);

    const ModelConfig& config() const { return cfg_; }
    const ParamLayout& layout() const { return layout_; }
    int input_dim() const { return cfg_.embed_dim + kAccountScalars + static_cast<int>(kPriceChannels); }
    Eigen::Index size() const { return layout_.total(); }

    Flat& params() { return values_; }
    const Flat& params() const { return values_; }
    Flat zero_grad() const { return Flat::Zero(layout_.total()); }

    // Uniform in +-1/sqrt(fan_in) per weight matrix, zero biases.
    void init(std::mt19937_64& rng);

    Eigen::VectorXd input_vector(const Observation& o) const;

    // Encoded state for every window position.
    std::vector<EncodedState> encode_window(std::span<const Observation> window) const;
    QValues q_forward(const Eigen::VectorXd& h_hat) const;
    // Q-values at the last window position.
    QValues q_values(std::span<const Observation> window) const;
    ForwardRecord forward(std::span<const Observation> window) const;
    // Accumulates dL/dparams into `grad` given dL/dQ for a recorded forward.
    void backward(const ForwardRecord& record, const QValues& dq, Flat& grad) const;

private:
    struct Ids {
        std::size_t embed = 0;
        GruIds fwd{}, bwd{};
        std::size_t ff_w = 0, ff_b = 0;
        std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0;
    };

    void encode_states(std::span<const Observation> window, std::vector<GruCache>* fwd, std::vector<GruCache>* bwd,
                       std::vector<Eigen::VectorXd>& h) const;
    Eigen::VectorXd attend(const std::vector<Eigen::VectorXd>& h, std::size_t t, Eigen::VectorXd& weights) const;

    ModelConfig cfg_;
    ParamLayout layout_;
    Ids ids_;
    Flat values_;
};

}  // namespace spreadq::nn
