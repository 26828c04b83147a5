#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "actcluster/data/windows.hpp"
#include "actcluster/numerics/adam.hpp"
#include "actcluster/numerics/ops.hpp"

namespace actc {

struct ConvSpec {
    Index filter_len;
    Index stride;
    Index filters;
};

enum class Activation { relu, none };

/// Fixed four-stage encoder: each stage is conv -> batchnorm -> activation
/// -> max-pool, with filters shared across sensor channels. The per-channel
/// outputs are concatenated and projected to the latent dimension.
struct EncoderConfig {
    std::array<ConvSpec, 4> convs{{{50, 2, 4}, {40, 2, 8}, {7, 1, 16}, {4, 1, 32}}};
    Index pool_width = 2;
    Index latent_dim = 32;
    Index window_length = 512;
    Activation activation = Activation::relu;
    bool batchnorm = true;

    /// Temporal length entering stage 0, then after each conv and each pool:
    /// {W, conv0, pool0, conv1, pool1, ...}. For the default config this is
    /// 512, 232, 116, 39, 19, 13, 6, 3, 1.
    std::vector<Index> length_chain() const;

    /// Features per sensor channel after the conv stack.
    Index per_channel_features() const;
};

class Encoder {
public:
    Encoder() = default;
    Encoder(EncoderConfig config, Index channels, std::uint64_t seed);

    const EncoderConfig& config() const { return config_; }
    Index channels() const { return channels_; }

    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }
    std::array<ops::BatchNormState, 4>& batchnorm_state() { return bn_; }
    const std::array<ops::BatchNormState, 4>& batchnorm_state() const { return bn_; }

    /// Draws fresh parameters and resets batchnorm statistics.
    void reinitialize(std::uint64_t seed);

    /// Eval-mode forward pass: [B, C, W] (or a single [C, W] window) -> [B, latent].
    Tensor encode(const Tensor& windows) const;

    /// Encodes a whole window set in batches; row i is window i.
    Eigen::MatrixXd encode_all(const WindowSet& windows, Index batch_size = 256) const;

    /// Intermediate values kept by a forward pass for the backward pass.
    struct Trace {
        Index batch = 0;
        ops::BatchNormMode mode = ops::BatchNormMode::train;
        std::array<Tensor, 4> conv_input;
        std::array<ops::BatchNormCache, 4> bn_cache;
        std::array<Tensor, 4> pre_activation;
        std::array<std::vector<Index>, 4> pool_argmax;
        std::array<std::vector<Index>, 4> pool_input_shape;
        Tensor flat;  // [B, C * per_channel_features]
    };

    /// Forward pass keeping a trace. Train mode uses batch statistics and
    /// updates the running statistics.
    Tensor forward(const Tensor& windows, Trace& trace, ops::BatchNormMode mode = ops::BatchNormMode::train);

    /// Gradients of all encoder parameters given d loss / d latent.
    GradSet backward(const Trace& trace, const Tensor& grad_latent) const;

    /// Conv-stack output before the channel-combining projection, [B, C, per_channel_features].
    Tensor conv_features(const Tensor& windows) const;

private:
    Tensor run(const Tensor& windows, Trace* trace, ops::BatchNormMode mode,
               std::array<ops::BatchNormState, 4>& bn, bool project) const;

    EncoderConfig config_;
    Index channels_ = 0;
    ParamSet params_;
    std::array<ops::BatchNormState, 4> bn_;
};

/// Fully connected network with ReLU between layers and a linear output.
/// Serves as the disposable softmax classifier head and as the MLP
/// replacement for UMAP.
class Mlp {
public:
    Mlp() = default;
    Mlp(std::vector<Index> layer_sizes, std::uint64_t seed);

    const std::vector<Index>& layer_sizes() const { return sizes_; }
    ParamSet& params() { return params_; }
    const ParamSet& params() const { return params_; }

    struct Trace {
        std::vector<Tensor> inputs;  // input of each affine layer
        std::vector<Tensor> pre_activation;
    };

    Tensor forward(const Tensor& input, Trace* trace = nullptr) const;

    struct Backward {
        GradSet grads;
        Tensor input;
    };
    Backward backward(const Trace& trace, const Tensor& grad_output) const;

private:
    std::vector<Index> sizes_;
    ParamSet params_;
};

/// Classifier head: latent -> 250 hidden units -> K logits.
Mlp make_classifier_head(Index input_dim, int classes, std::uint64_t seed);

}  // namespace actc
