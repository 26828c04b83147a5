#include "actcluster/encoder/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "actcluster/numerics/random.hpp"

namespace actc {

namespace {

std::string conv_name(std::size_t l, const char* what)
{
    return "conv" + std::to_string(l) + "." + what;
}

std::string bn_name(std::size_t l, const char* what)
{
    return "bn" + std::to_string(l) + "." + what;
}

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)).
Tensor fan_in_uniform(std::vector<Index> shape, Index fan_in, Rng& rng)
{
    Tensor t(std::move(shape));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Index i = 0; i < t.size(); ++i) t[i] = uniform(rng, -bound, bound);
    return t;
}

}  // namespace

std::vector<Index> EncoderConfig::length_chain() const
{
    std::vector<Index> chain{window_length};
    Index len = window_length;
    for (const ConvSpec& c : convs) {
        len = ops::conv1d_output_length(len, c.filter_len, c.stride);
        chain.push_back(len);
        len = len / pool_width;
        chain.push_back(len);
    }
    return chain;
}

Index EncoderConfig::per_channel_features() const
{
    return convs.back().filters * length_chain().back();
}

Encoder::Encoder(EncoderConfig config, Index channels, std::uint64_t seed)
    : config_(config), channels_(channels)
{
    if (channels < 1) throw std::invalid_argument("encoder needs at least one sensor channel");
    const auto chain = config_.length_chain();
    for (std::size_t i = 1; i < chain.size(); ++i) {
        if (chain[i] < 1) {
            throw std::invalid_argument("window length " + std::to_string(config_.window_length)
                                        + " is too short for the conv stack");
        }
    }
    reinitialize(seed);
}

void Encoder::reinitialize(std::uint64_t seed)
{
    Rng rng(seed);
    params_ = ParamSet();
    Index in_ch = 1;
    for (std::size_t l = 0; l < config_.convs.size(); ++l) {
        const ConvSpec& c = config_.convs[l];
        const Index fan_in = in_ch * c.filter_len;
        params_.add(conv_name(l, "weight"), fan_in_uniform({c.filters, in_ch, c.filter_len}, fan_in, rng));
        params_.add(conv_name(l, "bias"), fan_in_uniform({c.filters}, fan_in, rng));
        if (config_.batchnorm) {
            Tensor scale({c.filters});
            scale.data().setOnes();
            params_.add(bn_name(l, "scale"), std::move(scale));
            params_.add(bn_name(l, "shift"), Tensor({c.filters}));
        }
        bn_[l] = ops::BatchNormState::init(c.filters);
        in_ch = c.filters;
    }
    const Index flat = channels_ * config_.per_channel_features();
    params_.add("project.weight", fan_in_uniform({flat, config_.latent_dim}, flat, rng));
    params_.add("project.bias", fan_in_uniform({config_.latent_dim}, flat, rng));
}

Tensor Encoder::run(const Tensor& windows, Trace* trace, ops::BatchNormMode mode,
                    std::array<ops::BatchNormState, 4>& bn, bool project) const
{
    Tensor input = windows.rank() == 2 ? windows.reshaped({1, windows.dim(0), windows.dim(1)}) : windows;
    if (input.rank() != 3) {
        throw std::invalid_argument("encoder input must be [B, C, W], got " + shape_string(windows.shape()));
    }
    const Index batch = input.dim(0);
    if (input.dim(1) != channels_) {
        throw std::invalid_argument("encoder input has " + std::to_string(input.dim(1))
                                    + " channels but the projection layer expects "
                                    + std::to_string(channels_));
    }
    if (input.dim(2) != config_.window_length) {
        throw std::invalid_argument("encoder input window length " + std::to_string(input.dim(2))
                                    + " differs from the configured " + std::to_string(config_.window_length));
    }

    // channels fold into the batch so one filter bank serves every channel
    Tensor x = input.reshaped({batch * channels_, 1, config_.window_length});
    for (std::size_t l = 0; l < config_.convs.size(); ++l) {
        const ConvSpec& c = config_.convs[l];
        Tensor y = ops::conv1d_forward(x, params_[conv_name(l, "weight")], c.stride, params_[conv_name(l, "bias")]);
        if (trace) trace->conv_input[l] = std::move(x);
        if (config_.batchnorm) {
            y = ops::batchnorm_forward(y, params_[bn_name(l, "scale")], params_[bn_name(l, "shift")], bn[l], mode,
                                       trace ? &trace->bn_cache[l] : nullptr);
        }
        Tensor a = config_.activation == Activation::relu ? ops::relu_forward(y) : y;
        if (trace) trace->pre_activation[l] = std::move(y);
        auto pooled = ops::maxpool1d_forward(a, config_.pool_width);
        if (trace) {
            trace->pool_input_shape[l] = a.shape();
            trace->pool_argmax[l] = std::move(pooled.argmax);
        }
        x = std::move(pooled.output);
    }
    const Index features = config_.per_channel_features();
    Tensor flat = x.reshaped({batch, channels_ * features});
    if (!project) return flat.reshaped({batch, channels_, features});
    Tensor out = ops::dense_forward(flat, params_["project.weight"], params_["project.bias"]);
    if (trace) {
        trace->batch = batch;
        trace->mode = mode;
        trace->flat = std::move(flat);
    }
    return out;
}

Tensor Encoder::encode(const Tensor& windows) const
{
    auto bn = bn_;
    return run(windows, nullptr, ops::BatchNormMode::eval, bn, true);
}

Tensor Encoder::conv_features(const Tensor& windows) const
{
    auto bn = bn_;
    return run(windows, nullptr, ops::BatchNormMode::eval, bn, false);
}

Eigen::MatrixXd Encoder::encode_all(const WindowSet& windows, Index batch_size) const
{
    Eigen::MatrixXd z(windows.size(), config_.latent_dim);
    for (Index first = 0; first < windows.size(); first += batch_size) {
        const Index count = std::min(batch_size, windows.size() - first);
        const Tensor latent = encode(windows.gather_range(first, count));
        z.middleRows(first, count) = latent.matrix(count, config_.latent_dim);
    }
    return z;
}

Tensor Encoder::forward(const Tensor& windows, Trace& trace, ops::BatchNormMode mode)
{
    return run(windows, &trace, mode, bn_, true);
}

GradSet Encoder::backward(const Trace& trace, const Tensor& grad_latent) const
{
    GradSet grads;
    auto dense = ops::dense_backward(trace.flat, params_["project.weight"], grad_latent);
    grads["project.weight"] = std::move(dense.weights);
    grads["project.bias"] = std::move(dense.bias);

    const Index features = config_.per_channel_features();
    const Index sequences = trace.batch * channels_;
    Tensor g = dense.input.reshaped({sequences, config_.convs.back().filters, features / config_.convs.back().filters});
    for (std::size_t li = config_.convs.size(); li-- > 0;) {
        const ConvSpec& c = config_.convs[li];
        g = ops::maxpool1d_backward(trace.pool_input_shape[li], trace.pool_argmax[li], g);
        if (config_.activation == Activation::relu) g = ops::relu_backward(trace.pre_activation[li], g);
        if (config_.batchnorm) {
            auto bn = ops::batchnorm_backward(trace.bn_cache[li], params_[bn_name(li, "scale")], g);
            grads[bn_name(li, "scale")] = std::move(bn.scale);
            grads[bn_name(li, "shift")] = std::move(bn.shift);
            g = std::move(bn.input);
        }
        auto conv = ops::conv1d_backward(trace.conv_input[li], params_[conv_name(li, "weight")], c.stride, g, li > 0);
        grads[conv_name(li, "weight")] = std::move(conv.filters);
        grads[conv_name(li, "bias")] = std::move(conv.bias);
        g = std::move(conv.input);
    }
    return grads;
}

Mlp::Mlp(std::vector<Index> layer_sizes, std::uint64_t seed) : sizes_(std::move(layer_sizes))
{
    if (sizes_.size() < 2) throw std::invalid_argument("an MLP needs at least input and output sizes");
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        const std::string prefix = "layer" + std::to_string(l);
        params_.add(prefix + ".weight", fan_in_uniform({sizes_[l], sizes_[l + 1]}, sizes_[l], rng));
        params_.add(prefix + ".bias", fan_in_uniform({sizes_[l + 1]}, sizes_[l], rng));
    }
}

Tensor Mlp::forward(const Tensor& input, Trace* trace) const
{
    if (input.rank() != 2 || input.dim(1) != sizes_.front()) {
        throw std::invalid_argument("MLP input must be [N, " + std::to_string(sizes_.front()) + "], got "
                                    + shape_string(input.shape()));
    }
    if (trace) {
        trace->inputs.clear();
        trace->pre_activation.clear();
    }
    Tensor x = input;
    const std::size_t layers = sizes_.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::string prefix = "layer" + std::to_string(l);
        Tensor y = ops::dense_forward(x, params_[prefix + ".weight"], params_[prefix + ".bias"]);
        if (trace) trace->inputs.push_back(std::move(x));
        if (l + 1 < layers) {
            x = ops::relu_forward(y);
            if (trace) trace->pre_activation.push_back(std::move(y));
        } else {
            x = std::move(y);
        }
    }
    return x;
}

Mlp::Backward Mlp::backward(const Trace& trace, const Tensor& grad_output) const
{
    Backward out;
    Tensor g = grad_output;
    for (std::size_t l = sizes_.size() - 1; l-- > 0;) {
        const std::string prefix = "layer" + std::to_string(l);
        if (l + 1 < sizes_.size() - 1) g = ops::relu_backward(trace.pre_activation[l], g);
        auto d = ops::dense_backward(trace.inputs[l], params_[prefix + ".weight"], g);
        out.grads[prefix + ".weight"] = std::move(d.weights);
        out.grads[prefix + ".bias"] = std::move(d.bias);
        g = std::move(d.input);
    }
    out.input = std::move(g);
    return out;
}

Mlp make_classifier_head(Index input_dim, int classes, std::uint64_t seed)
{
    if (classes < 2) throw std::invalid_argument("classifier head needs at least 2 classes");
    return Mlp({input_dim, 250, classes}, seed);
}

}  // namespace actc
