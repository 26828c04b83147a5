#include "actcluster/encoder/trainer.hpp"

#include <algorithm>
#include <stdexcept>

#include "actcluster/numerics/random.hpp"

namespace actc {

BatchResult batch_gradients(PseudoLabelModel model, const Tensor& windows, std::span<const int> targets,
                            std::span<const double> weights)
{
    if (!model.encoder || !model.head) throw std::invalid_argument("model needs an encoder and a head");
    Encoder::Trace enc_trace;
    Mlp::Trace red_trace;
    Mlp::Trace head_trace;

    const Tensor latent = model.encoder->forward(windows, enc_trace, ops::BatchNormMode::train);
    const Tensor reduced = model.reducer ? model.reducer->forward(latent, &red_trace) : latent;
    const Tensor logits = model.head->forward(reduced, &head_trace);
    auto loss = ops::softmax_cross_entropy(logits, targets, weights);

    BatchResult r;
    r.loss = loss.loss;
    auto head_back = model.head->backward(head_trace, loss.grad);
    r.head_grads = std::move(head_back.grads);
    Tensor grad_latent = std::move(head_back.input);
    if (model.reducer) {
        auto red_back = model.reducer->backward(red_trace, grad_latent);
        r.reducer_grads = std::move(red_back.grads);
        grad_latent = std::move(red_back.input);
    }
    r.encoder_grads = model.encoder->backward(enc_trace, grad_latent);
    return r;
}

TrainStats pseudo_label_train(PseudoLabelModel model, const WindowSet& windows, std::span<const int> labels,
                              std::span<const double> weights, const TrainConfig& config, std::uint64_t seed)
{
    if (!model.encoder || !model.head) throw std::invalid_argument("model needs an encoder and a head");
    if (static_cast<Index>(labels.size()) != windows.size() || static_cast<Index>(weights.size()) != windows.size()) {
        throw std::invalid_argument("pseudo-label training needs one label and one weight per window");
    }
    if (config.batch_size < 1 || config.epochs < 0) throw std::invalid_argument("invalid training configuration");

    std::vector<Index> active;
    for (Index i = 0; i < windows.size(); ++i) {
        if (weights[static_cast<std::size_t>(i)] > 0.0) active.push_back(i);
    }
    if (active.empty()) throw std::invalid_argument("pseudo-label training: no window has positive weight");

    model.encoder->params().reset_optimizer_state();
    model.head->params().reset_optimizer_state();
    if (model.reducer) model.reducer->params().reset_optimizer_state();

    const Index n = static_cast<Index>(active.size());
    std::vector<Index> bounds;
    for (Index b = 0; b < n; b += config.batch_size) bounds.push_back(b);
    // a trailing batch of one window joins the previous batch (train-mode batchnorm)
    if (bounds.size() > 1 && n - bounds.back() == 1) bounds.pop_back();
    bounds.push_back(n);

    TrainStats stats;
    stats.examples = n;
    Rng rng(seed);
    std::vector<int> targets;
    std::vector<double> batch_weights;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle(active.begin(), active.end(), rng);
        double loss_sum = 0.0;
        double weight_sum = 0.0;
        for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
            const std::span<const Index> idx(active.data() + bounds[b], static_cast<std::size_t>(bounds[b + 1] - bounds[b]));
            targets.clear();
            batch_weights.clear();
            for (Index i : idx) {
                targets.push_back(labels[static_cast<std::size_t>(i)]);
                batch_weights.push_back(weights[static_cast<std::size_t>(i)]);
            }
            const Tensor batch = windows.gather(idx);
            BatchResult r = batch_gradients(model, batch, targets, batch_weights);
            adam_step(model.encoder->params(), r.encoder_grads, config.adam);
            adam_step(model.head->params(), r.head_grads, config.adam);
            if (model.reducer) adam_step(model.reducer->params(), r.reducer_grads, config.adam);

            double w = 0.0;
            for (double x : batch_weights) w += x;
            loss_sum += r.loss * w;
            weight_sum += w;
            ++stats.steps;
        }
        stats.epoch_loss.push_back(loss_sum / weight_sum);
    }
    return stats;
}

Eigen::MatrixXd embed(const Encoder& encoder, const Mlp* reducer, const WindowSet& windows, Index batch_size)
{
    Eigen::MatrixXd z = encoder.encode_all(windows, batch_size);
    if (!reducer) return z;
    Tensor zt({z.rows(), z.cols()});
    zt.matrix(z.rows(), z.cols()) = z;
    const Tensor r = reducer->forward(zt);
    return r.matrix(r.dim(0), r.dim(1));
}

}  // namespace actc
