#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "actcluster/encoder/encoder.hpp"

namespace actc {

struct TrainConfig {
    int epochs = 5;
    Index batch_size = 256;
    AdamConfig adam;
};

/// Encoder, optional 2-D MLP reducer, and the classifier head, chained as
/// head(reducer(encoder(x))) when a reducer is present.
struct PseudoLabelModel {
    Encoder* encoder = nullptr;
    Mlp* reducer = nullptr;
    Mlp* head = nullptr;
};

struct BatchResult {
    double loss = 0.0;
    GradSet encoder_grads;
    GradSet reducer_grads;
    GradSet head_grads;
};

/// Weighted cross-entropy loss and gradients for one batch of windows in
/// train mode (batch statistics; running statistics are updated).
BatchResult batch_gradients(PseudoLabelModel model, const Tensor& windows, std::span<const int> targets,
                            std::span<const double> weights);

struct TrainStats {
    std::vector<double> epoch_loss;  // weight-averaged over batches
    Index steps = 0;
    Index examples = 0;              // windows with positive weight
};

/// Trains on pseudo-labels for `config.epochs` epochs with Adam. Windows with
/// weight 0 never enter a batch. Shuffling is driven by `seed`. Throws
/// std::invalid_argument if no window has positive weight.
TrainStats pseudo_label_train(PseudoLabelModel model, const WindowSet& windows, std::span<const int> labels,
                              std::span<const double> weights, const TrainConfig& config, std::uint64_t seed);

/// Eval-mode embedding used for clustering: encoder output, passed through
/// the reducer when one is given.
Eigen::MatrixXd embed(const Encoder& encoder, const Mlp* reducer, const WindowSet& windows,
                      Index batch_size = 256);

}  // namespace actc
