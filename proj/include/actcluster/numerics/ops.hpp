#pragma once

#include <span>
#include <vector>

#include "actcluster/numerics/tensor.hpp"

/// Forward/backward kernels for the fixed encoder: valid 1-D convolution,
/// non-overlapping max pooling, batch normalization, affine maps, ReLU and
/// weighted softmax cross-entropy. Each backward takes what its forward saw
/// and returns gradients with respect to every input.
namespace actc::ops {

// ---- convolution -----------------------------------------------------------

/// Output length of a valid convolution.
Index conv1d_output_length(Index length, Index filter_len, Index stride);

/// Cross-correlation without padding.
/// input: [N, L] (single input channel) or [N, Cin, L]
/// filters: [Cout, F] (Cin must be 1) or [Cout, Cin, F]
/// bias: [Cout]
/// returns [N, Cout, floor((L - F) / stride) + 1]
Tensor conv1d_forward(const Tensor& input, const Tensor& filters, Index stride, const Tensor& bias);

struct Conv1dGrads {
    Tensor input;    // same shape as the forward input (empty if not requested)
    Tensor filters;  // same shape as filters
    Tensor bias;     // [Cout]
};

Conv1dGrads conv1d_backward(const Tensor& input, const Tensor& filters, Index stride,
                            const Tensor& grad_output, bool need_input_grad = true);

// ---- pooling ---------------------------------------------------------------

struct MaxPoolResult {
    Tensor output;
    std::vector<Index> argmax;  // flat input index feeding each output element
};

/// Non-overlapping max pooling over the last axis; out_len = floor(in_len / width).
/// Ties resolve to the first maximal index.
MaxPoolResult maxpool1d_forward(const Tensor& input, Index width);
Tensor maxpool1d_backward(const std::vector<Index>& input_shape, const std::vector<Index>& argmax,
                          const Tensor& grad_output);

// ---- batch normalization ---------------------------------------------------

enum class BatchNormMode { train, eval };

struct BatchNormState {
    Eigen::VectorXd running_mean;
    Eigen::VectorXd running_var;
    double momentum = 0.1;
    double epsilon = 1e-5;

    static BatchNormState init(Index channels);
};

struct BatchNormCache {
    BatchNormMode mode = BatchNormMode::eval;
    std::vector<Index> shape;
    Eigen::VectorXd normalized;  // x_hat, same layout as the input
    Eigen::VectorXd inv_std;     // per channel
};

/// Per-channel normalization of [N, C] or [N, C, L] inputs. Train mode uses
/// batch statistics over (N, L) and updates the running statistics with the
/// unbiased batch variance; eval mode uses the running statistics.
Tensor batchnorm_forward(const Tensor& input, const Tensor& scale, const Tensor& shift, BatchNormState& state,
                         BatchNormMode mode, BatchNormCache* cache = nullptr);

struct BatchNormGrads {
    Tensor input;
    Tensor scale;
    Tensor shift;
};

BatchNormGrads batchnorm_backward(const BatchNormCache& cache, const Tensor& scale, const Tensor& grad_output);

// ---- affine / activation ---------------------------------------------------

/// y = x W + b with x: [N, In], W: [In, Out], b: [Out].
Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);

struct DenseGrads {
    Tensor input;
    Tensor weights;
    Tensor bias;
};

DenseGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_output,
                          bool need_input_grad = true);

Tensor relu_forward(const Tensor& input);
Tensor relu_backward(const Tensor& input, const Tensor& grad_output);

// ---- loss ------------------------------------------------------------------

struct LossResult {
    double loss = 0.0;
    Tensor grad;  // d loss / d logits, [N, K]
};

/// loss = sum_i w_i CE_i / sum_i w_i, softmax stabilized by max subtraction.
LossResult softmax_cross_entropy(const Tensor& logits, std::span<const int> targets,
                                 std::span<const double> weights);

/// Row-wise softmax of [N, K] logits.
Tensor softmax(const Tensor& logits);

}  // namespace actc::ops
