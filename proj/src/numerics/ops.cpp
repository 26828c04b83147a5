#include "actcluster/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace actc::ops {

namespace {

[[noreturn]] void shape_error(const std::string& op, const std::string& what)
{
    throw std::invalid_argument(op + ": " + what);
}

struct ConvGeometry {
    Index batch, in_ch, length, out_ch, filter_len, stride, out_len;
};

ConvGeometry conv_geometry(const Tensor& input, const Tensor& filters, Index stride)
{
    ConvGeometry g{};
    if (input.rank() == 2) {
        g.batch = input.dim(0);
        g.in_ch = 1;
        g.length = input.dim(1);
    } else if (input.rank() == 3) {
        g.batch = input.dim(0);
        g.in_ch = input.dim(1);
        g.length = input.dim(2);
    } else {
        shape_error("conv1d", "input rank must be 2 or 3, got shape " + shape_string(input.shape()));
    }
    if (filters.rank() == 2) {
        if (g.in_ch != 1) {
            shape_error("conv1d", "filters of rank 2 need a single input channel, input has "
                                      + std::to_string(g.in_ch));
        }
        g.out_ch = filters.dim(0);
        g.filter_len = filters.dim(1);
    } else if (filters.rank() == 3) {
        if (filters.dim(1) != g.in_ch) {
            shape_error("conv1d", "filter input-channel dimension " + std::to_string(filters.dim(1))
                                      + " does not match input channels " + std::to_string(g.in_ch));
        }
        g.out_ch = filters.dim(0);
        g.filter_len = filters.dim(2);
    } else {
        shape_error("conv1d", "filters rank must be 2 or 3, got shape " + shape_string(filters.shape()));
    }
    if (stride < 1) shape_error("conv1d", "stride must be >= 1");
    if (g.filter_len < 1) shape_error("conv1d", "filter length must be >= 1");
    if (g.length < g.filter_len) {
        shape_error("conv1d", "input length " + std::to_string(g.length) + " shorter than filter length "
                                  + std::to_string(g.filter_len));
    }
    g.stride = stride;
    g.out_len = conv1d_output_length(g.length, g.filter_len, stride);
    return g;
}

// Number of sequences handled per im2col block; bounds the scratch matrix.
Index conv_chunk(const ConvGeometry& g)
{
    const Index per_seq = g.in_ch * g.filter_len * g.out_len;
    return std::max<Index>(1, Index{1 << 21} / std::max<Index>(per_seq, 1));
}

// Row o is x[o*stride, o*stride + F) of a single-channel sequence; rows overlap.
Eigen::Map<const RowMatrixXd, 0, Eigen::OuterStride<>> patches(const ConvGeometry& g, const double* seq)
{
    return {seq, g.out_len, g.filter_len, Eigen::OuterStride<>(g.stride)};
}

// cols(c*F + f, b*out_len + o) = x[b0 + b, c, o*stride + f]
void im2col(const ConvGeometry& g, const double* x, Index b0, Index nb, Eigen::MatrixXd& cols)
{
    cols.resize(g.in_ch * g.filter_len, nb * g.out_len);
    for (Index b = 0; b < nb; ++b) {
        const double* seq = x + (b0 + b) * g.in_ch * g.length;
        for (Index o = 0; o < g.out_len; ++o) {
            double* col = cols.col(b * g.out_len + o).data();
            for (Index c = 0; c < g.in_ch; ++c) {
                const double* src = seq + c * g.length + o * g.stride;
                std::copy(src, src + g.filter_len, col + c * g.filter_len);
            }
        }
    }
}

void col2im_add(const ConvGeometry& g, const Eigen::MatrixXd& dcols, Index b0, Index nb, double* dx)
{
    for (Index b = 0; b < nb; ++b) {
        double* seq = dx + (b0 + b) * g.in_ch * g.length;
        for (Index o = 0; o < g.out_len; ++o) {
            const double* col = dcols.col(b * g.out_len + o).data();
            for (Index c = 0; c < g.in_ch; ++c) {
                double* dst = seq + c * g.length + o * g.stride;
                const double* src = col + c * g.filter_len;
                for (Index f = 0; f < g.filter_len; ++f) dst[f] += src[f];
            }
        }
    }
}

struct NormGeometry {
    Index batch, channels, inner;
};

NormGeometry norm_geometry(const std::vector<Index>& shape)
{
    if (shape.size() == 2) return {shape[0], shape[1], 1};
    if (shape.size() == 3) return {shape[0], shape[1], shape[2]};
    shape_error("batchnorm", "input rank must be 2 or 3, got shape " + shape_string(shape));
}

}  // namespace

Index conv1d_output_length(Index length, Index filter_len, Index stride)
{
    if (stride < 1 || filter_len < 1 || length < filter_len) return 0;
    return (length - filter_len) / stride + 1;
}

Tensor conv1d_forward(const Tensor& input, const Tensor& filters, Index stride, const Tensor& bias)
{
    const ConvGeometry g = conv_geometry(input, filters, stride);
    if (bias.size() != g.out_ch) {
        shape_error("conv1d", "bias length " + std::to_string(bias.size()) + " does not match output channels "
                                  + std::to_string(g.out_ch));
    }
    Tensor out({g.batch, g.out_ch, g.out_len});
    const Eigen::Map<const RowMatrixXd> w(filters.data().data(), g.out_ch, g.in_ch * g.filter_len);
    if (g.in_ch == 1) {
        // one input channel: the patches are overlapping rows of the sequence itself
        for (Index b = 0; b < g.batch; ++b) {
            Eigen::Map<Eigen::MatrixXd> dst(out.data().data() + b * g.out_ch * g.out_len, g.out_len, g.out_ch);
            dst.noalias() = patches(g, input.data().data() + b * g.length) * w.transpose();
            dst.rowwise() += bias.data().transpose();
        }
        return out;
    }
    const Index chunk = conv_chunk(g);
    Eigen::MatrixXd cols;
    Eigen::MatrixXd y;
    for (Index b0 = 0; b0 < g.batch; b0 += chunk) {
        const Index nb = std::min(chunk, g.batch - b0);
        im2col(g, input.data().data(), b0, nb, cols);
        y.noalias() = w * cols;
        for (Index b = 0; b < nb; ++b) {
            for (Index k = 0; k < g.out_ch; ++k) {
                double* dst = out.data().data() + ((b0 + b) * g.out_ch + k) * g.out_len;
                const double bk = bias[k];
                for (Index o = 0; o < g.out_len; ++o) dst[o] = y(k, b * g.out_len + o) + bk;
            }
        }
    }
    return out;
}

Conv1dGrads conv1d_backward(const Tensor& input, const Tensor& filters, Index stride, const Tensor& grad_output,
                            bool need_input_grad)
{
    const ConvGeometry g = conv_geometry(input, filters, stride);
    if (grad_output.shape() != std::vector<Index>{g.batch, g.out_ch, g.out_len}) {
        shape_error("conv1d_backward", "grad_output shape " + shape_string(grad_output.shape())
                                           + " does not match forward output "
                                           + shape_string({g.batch, g.out_ch, g.out_len}));
    }
    Conv1dGrads grads;
    grads.filters = Tensor::zeros_like(filters);
    grads.bias = Tensor({g.out_ch});
    if (need_input_grad) grads.input = Tensor::zeros_like(input);

    const Eigen::Map<const RowMatrixXd> w(filters.data().data(), g.out_ch, g.in_ch * g.filter_len);
    Eigen::Map<RowMatrixXd> dw(grads.filters.data().data(), g.out_ch, g.in_ch * g.filter_len);
    if (g.in_ch == 1) {
        Eigen::MatrixXd dcols;
        for (Index b = 0; b < g.batch; ++b) {
            const Eigen::Map<const RowMatrixXd> gy(grad_output.data().data() + b * g.out_ch * g.out_len, g.out_ch,
                                                   g.out_len);
            const auto x = patches(g, input.data().data() + b * g.length);
            dw.noalias() += gy * x;
            grads.bias.data() += gy.rowwise().sum();
            if (need_input_grad) {
                dcols.noalias() = gy.transpose() * w;  // [out_len, F]
                double* dx = grads.input.data().data() + b * g.length;
                for (Index o = 0; o < g.out_len; ++o) {
                    for (Index f = 0; f < g.filter_len; ++f) dx[o * g.stride + f] += dcols(o, f);
                }
            }
        }
        return grads;
    }
    const Index chunk = conv_chunk(g);
    Eigen::MatrixXd cols;
    Eigen::MatrixXd gy;
    Eigen::MatrixXd dcols;
    for (Index b0 = 0; b0 < g.batch; b0 += chunk) {
        const Index nb = std::min(chunk, g.batch - b0);
        gy.resize(g.out_ch, nb * g.out_len);
        for (Index b = 0; b < nb; ++b) {
            for (Index k = 0; k < g.out_ch; ++k) {
                const double* src = grad_output.data().data() + ((b0 + b) * g.out_ch + k) * g.out_len;
                for (Index o = 0; o < g.out_len; ++o) gy(k, b * g.out_len + o) = src[o];
            }
        }
        im2col(g, input.data().data(), b0, nb, cols);
        dw.noalias() += gy * cols.transpose();
        grads.bias.data() += gy.rowwise().sum();
        if (need_input_grad) {
            dcols.noalias() = w.transpose() * gy;
            col2im_add(g, dcols, b0, nb, grads.input.data().data());
        }
    }
    return grads;
}

MaxPoolResult maxpool1d_forward(const Tensor& input, Index width)
{
    if (width < 1) shape_error("maxpool1d", "width must be >= 1");
    if (input.rank() < 1) shape_error("maxpool1d", "input must have at least one axis");
    const Index in_len = input.shape().back();
    const Index out_len = in_len / width;
    const Index rows = in_len == 0 ? 0 : input.size() / in_len;

    std::vector<Index> out_shape = input.shape();
    out_shape.back() = out_len;
    MaxPoolResult r{Tensor(out_shape), std::vector<Index>(static_cast<std::size_t>(rows * out_len))};
    for (Index row = 0; row < rows; ++row) {
        const double* src = input.data().data() + row * in_len;
        for (Index o = 0; o < out_len; ++o) {
            Index best = o * width;
            for (Index j = best + 1; j < (o + 1) * width; ++j) {
                if (src[j] > src[best]) best = j;
            }
            r.output[row * out_len + o] = src[best];
            r.argmax[static_cast<std::size_t>(row * out_len + o)] = row * in_len + best;
        }
    }
    return r;
}

Tensor maxpool1d_backward(const std::vector<Index>& input_shape, const std::vector<Index>& argmax,
                          const Tensor& grad_output)
{
    if (static_cast<Index>(argmax.size()) != grad_output.size()) {
        shape_error("maxpool1d_backward", "argmax table does not match grad_output size");
    }
    Tensor grad(input_shape);
    for (std::size_t i = 0; i < argmax.size(); ++i) grad[argmax[i]] += grad_output[static_cast<Index>(i)];
    return grad;
}

BatchNormState BatchNormState::init(Index channels)
{
    BatchNormState s;
    s.running_mean = Eigen::VectorXd::Zero(channels);
    s.running_var = Eigen::VectorXd::Ones(channels);
    return s;
}

Tensor batchnorm_forward(const Tensor& input, const Tensor& scale, const Tensor& shift, BatchNormState& state,
                         BatchNormMode mode, BatchNormCache* cache)
{
    const NormGeometry g = norm_geometry(input.shape());
    if (scale.size() != g.channels || shift.size() != g.channels) {
        shape_error("batchnorm", "scale/shift length must equal channel count " + std::to_string(g.channels));
    }
    if (state.running_mean.size() != g.channels || state.running_var.size() != g.channels) {
        shape_error("batchnorm", "running statistics do not match channel count " + std::to_string(g.channels));
    }
    if (mode == BatchNormMode::train && g.batch < 2) {
        throw std::invalid_argument("batchnorm: train mode needs a batch of at least 2, got "
                                    + std::to_string(g.batch));
    }

    const Index m = g.batch * g.inner;
    Eigen::VectorXd mean(g.channels);
    Eigen::VectorXd inv_std(g.channels);
    const double* x = input.data().data();
    auto element = [&](Index n, Index c, Index l) { return x[(n * g.channels + c) * g.inner + l]; };

    if (mode == BatchNormMode::train) {
        for (Index c = 0; c < g.channels; ++c) {
            double s = 0.0;
            for (Index n = 0; n < g.batch; ++n)
                for (Index l = 0; l < g.inner; ++l) s += element(n, c, l);
            const double mu = s / static_cast<double>(m);
            double ss = 0.0;
            for (Index n = 0; n < g.batch; ++n)
                for (Index l = 0; l < g.inner; ++l) {
                    const double d = element(n, c, l) - mu;
                    ss += d * d;
                }
            const double var = ss / static_cast<double>(m);
            mean[c] = mu;
            inv_std[c] = 1.0 / std::sqrt(var + state.epsilon);
            const double unbiased = m > 1 ? ss / static_cast<double>(m - 1) : var;
            state.running_mean[c] = (1.0 - state.momentum) * state.running_mean[c] + state.momentum * mu;
            state.running_var[c] = (1.0 - state.momentum) * state.running_var[c] + state.momentum * unbiased;
        }
    } else {
        mean = state.running_mean;
        inv_std = (state.running_var.array() + state.epsilon).rsqrt().matrix();
    }

    Tensor out(input.shape());
    Eigen::VectorXd normalized(input.size());
    for (Index n = 0; n < g.batch; ++n) {
        for (Index c = 0; c < g.channels; ++c) {
            const Index base = (n * g.channels + c) * g.inner;
            for (Index l = 0; l < g.inner; ++l) {
                const double xh = (x[base + l] - mean[c]) * inv_std[c];
                normalized[base + l] = xh;
                out[base + l] = scale[c] * xh + shift[c];
            }
        }
    }
    if (cache) {
        cache->mode = mode;
        cache->shape = input.shape();
        cache->normalized = std::move(normalized);
        cache->inv_std = std::move(inv_std);
    }
    return out;
}

BatchNormGrads batchnorm_backward(const BatchNormCache& cache, const Tensor& scale, const Tensor& grad_output)
{
    const NormGeometry g = norm_geometry(cache.shape);
    if (grad_output.shape() != cache.shape) {
        shape_error("batchnorm_backward", "grad_output shape " + shape_string(grad_output.shape())
                                              + " does not match forward input " + shape_string(cache.shape));
    }
    BatchNormGrads grads{Tensor(cache.shape), Tensor({g.channels}), Tensor({g.channels})};
    const double* dy = grad_output.data().data();
    const double* xh = cache.normalized.data();
    const double m = static_cast<double>(g.batch * g.inner);

    for (Index c = 0; c < g.channels; ++c) {
        double sum_dy = 0.0;
        double sum_dy_xh = 0.0;
        for (Index n = 0; n < g.batch; ++n) {
            const Index base = (n * g.channels + c) * g.inner;
            for (Index l = 0; l < g.inner; ++l) {
                sum_dy += dy[base + l];
                sum_dy_xh += dy[base + l] * xh[base + l];
            }
        }
        grads.shift[c] = sum_dy;
        grads.scale[c] = sum_dy_xh;
        const double k = scale[c] * cache.inv_std[c];
        for (Index n = 0; n < g.batch; ++n) {
            const Index base = (n * g.channels + c) * g.inner;
            for (Index l = 0; l < g.inner; ++l) {
                if (cache.mode == BatchNormMode::train) {
                    grads.input[base + l] = k * (dy[base + l] - sum_dy / m - xh[base + l] * sum_dy_xh / m);
                } else {
                    grads.input[base + l] = k * dy[base + l];
                }
            }
        }
    }
    return grads;
}

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias)
{
    if (input.rank() != 2 || weights.rank() != 2) {
        shape_error("dense", "expected rank-2 input and weights, got " + shape_string(input.shape()) + " and "
                                 + shape_string(weights.shape()));
    }
    const Index n = input.dim(0);
    const Index in = input.dim(1);
    const Index out = weights.dim(1);
    if (weights.dim(0) != in) {
        shape_error("dense", "input feature dimension " + std::to_string(in) + " does not match weight rows "
                                 + std::to_string(weights.dim(0)));
    }
    if (bias.size() != out) {
        shape_error("dense", "bias length " + std::to_string(bias.size()) + " does not match output dimension "
                                 + std::to_string(out));
    }
    Tensor y({n, out});
    auto ym = y.matrix(n, out);
    ym.noalias() = input.matrix(n, in) * weights.matrix(in, out);
    ym.rowwise() += bias.data().transpose();
    return y;
}

DenseGrads dense_backward(const Tensor& input, const Tensor& weights, const Tensor& grad_output, bool need_input_grad)
{
    const Index n = input.dim(0);
    const Index in = input.dim(1);
    const Index out = weights.dim(1);
    if (grad_output.shape() != std::vector<Index>{n, out}) {
        shape_error("dense_backward", "grad_output shape " + shape_string(grad_output.shape()) + " expected "
                                          + shape_string({n, out}));
    }
    DenseGrads g{Tensor(), Tensor(weights.shape()), Tensor({out})};
    const auto dy = grad_output.matrix(n, out);
    g.weights.matrix(in, out).noalias() = input.matrix(n, in).transpose() * dy;
    g.bias.data() = dy.colwise().sum().transpose();
    if (need_input_grad) {
        g.input = Tensor({n, in});
        g.input.matrix(n, in).noalias() = dy * weights.matrix(in, out).transpose();
    }
    return g;
}

Tensor relu_forward(const Tensor& input)
{
    Tensor out(input.shape());
    out.data() = input.data().cwiseMax(0.0);
    return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_output)
{
    if (input.shape() != grad_output.shape()) shape_error("relu_backward", "gradient shape mismatch");
    Tensor g(input.shape());
    g.data() = (input.data().array() > 0.0).select(grad_output.data(), 0.0);
    return g;
}

Tensor softmax(const Tensor& logits)
{
    if (logits.rank() != 2) shape_error("softmax", "logits must be [N, K]");
    const Index n = logits.dim(0);
    const Index k = logits.dim(1);
    Tensor p(logits.shape());
    auto pm = p.matrix(n, k);
    const auto lm = logits.matrix(n, k);
    for (Index i = 0; i < n; ++i) {
        const double mx = lm.row(i).maxCoeff();
        pm.row(i) = (lm.row(i).array() - mx).exp().matrix();
        pm.row(i) /= pm.row(i).sum();
    }
    return p;
}

LossResult softmax_cross_entropy(const Tensor& logits, std::span<const int> targets, std::span<const double> weights)
{
    if (logits.rank() != 2) shape_error("softmax_cross_entropy", "logits must be [N, K]");
    const Index n = logits.dim(0);
    const Index k = logits.dim(1);
    if (static_cast<Index>(targets.size()) != n || static_cast<Index>(weights.size()) != n) {
        shape_error("softmax_cross_entropy", "targets and weights must have one entry per row (" + std::to_string(n)
                                                 + ")");
    }
    double total_weight = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double w = weights[static_cast<std::size_t>(i)];
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("softmax_cross_entropy: weights must be finite and non-negative");
        }
        const int t = targets[static_cast<std::size_t>(i)];
        if (t < 0 || t >= k) {
            throw std::invalid_argument("softmax_cross_entropy: target " + std::to_string(t) + " outside [0, "
                                        + std::to_string(k) + ")");
        }
        total_weight += w;
    }
    if (total_weight <= 0.0) throw std::invalid_argument("softmax_cross_entropy: all example weights are zero");

    LossResult r{0.0, Tensor(logits.shape())};
    const auto lm = logits.matrix(n, k);
    auto gm = r.grad.matrix(n, k);
    for (Index i = 0; i < n; ++i) {
        const double w = weights[static_cast<std::size_t>(i)];
        const int t = targets[static_cast<std::size_t>(i)];
        const double mx = lm.row(i).maxCoeff();
        const Eigen::RowVectorXd e = (lm.row(i).array() - mx).exp().matrix();
        const double z = e.sum();
        r.loss += w * (std::log(z) - (lm(i, t) - mx));
        gm.row(i) = e / z;
        gm(i, t) -= 1.0;
        gm.row(i) *= w / total_weight;
    }
    r.loss /= total_weight;
    return r;
}

}  // namespace actc::ops
