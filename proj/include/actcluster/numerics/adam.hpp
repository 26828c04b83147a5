#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "actcluster/numerics/tensor.hpp"

namespace actc {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct Parameter {
    Tensor value;
    Tensor first_moment;
    Tensor second_moment;
};

/// Named trainable tensors plus their Adam state. Iteration order is by name,
/// which keeps every traversal (updates, checkpoints) deterministic.
class ParamSet {
public:
    void add(const std::string& name, Tensor value);

    bool contains(const std::string& name) const { return params_.count(name) != 0; }
    Tensor& operator[](const std::string& name);
    const Tensor& operator[](const std::string& name) const;

    const std::map<std::string, Parameter>& entries() const { return params_; }
    std::map<std::string, Parameter>& entries() { return params_; }

    std::uint64_t step() const { return step_; }
    void set_step(std::uint64_t step) { step_ = step; }

    /// Drops moments and the step counter.
    void reset_optimizer_state();

    /// Sum of element counts over all parameters.
    Index parameter_count() const;

private:
    std::map<std::string, Parameter> params_;
    std::uint64_t step_ = 0;
};

using GradSet = std::map<std::string, Tensor>;

/// One bias-corrected Adam update (no weight decay). Parameters without an
/// entry in `grads` are treated as having zero gradient. Throws
/// std::runtime_error on a non-finite gradient, naming the parameter.
void adam_step(ParamSet& params, const GradSet& grads, const AdamConfig& config = {});

}  // namespace actc
