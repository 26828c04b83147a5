#include "actcluster/numerics/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace actc {

void ParamSet::add(const std::string& name, Tensor value)
{
    if (params_.count(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
    Parameter p;
    p.first_moment = Tensor::zeros_like(value);
    p.second_moment = Tensor::zeros_like(value);
    p.value = std::move(value);
    params_.emplace(name, std::move(p));
}

Tensor& ParamSet::operator[](const std::string& name)
{
    auto it = params_.find(name);
    if (it == params_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
    return it->second.value;
}

const Tensor& ParamSet::operator[](const std::string& name) const
{
    auto it = params_.find(name);
    if (it == params_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
    return it->second.value;
}

void ParamSet::reset_optimizer_state()
{
    for (auto& [name, p] : params_) {
        p.first_moment.data().setZero();
        p.second_moment.data().setZero();
    }
    step_ = 0;
}

Index ParamSet::parameter_count() const
{
    Index n = 0;
    for (const auto& [name, p] : params_) n += p.value.size();
    return n;
}

void adam_step(ParamSet& params, const GradSet& grads, const AdamConfig& config)
{
    for (const auto& [name, g] : grads) {
        if (!params.contains(name)) throw std::invalid_argument("gradient for unknown parameter '" + name + "'");
        if (g.shape() != params[name].shape()) {
            throw std::invalid_argument("gradient for '" + name + "' has shape " + shape_string(g.shape())
                                        + ", parameter has " + shape_string(params[name].shape()));
        }
        if (!g.all_finite()) throw std::runtime_error("non-finite gradient for parameter '" + name + "'");
    }

    const std::uint64_t t = params.step() + 1;
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
    for (auto& [name, p] : params.entries()) {
        auto it = grads.find(name);
        auto m = p.first_moment.data().array();
        auto v = p.second_moment.data().array();
        if (it != grads.end()) {
            const auto g = it->second.data().array();
            m = config.beta1 * m + (1.0 - config.beta1) * g;
            v = config.beta2 * v + (1.0 - config.beta2) * g.square();
        } else {
            m *= config.beta1;
            v *= config.beta2;
        }
        p.value.data().array() -= config.learning_rate * (m / c1) / ((v / c2).sqrt() + config.epsilon);
    }
    params.set_step(t);
}

}  // namespace actc
