#include "repunlearn/optim.hpp"

#include <cmath>

namespace repunlearn {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw std::invalid_argument("adam_step: shape mismatch");
    }
    for (double g : grads) {
        if (!std::isfinite(g)) throw std::invalid_argument("adam_step: non-finite gradient");
    }
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / c1;
        const double vhat = state.v[i] / c2;
        params[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
}

OptimizerKind parse_optimizer(const std::string& name) {
    if (name == "adam") return OptimizerKind::Adam;
    if (name == "adamw") return OptimizerKind::AdamW;
    if (name == "sgd") return OptimizerKind::Sgd;
    throw std::invalid_argument("unknown optimizer: " + name);
}

std::string optimizer_name(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::Adam: return "adam";
        case OptimizerKind::AdamW: return "adamw";
        case OptimizerKind::Sgd: return "sgd";
    }
    return "adam";
}

Optimizer::Optimizer(OptimizerKind kind, std::size_t n_params, double lr, double weight_decay)
    : kind_(kind),
      weight_decay_(weight_decay),
      adam_(n_params, lr),
      momentum_(kind == OptimizerKind::Sgd ? n_params : 0, 0.0),
      scratch_(n_params, 0.0) {}

void Optimizer::update(std::span<double> params, std::span<const double> grads) {
    switch (kind_) {
        case OptimizerKind::Adam: {
            for (std::size_t i = 0; i < params.size(); ++i) {
                scratch_[i] = grads[i] + weight_decay_ * params[i];
            }
            adam_step(params, scratch_, adam_);
            return;
        }
        case OptimizerKind::AdamW: {
            for (std::size_t i = 0; i < params.size(); ++i) {
                params[i] -= adam_.learning_rate * weight_decay_ * params[i];
            }
            adam_step(params, grads, adam_);
            return;
        }
        case OptimizerKind::Sgd: {
            for (std::size_t i = 0; i < params.size(); ++i) {
                const double g = grads[i] + weight_decay_ * params[i];
                momentum_[i] = 0.9 * momentum_[i] + g;
                params[i] -= adam_.learning_rate * momentum_[i];
            }
            return;
        }
    }
}

}  // namespace repunlearn
