// First-order optimizers on flat parameter vectors.
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace repunlearn {

struct AdamState {
    double learning_rate{1e-3};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};
    std::size_t step{0};
    std::vector<double> m;  // first moment
    std::vector<double> v;  // second moment

    explicit AdamState(std::size_t n_params, double lr = 1e-3)
        : learning_rate(lr), m(n_params, 0.0), v(n_params, 0.0) {}
};

// Bias-corrected Adam update in place. Throws on non-finite gradients.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

enum class OptimizerKind { Adam, AdamW, Sgd };

OptimizerKind parse_optimizer(const std::string& name);
std::string optimizer_name(OptimizerKind kind);

// Mini-batch trainer-side optimizer: Adam couples weight decay into the
// gradient (L2), AdamW decays weights directly, SGD uses momentum 0.9.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, std::size_t n_params, double lr, double weight_decay);

    void update(std::span<double> params, std::span<const double> grads);

private:
    OptimizerKind kind_;
    double weight_decay_;
    AdamState adam_;
    std::vector<double> momentum_;
    std::vector<double> scratch_;
};

}  // namespace repunlearn
