// Fully-connected classifier. The layer before the head is the
// representation layer: ReLU is applied after every layer except the
// representation output and the head, so dims {10, 32, 2, 6} give
// 10 -> 32 (ReLU) -> 2 (representation) -> 6 (logits).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "repunlearn/matrix.hpp"
#include "repunlearn/optim.hpp"
#include "repunlearn/rng.hpp"

namespace repunlearn {

struct AffineLayer {
    Matrix weights;            // out_dim x in_dim
    std::vector<double> bias;  // out_dim
};

struct FeedForwardNet {
    std::vector<std::size_t> layer_dims;  // input, hidden..., representation, classes
    std::vector<AffineLayer> layers;
    std::string activation{"relu"};

    std::size_t input_dim() const { return layer_dims.front(); }
    std::size_t representation_dim() const { return layer_dims[layer_dims.size() - 2]; }
    std::size_t num_classes() const { return layer_dims.back(); }

    std::size_t num_params() const;
    std::vector<double> flatten_params() const;
    void set_params(std::span<const double> flat);
};

// Symmetric uniform fan-in init (bound 1/sqrt(fan_in)), biases zero.
FeedForwardNet init_net(const std::vector<std::size_t>& layer_dims, Rng& rng);

struct ForwardResult {
    Matrix representation;  // batch x d_z
    Matrix logits;          // batch x C
};

ForwardResult forward(const FeedForwardNet& net, const Matrix& x);

// Penultimate activations only.
Matrix representations(const FeedForwardNet& net, const Matrix& x);

Matrix softmax_rows(const Matrix& logits);

// Mean softmax cross-entropy of the batch.
double cross_entropy_loss(const FeedForwardNet& net, const Matrix& x,
                          std::span<const std::size_t> labels);

// Analytic reverse-mode gradient of the mean cross-entropy w.r.t. all
// parameters, in flatten_params order.
double cross_entropy_loss_grad(const FeedForwardNet& net, const Matrix& x,
                               std::span<const std::size_t> labels,
                               std::vector<double>& grad_out);

struct TrainConfig {
    std::size_t epochs{100};
    std::size_t batch_size{128};
    double learning_rate{1e-3};
    double weight_decay{5e-4};
    std::string optimizer{"adam"};
    std::uint64_t seed{0};
};

struct LabeledDataset;  // dataset.hpp

// Mini-batch training from a fresh He init; per-epoch shuffling and the init
// derive from config.seed, so equal seeds give bit-identical weights.
// Throws on divergence (non-finite loss). epoch_losses, when given, receives
// the mean training loss of each epoch.
FeedForwardNet train_classifier(const TrainConfig& config, const LabeledDataset& data,
                                const std::vector<std::size_t>& layer_dims,
                                std::vector<double>* epoch_losses = nullptr);

// Fresh-init training on the retain rows only.
FeedForwardNet retrain_baseline(const TrainConfig& config, const LabeledDataset& retain_data,
                                const std::vector<std::size_t>& layer_dims);

// Continues optimizing an existing net on the retain rows.
FeedForwardNet fine_tune_baseline(const FeedForwardNet& net, const LabeledDataset& retain_data,
                                  std::size_t epochs, double learning_rate, std::uint64_t seed,
                                  double weight_decay = 5e-4);

// Rows of the classifier head: C x d_z.
Matrix classifier_prototypes(const FeedForwardNet& net);

void save_net_json(const FeedForwardNet& net, const std::string& path,
                   const TrainConfig* training = nullptr);
FeedForwardNet load_net_json(const std::string& path);

}  // namespace repunlearn
