#include "repunlearn/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "repunlearn/dataset.hpp"
#include "repunlearn/json_io.hpp"
#include "repunlearn/log.hpp"

namespace repunlearn {

namespace {

// ReLU is applied after layer l iff it feeds another hidden layer, i.e.
// l + 2 < layer count (representation output and head stay linear).
inline bool relu_after(const FeedForwardNet& net, std::size_t layer) {
    return layer + 2 < net.layers.size();
}

}  // namespace

std::size_t FeedForwardNet::num_params() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.data.size() + l.bias.size();
    return n;
}

std::vector<double> FeedForwardNet::flatten_params() const {
    std::vector<double> flat;
    flat.reserve(num_params());
    for (const auto& l : layers) {
        flat.insert(flat.end(), l.weights.data.begin(), l.weights.data.end());
        flat.insert(flat.end(), l.bias.begin(), l.bias.end());
    }
    return flat;
}

void FeedForwardNet::set_params(std::span<const double> flat) {
    if (flat.size() != num_params()) throw std::invalid_argument("set_params: size mismatch");
    std::size_t off = 0;
    for (auto& l : layers) {
        std::copy_n(flat.begin() + off, l.weights.data.size(), l.weights.data.begin());
        off += l.weights.data.size();
        std::copy_n(flat.begin() + off, l.bias.size(), l.bias.begin());
        off += l.bias.size();
    }
}

FeedForwardNet init_net(const std::vector<std::size_t>& layer_dims, Rng& rng) {
    if (layer_dims.size() < 3) {
        throw std::invalid_argument("init_net: need input, representation and class dims");
    }
    FeedForwardNet net;
    net.layer_dims = layer_dims;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        AffineLayer layer;
        layer.weights = Matrix(layer_dims[l + 1], layer_dims[l]);
        layer.bias.assign(layer_dims[l + 1], 0.0);
        // Symmetric uniform fan-in scaling; unit gain converges reliably on
        // the small architectures this project trains.
        const double bound = std::sqrt(1.0 / static_cast<double>(layer_dims[l]));
        for (double& w : layer.weights.data) w = bound * (2.0 * rng.uniform() - 1.0);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace {

struct ForwardCache {
    // inputs[l] is what layer l consumed; pre[l] its affine output before any
    // activation. inputs has layers+1 entries, the last being the logits.
    std::vector<Matrix> inputs;
    std::vector<Matrix> pre;
};

Matrix affine_forward(const AffineLayer& layer, const Matrix& x) {
    Matrix out = matmul_nt(x, layer.weights);
    for (std::size_t i = 0; i < out.rows; ++i) {
        auto row = out.row(i);
        for (std::size_t j = 0; j < out.cols; ++j) row[j] += layer.bias[j];
    }
    return out;
}

ForwardCache forward_cached(const FeedForwardNet& net, const Matrix& x) {
    if (x.cols != net.input_dim()) throw std::invalid_argument("forward: input dim mismatch");
    ForwardCache cache;
    cache.inputs.push_back(x);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        Matrix pre = affine_forward(net.layers[l], cache.inputs.back());
        Matrix post = pre;
        if (relu_after(net, l)) {
            for (double& v : post.data) v = v > 0.0 ? v : 0.0;
        }
        cache.pre.push_back(std::move(pre));
        cache.inputs.push_back(std::move(post));
    }
    return cache;
}

}  // namespace

ForwardResult forward(const FeedForwardNet& net, const Matrix& x) {
    ForwardCache cache = forward_cached(net, x);
    ForwardResult out;
    out.logits = cache.inputs.back();
    out.representation = cache.inputs[cache.inputs.size() - 2];
    return out;
}

Matrix representations(const FeedForwardNet& net, const Matrix& x) {
    return forward(net, x).representation;
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix p = logits;
    for (std::size_t i = 0; i < p.rows; ++i) {
        auto row = p.row(i);
        double mx = row[0];
        for (double v : row) mx = std::max(mx, v);
        double sum = 0.0;
        for (double& v : row) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (double& v : row) v /= sum;
    }
    return p;
}

namespace {

double ce_from_logits(const Matrix& logits, std::span<const std::size_t> labels, Matrix* dlogits) {
    const std::size_t B = logits.rows;
    if (labels.size() != B) throw std::invalid_argument("cross entropy: label count mismatch");
    Matrix p = softmax_rows(logits);
    double loss = 0.0;
    for (std::size_t i = 0; i < B; ++i) {
        if (labels[i] >= logits.cols) throw std::invalid_argument("cross entropy: label out of range");
        loss -= std::log(std::max(p(i, labels[i]), 1e-300));
    }
    loss /= static_cast<double>(B);
    if (dlogits != nullptr) {
        *dlogits = p;
        for (std::size_t i = 0; i < B; ++i) (*dlogits)(i, labels[i]) -= 1.0;
        for (double& v : dlogits->data) v /= static_cast<double>(B);
    }
    return loss;
}

// Reverse pass shared by the net and any affine/ReLU stack: consumes
// d(loss)/d(output) and fills per-layer gradients in flatten order.
void backward_affine_stack(const std::vector<AffineLayer>& layers,
                           const ForwardCache& cache,
                           const std::vector<bool>& relu_mask,
                           Matrix delta,
                           std::vector<double>& grad_out) {
    std::size_t total = 0;
    for (const auto& l : layers) total += l.weights.data.size() + l.bias.size();
    grad_out.assign(total, 0.0);

    std::vector<std::size_t> offsets(layers.size());
    std::size_t off = 0;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        offsets[l] = off;
        off += layers[l].weights.data.size() + layers[l].bias.size();
    }

    for (std::size_t li = layers.size(); li-- > 0;) {
        const AffineLayer& layer = layers[li];
        const Matrix& input = cache.inputs[li];
        // dW = delta^T @ input, db = column sums of delta.
        double* gw = grad_out.data() + offsets[li];
        double* gb = gw + layer.weights.data.size();
        for (std::size_t i = 0; i < delta.rows; ++i) {
            auto drow = delta.row(i);
            auto xrow = input.row(i);
            for (std::size_t o = 0; o < layer.weights.rows; ++o) {
                const double d = drow[o];
                if (d == 0.0) continue;
                double* gwrow = gw + o * layer.weights.cols;
                for (std::size_t j = 0; j < layer.weights.cols; ++j) gwrow[j] += d * xrow[j];
                gb[o] += d;
            }
        }
        if (li == 0) break;
        // dInput = delta @ W, then the upstream ReLU mask.
        Matrix dinput = matmul(delta, layer.weights);
        if (relu_mask[li - 1]) {
            const Matrix& pre = cache.pre[li - 1];
            for (std::size_t k = 0; k < dinput.data.size(); ++k) {
                if (pre.data[k] <= 0.0) dinput.data[k] = 0.0;
            }
        }
        delta = std::move(dinput);
    }
}

}  // namespace

double cross_entropy_loss(const FeedForwardNet& net, const Matrix& x,
                          std::span<const std::size_t> labels) {
    ForwardCache cache = forward_cached(net, x);
    return ce_from_logits(cache.inputs.back(), labels, nullptr);
}

double cross_entropy_loss_grad(const FeedForwardNet& net, const Matrix& x,
                               std::span<const std::size_t> labels,
                               std::vector<double>& grad_out) {
    ForwardCache cache = forward_cached(net, x);
    Matrix dlogits;
    const double loss = ce_from_logits(cache.inputs.back(), labels, &dlogits);
    std::vector<bool> relu_mask(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) relu_mask[l] = relu_after(net, l);
    backward_affine_stack(net.layers, cache, relu_mask, std::move(dlogits), grad_out);
    return loss;
}

namespace {

FeedForwardNet train_impl(const TrainConfig& config, const LabeledDataset& data,
                          FeedForwardNet net, std::vector<double>* epoch_losses) {
    if (config.batch_size < 1 || config.learning_rate <= 0.0) {
        throw std::invalid_argument("train: batch size and learning rate must be positive");
    }
    validate_dataset(data);
    if (data.dim() != net.input_dim()) throw std::invalid_argument("train: data dim mismatch");

    std::vector<double> params = net.flatten_params();
    Optimizer opt(parse_optimizer(config.optimizer), params.size(), config.learning_rate,
                  config.weight_decay);
    Rng shuffle_rng(derive_seed(config.seed, 1));

    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<double> grad;
    double prev_smoothed = 0.0;
    double smoothed = 0.0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            std::span<const std::size_t> idx(order.data() + start, stop - start);
            Matrix xb = take_rows(data.features, idx);
            std::vector<std::size_t> yb(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) yb[i] = data.labels[idx[i]];

            net.set_params(params);
            const double loss = cross_entropy_loss_grad(net, xb, yb, grad);
            if (!std::isfinite(loss)) throw std::runtime_error("training diverged: non-finite loss");
            opt.update(params, grad);
            epoch_loss += loss * static_cast<double>(idx.size());
            seen += idx.size();
        }
        epoch_loss /= static_cast<double>(seen);
        if (epoch_losses != nullptr) epoch_losses->push_back(epoch_loss);
        // Soft monotonicity watch over a coarse moving average.
        smoothed = epoch == 0 ? epoch_loss : 0.8 * smoothed + 0.2 * epoch_loss;
        if (epoch > 5 && smoothed > prev_smoothed * 1.05) {
            log::warn("epoch ", epoch, ": smoothed training loss increased (", prev_smoothed,
                      " -> ", smoothed, ")");
        }
        prev_smoothed = smoothed;
    }
    net.set_params(params);
    return net;
}

}  // namespace

FeedForwardNet train_classifier(const TrainConfig& config, const LabeledDataset& data,
                                const std::vector<std::size_t>& layer_dims,
                                std::vector<double>* epoch_losses) {
    Rng init_rng(derive_seed(config.seed, 0));
    FeedForwardNet net = init_net(layer_dims, init_rng);
    return train_impl(config, data, std::move(net), epoch_losses);
}

FeedForwardNet retrain_baseline(const TrainConfig& config, const LabeledDataset& retain_data,
                                const std::vector<std::size_t>& layer_dims) {
    return train_classifier(config, retain_data, layer_dims, nullptr);
}

FeedForwardNet fine_tune_baseline(const FeedForwardNet& net, const LabeledDataset& retain_data,
                                  std::size_t epochs, double learning_rate, std::uint64_t seed,
                                  double weight_decay) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = 128;
    cfg.learning_rate = learning_rate;
    cfg.weight_decay = weight_decay;
    cfg.optimizer = "adam";
    cfg.seed = seed;
    if (epochs == 0) return net;
    return train_impl(cfg, retain_data, net, nullptr);
}

Matrix classifier_prototypes(const FeedForwardNet& net) {
    return net.layers.back().weights;
}

void save_net_json(const FeedForwardNet& net, const std::string& path,
                   const TrainConfig* training) {
    JsonWriter w;
    w.begin_object();
    w.key("format_version").value_uint(1);
    w.key("layer_dims").value_array(std::span<const std::size_t>(net.layer_dims));
    w.key("activation").value(net.activation);
    w.key("layers").begin_array();
    for (const auto& l : net.layers) {
        w.begin_object();
        w.key("weights").value_array(std::span<const double>(l.weights.data));
        w.key("bias").value_array(std::span<const double>(l.bias));
        w.end_object();
    }
    w.end_array();
    if (training != nullptr) {
        w.key("training_config").begin_object();
        w.key("epochs").value_uint(training->epochs);
        w.key("batch_size").value_uint(training->batch_size);
        w.key("learning_rate").value(training->learning_rate);
        w.key("weight_decay").value(training->weight_decay);
        w.key("optimizer").value(training->optimizer);
        w.end_object();
        w.key("seed").value_uint(training->seed);
    }
    w.end_object();
    write_text_file(path, w.str() + "\n");
}

FeedForwardNet load_net_json(const std::string& path) {
    const nlohmann::json doc = nlohmann::json::parse(read_text_file(path));
    if (doc.at("format_version").get<int>() != 1) {
        throw std::runtime_error("unsupported model format version in " + path);
    }
    FeedForwardNet net;
    net.layer_dims = doc.at("layer_dims").get<std::vector<std::size_t>>();
    net.activation = doc.at("activation").get<std::string>();
    for (const auto& jl : doc.at("layers")) {
        AffineLayer layer;
        const std::size_t l = net.layers.size();
        layer.weights = Matrix(net.layer_dims[l + 1], net.layer_dims[l]);
        const auto wdata = jl.at("weights").get<std::vector<double>>();
        if (wdata.size() != layer.weights.data.size()) {
            throw std::runtime_error("model weights shape mismatch in " + path);
        }
        layer.weights.data = wdata;
        layer.bias = jl.at("bias").get<std::vector<double>>();
        if (layer.bias.size() != net.layer_dims[l + 1]) {
            throw std::runtime_error("model bias shape mismatch in " + path);
        }
        net.layers.push_back(std::move(layer));
    }
    if (net.layers.size() + 1 != net.layer_dims.size()) {
        throw std::runtime_error("model layer count mismatch in " + path);
    }
    return net;
}

}  // namespace repunlearn
