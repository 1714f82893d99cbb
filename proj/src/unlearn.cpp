#include "repunlearn/unlearn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "repunlearn/log.hpp"
#include "repunlearn/optim.hpp"

namespace repunlearn {

void validate_unlearn_config(const UnlearnConfig& cfg) {
    // beta == 0 is allowed as the pure-consistency edge case; the composite
    // objective then carries only the retain term.
    if (cfg.beta < 0.0) throw std::invalid_argument("unlearn: beta must be nonnegative");
    if (cfg.learning_rate <= 0.0) throw std::invalid_argument("unlearn: learning rate must be positive");
    if (cfg.batch_retain < 1 || cfg.batch_forget < 1 || cfg.batch_reference < 1) {
        throw std::invalid_argument("unlearn: batch sizes must be >= 1");
    }
    if (cfg.tolerance < 0.0) throw std::invalid_argument("unlearn: tolerance must be >= 0");
    if (cfg.depth > 2) throw std::invalid_argument("unlearn: depth must be 0, 1 or 2");
}

namespace {

std::vector<std::size_t> widths_for(const UnlearnConfig& cfg) {
    return std::vector<std::size_t>(cfg.depth, cfg.hidden_width);
}

Matrix draw_uniform_rows(const Matrix& z, std::span<const std::size_t> pool, std::size_t count,
                         Rng& rng) {
    Matrix out(count, z.cols);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t idx = pool[rng.below(pool.size())];
        auto src = z.row(idx);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < z.cols; ++j) dst[j] = src[j];
    }
    return out;
}

bool relative_change_below(double prev, double cur, double tol) {
    return std::abs(cur - prev) < tol * std::max(std::abs(prev), 1e-12);
}

}  // namespace

UnlearnResult unlearn_standard(const FeedForwardNet& net, const LabeledDataset& data,
                               const UnlearnSplit& split, const UnlearnConfig& cfg,
                               AccessLog* log) {
    validate_unlearn_config(cfg);
    validate_split(split);
    if (split.forget_total == 0 || split.retain_total == 0) {
        throw std::invalid_argument("unlearn_standard: need nonempty retain and forget sets");
    }

    // Frozen encoder: compute every representation once.
    std::vector<std::size_t> all_idx(data.size());
    for (std::size_t i = 0; i < all_idx.size(); ++i) all_idx[i] = i;
    const Matrix z_all = representations(net, gather_rows(data, all_idx, log));

    Rng rng(derive_seed(cfg.seed, 11));
    UnlearnResult res;
    res.transformation = init_transformation(net.representation_dim(), cfg.depth,
                                             widths_for(cfg), rng);
    Transformation& f = res.transformation;

    std::vector<double> params = f.flatten_params();
    AdamState adam(params.size(), cfg.learning_rate);
    std::vector<double> grad(params.size());

    std::vector<std::size_t> forget_order = split.forget_indices;
    double prev_epoch_loss = 0.0;
    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        rng.shuffle(forget_order);
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < forget_order.size(); start += cfg.batch_forget) {
            const std::size_t stop = std::min(forget_order.size(), start + cfg.batch_forget);
            std::span<const std::size_t> fidx(forget_order.data() + start, stop - start);
            const Matrix z_f = take_rows(z_all, fidx);
            const Matrix z_r =
                draw_uniform_rows(z_all, split.retain_indices, cfg.batch_retain, rng);
            const Matrix z_ref = draw_uniform_rows(z_all, all_idx, cfg.batch_reference, rng);

            f.set_params(params);
            std::fill(grad.begin(), grad.end(), 0.0);
            const double lr = retain_loss_grad(z_r, f, 1.0, grad);
            const double lf =
                cfg.beta > 0.0 ? forget_loss_grad(z_f, z_ref, f, cfg.beta, grad) : 0.0;
            const double loss = lr + cfg.beta * lf;
            if (!std::isfinite(loss)) throw std::runtime_error("unlearn_standard: non-finite loss");
            adam_step(params, grad, adam);

            epoch_loss += loss * static_cast<double>(fidx.size());
            seen += fidx.size();
        }
        epoch_loss /= static_cast<double>(seen);
        res.epoch_losses.push_back(epoch_loss);
        res.epochs_run = epoch + 1;
        if (epoch > 0 && relative_change_below(prev_epoch_loss, epoch_loss, cfg.tolerance)) {
            res.converged = true;
            break;
        }
        prev_epoch_loss = epoch_loss;
    }
    f.set_params(params);
    log::info("standard unlearning: ", res.epochs_run, " epochs, final loss ",
              res.epoch_losses.empty() ? 0.0 : res.epoch_losses.back());
    return res;
}

UnlearnResult unlearn_zero_shot(const FeedForwardNet& net, const Matrix& forget_features,
                                const ZeroShotMetadata& meta, const UnlearnConfig& cfg) {
    validate_unlearn_config(cfg);
    validate_metadata(meta);
    if (forget_features.rows == 0) {
        throw std::invalid_argument("unlearn_zero_shot: empty forget set");
    }
    if (meta.forget_total >= meta.total) {
        throw std::invalid_argument("unlearn_zero_shot: metadata says retain set is empty");
    }

    const Matrix z_forget = representations(net, forget_features);

    Rng rng(derive_seed(cfg.seed, 13));
    UnlearnResult res;
    res.transformation = init_transformation(net.representation_dim(), cfg.depth,
                                             widths_for(cfg), rng);
    Transformation& f = res.transformation;

    std::vector<double> params = f.flatten_params();
    AdamState adam(params.size(), cfg.learning_rate);
    std::vector<double> grad(params.size());

    std::vector<std::size_t> order(z_forget.rows);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    double prev_epoch_loss = 0.0;
    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_forget) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_forget);
            std::span<const std::size_t> fidx(order.data() + start, stop - start);
            const Matrix z_f = take_rows(z_forget, fidx);

            f.set_params(params);
            std::fill(grad.begin(), grad.end(), 0.0);
            const double lr = zs_retain_loss_grad(meta, f, 1.0, grad);
            const double lf =
                cfg.beta > 0.0 ? zs_forget_loss_grad(z_f, meta, f, cfg.beta, grad) : 0.0;
            const double loss = lr + cfg.beta * lf;
            if (!std::isfinite(loss)) throw std::runtime_error("unlearn_zero_shot: non-finite loss");
            adam_step(params, grad, adam);

            epoch_loss += loss * static_cast<double>(fidx.size());
            seen += fidx.size();
        }
        epoch_loss /= static_cast<double>(seen);
        res.epoch_losses.push_back(epoch_loss);
        res.epochs_run = epoch + 1;
        if (epoch > 0 && relative_change_below(prev_epoch_loss, epoch_loss, cfg.tolerance)) {
            res.converged = true;
            break;
        }
        prev_epoch_loss = epoch_loss;
    }
    f.set_params(params);
    log::info("zero-shot unlearning: ", res.epochs_run, " epochs, final loss ",
              res.epoch_losses.empty() ? 0.0 : res.epoch_losses.back());
    return res;
}

ZeroShotMetadata make_zero_shot_metadata(const FeedForwardNet& net, const UnlearnSplit& split) {
    ZeroShotMetadata meta;
    meta.prototypes = classifier_prototypes(net);
    meta.class_counts = split.class_counts;
    meta.forget_class_counts = split.forget_class_counts;
    meta.total = split.total;
    meta.forget_total = split.forget_total;
    validate_metadata(meta);
    return meta;
}

}  // namespace repunlearn
