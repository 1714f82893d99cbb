#include "repunlearn/losses.hpp"

#include <stdexcept>

namespace repunlearn {

void validate_metadata(const ZeroShotMetadata& meta) {
    const std::size_t C = meta.prototypes.rows;
    if (meta.class_counts.size() != C || meta.forget_class_counts.size() != C) {
        throw std::invalid_argument("metadata: count length mismatch");
    }
    std::size_t total = 0;
    std::size_t forget = 0;
    for (std::size_t c = 0; c < C; ++c) {
        if (meta.forget_class_counts[c] > meta.class_counts[c]) {
            throw std::invalid_argument("metadata: forget count exceeds class count");
        }
        total += meta.class_counts[c];
        forget += meta.forget_class_counts[c];
    }
    if (total != meta.total || forget != meta.forget_total) {
        throw std::invalid_argument("metadata: totals inconsistent");
    }
}

double retain_loss(const Matrix& z_retain, const Transformation& f) {
    if (z_retain.rows == 0) throw std::invalid_argument("retain_loss: empty batch");
    const Matrix out = apply(f, z_retain);
    double s = 0.0;
    for (std::size_t i = 0; i < z_retain.rows; ++i) {
        s += squared_distance(z_retain.row(i), out.row(i));
    }
    return s / (2.0 * static_cast<double>(z_retain.rows));
}

double forget_loss(const Matrix& z_forget, const Matrix& z_reference, const Transformation& f) {
    if (z_forget.rows == 0 || z_reference.rows == 0) {
        throw std::invalid_argument("forget_loss: empty batch");
    }
    const Matrix out = apply(f, z_forget);
    double s = 0.0;
    for (std::size_t i = 0; i < out.rows; ++i) {
        for (std::size_t j = 0; j < z_reference.rows; ++j) {
            s += squared_distance(z_reference.row(j), out.row(i));
        }
    }
    return s / (2.0 * static_cast<double>(out.rows) * static_cast<double>(z_reference.rows));
}

double zs_retain_loss(const ZeroShotMetadata& meta, const Transformation& f) {
    validate_metadata(meta);
    if (meta.forget_total >= meta.total) {
        throw std::invalid_argument("zs_retain_loss: retain set is empty");
    }
    const Matrix out = apply(f, meta.prototypes);
    const double retain_total = static_cast<double>(meta.total - meta.forget_total);
    double s = 0.0;
    for (std::size_t c = 0; c < meta.prototypes.rows; ++c) {
        const std::size_t nrc = meta.class_counts[c] - meta.forget_class_counts[c];
        if (nrc == 0) continue;  // fully forgotten class, zero weight
        s += static_cast<double>(nrc) * squared_distance(meta.prototypes.row(c), out.row(c));
    }
    return s / (2.0 * retain_total);
}

double zs_forget_loss(const Matrix& z_forget, const ZeroShotMetadata& meta,
                      const Transformation& f) {
    validate_metadata(meta);
    if (z_forget.rows == 0) throw std::invalid_argument("zs_forget_loss: empty batch");
    const Matrix out = apply(f, z_forget);
    double s = 0.0;
    for (std::size_t i = 0; i < out.rows; ++i) {
        for (std::size_t c = 0; c < meta.prototypes.rows; ++c) {
            s += static_cast<double>(meta.class_counts[c]) *
                 squared_distance(meta.prototypes.row(c), out.row(i));
        }
    }
    return s / (2.0 * static_cast<double>(out.rows) * static_cast<double>(meta.total));
}

double total_loss(double retain_part, double forget_part, double beta) {
    if (beta <= 0.0) throw std::invalid_argument("total_loss: beta must be positive");
    return retain_part + beta * forget_part;
}

double retain_loss_grad(const Matrix& z_retain, const Transformation& f, double scale,
                        std::vector<double>& grad) {
    const double loss = retain_loss(z_retain, f);
    const Matrix out = apply(f, z_retain);
    Matrix dout(out.rows, out.cols);
    const double inv_b = scale / static_cast<double>(z_retain.rows);
    for (std::size_t i = 0; i < out.rows; ++i) {
        auto d = dout.row(i);
        auto o = out.row(i);
        auto z = z_retain.row(i);
        for (std::size_t j = 0; j < out.cols; ++j) d[j] = inv_b * (o[j] - z[j]);
    }
    apply_backward_accumulate(f, z_retain, dout, grad);
    return loss;
}

double forget_loss_grad(const Matrix& z_forget, const Matrix& z_reference,
                        const Transformation& f, double scale, std::vector<double>& grad) {
    const double loss = forget_loss(z_forget, z_reference, f);
    const Matrix out = apply(f, z_forget);
    const std::vector<double> ref_mean = column_mean(z_reference);
    // sum_j (f_i - z_j) = B (f_i - mean_ref), so the pairwise gradient
    // collapses to a mean-pull per forget row.
    Matrix dout(out.rows, out.cols);
    const double inv = scale / static_cast<double>(z_forget.rows);
    for (std::size_t i = 0; i < out.rows; ++i) {
        auto d = dout.row(i);
        auto o = out.row(i);
        for (std::size_t j = 0; j < out.cols; ++j) d[j] = inv * (o[j] - ref_mean[j]);
    }
    apply_backward_accumulate(f, z_forget, dout, grad);
    return loss;
}

double zs_retain_loss_grad(const ZeroShotMetadata& meta, const Transformation& f, double scale,
                           std::vector<double>& grad) {
    const double loss = zs_retain_loss(meta, f);
    const Matrix out = apply(f, meta.prototypes);
    const double retain_total = static_cast<double>(meta.total - meta.forget_total);
    Matrix dout(out.rows, out.cols);
    for (std::size_t c = 0; c < out.rows; ++c) {
        const double w = scale *
                         static_cast<double>(meta.class_counts[c] - meta.forget_class_counts[c]) /
                         retain_total;
        auto d = dout.row(c);
        auto o = out.row(c);
        auto p = meta.prototypes.row(c);
        for (std::size_t j = 0; j < out.cols; ++j) d[j] = w * (o[j] - p[j]);
    }
    apply_backward_accumulate(f, meta.prototypes, dout, grad);
    return loss;
}

double zs_forget_loss_grad(const Matrix& z_forget, const ZeroShotMetadata& meta,
                           const Transformation& f, double scale, std::vector<double>& grad) {
    const double loss = zs_forget_loss(z_forget, meta, f);
    const Matrix out = apply(f, z_forget);
    // Count-weighted prototype centroid: sum_c N^c (f_i - w_c) / N = f_i - wbar.
    std::vector<double> wbar(meta.prototypes.cols, 0.0);
    for (std::size_t c = 0; c < meta.prototypes.rows; ++c) {
        const double w = static_cast<double>(meta.class_counts[c]) /
                         static_cast<double>(meta.total);
        auto p = meta.prototypes.row(c);
        for (std::size_t j = 0; j < wbar.size(); ++j) wbar[j] += w * p[j];
    }
    Matrix dout(out.rows, out.cols);
    const double inv = scale / static_cast<double>(z_forget.rows);
    for (std::size_t i = 0; i < out.rows; ++i) {
        auto d = dout.row(i);
        auto o = out.row(i);
        for (std::size_t j = 0; j < out.cols; ++j) d[j] = inv * (o[j] - wbar[j]);
    }
    apply_backward_accumulate(f, z_forget, dout, grad);
    return loss;
}

}  // namespace repunlearn
