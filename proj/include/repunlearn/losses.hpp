// The four unlearning objectives. All of them are averages of
// 0.5 * |target - f(z)|^2 terms, i.e. identity-covariance Gaussian KLs.
#pragma once

#include <vector>

#include "repunlearn/matrix.hpp"
#include "repunlearn/transformation.hpp"

namespace repunlearn {

// Per-class metadata the zero-shot regime is allowed to see.
struct ZeroShotMetadata {
    Matrix prototypes;                         // C x d_z classifier rows
    std::vector<std::size_t> class_counts;     // N^c
    std::vector<std::size_t> forget_class_counts;  // N_f^c
    std::size_t total{0};                      // N
    std::size_t forget_total{0};               // N_f
};

void validate_metadata(const ZeroShotMetadata& meta);

// (1 / 2 B_r) sum_i |z_i - f(z_i)|^2
double retain_loss(const Matrix& z_retain, const Transformation& f);

// (1 / 2 B_f B) sum_i sum_j |z_ref_j - f(z_forget_i)|^2
double forget_loss(const Matrix& z_forget, const Matrix& z_reference, const Transformation& f);

// (1 / 2 N_r) sum_c N_r^c |w_c - f(w_c)|^2
double zs_retain_loss(const ZeroShotMetadata& meta, const Transformation& f);

// (1 / 2 B_f N) sum_i sum_c N^c |w_c - f(z_forget_i)|^2
double zs_forget_loss(const Matrix& z_forget, const ZeroShotMetadata& meta,
                      const Transformation& f);

// retain + beta * forget
double total_loss(double retain_part, double forget_part, double beta);

// Gradient versions: value returned, d(loss)/d(params) accumulated into
// `grad` (must be pre-sized to f.num_params(), zeroing is the caller's call
// so the two halves of a composite objective can share one buffer).
double retain_loss_grad(const Matrix& z_retain, const Transformation& f, double scale,
                        std::vector<double>& grad);
double forget_loss_grad(const Matrix& z_forget, const Matrix& z_reference,
                        const Transformation& f, double scale, std::vector<double>& grad);
double zs_retain_loss_grad(const ZeroShotMetadata& meta, const Transformation& f, double scale,
                           std::vector<double>& grad);
double zs_forget_loss_grad(const Matrix& z_forget, const ZeroShotMetadata& meta,
                           const Transformation& f, double scale, std::vector<double>& grad);

}  // namespace repunlearn
