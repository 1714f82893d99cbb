// Closed-form quantities for isotropic unit-covariance Gaussians.
#pragma once

#include <span>
#include <vector>

#include "repunlearn/matrix.hpp"
#include "repunlearn/rng.hpp"

namespace repunlearn {

// KL( N(mu1, I) || N(mu2, I) ) = 0.5 * |mu1 - mu2|^2
double gaussian_kl_identity_cov(std::span<const double> mu1, std::span<const double> mu2);

// One draw from N(mean, cov_scale * I). cov_scale must be positive.
std::vector<double> sample_gaussian(Rng& rng, std::span<const double> mean, double cov_scale);

// log N(x; mu, I)
double log_gaussian_unit(std::span<const double> x, std::span<const double> mu);

// log sum_k weights[k] * N(x; centers.row(k), I), via log-sum-exp.
double log_gaussian_mixture_unit(std::span<const double> x, const Matrix& centers,
                                 std::span<const double> weights);

}  // namespace repunlearn
