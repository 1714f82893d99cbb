#include "repunlearn/gaussian.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace repunlearn {

double gaussian_kl_identity_cov(std::span<const double> mu1, std::span<const double> mu2) {
    if (mu1.size() != mu2.size()) {
        throw std::invalid_argument("gaussian_kl_identity_cov: dim mismatch");
    }
    return 0.5 * squared_distance(mu1, mu2);
}

std::vector<double> sample_gaussian(Rng& rng, std::span<const double> mean, double cov_scale) {
    if (cov_scale <= 0.0) throw std::invalid_argument("sample_gaussian: cov_scale must be positive");
    const double sd = std::sqrt(cov_scale);
    std::vector<double> out(mean.size());
    for (std::size_t i = 0; i < mean.size(); ++i) out[i] = rng.gaussian(mean[i], sd);
    return out;
}

double log_gaussian_unit(std::span<const double> x, std::span<const double> mu) {
    static const double log_2pi = std::log(2.0 * std::numbers::pi);
    return -0.5 * static_cast<double>(x.size()) * log_2pi - 0.5 * squared_distance(x, mu);
}

double log_gaussian_mixture_unit(std::span<const double> x, const Matrix& centers,
                                 std::span<const double> weights) {
    if (centers.rows != weights.size() || centers.rows == 0) {
        throw std::invalid_argument("log_gaussian_mixture_unit: bad mixture");
    }
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(centers.rows);
    for (std::size_t k = 0; k < centers.rows; ++k) {
        terms[k] = std::log(weights[k]) + log_gaussian_unit(x, centers.row(k));
        if (terms[k] > max_term) max_term = terms[k];
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - max_term);
    return max_term + std::log(s);
}

}  // namespace repunlearn
