// Numerical certification of the variational inequalities on finite-support
// channels. Densities of Gaussian mixtures over a finite support are exact
// sums, so Monte Carlo error enters only through the z' draws.
//
// Channel model: X is an atom x_k with probability p_k, Z = z_k is the
// (deterministic) encoder table, and Z' | Z ~ N(f(Z), I) is the stochastic
// transformation channel. The conditional retain information I(Z'; Z | X_r)
// is identically zero under this model (Z is a function of X), which the
// retain-side report states outright.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "repunlearn/matrix.hpp"
#include "repunlearn/rng.hpp"
#include "repunlearn/transformation.hpp"

namespace repunlearn {

struct DiscreteGaussianChannel {
    Matrix encoder_table;             // K x d_z, z_k = e(x_k)
    std::vector<double> probs;        // p(x_k), sums to 1
    std::vector<std::size_t> labels;  // y(x_k) in [0, C)
    Matrix prototypes;                // C x d_z class centers for the label bound
    std::vector<bool> forget_mask;    // nonempty, proper subset
    Transformation transformation;
};

void validate_channel(const DiscreteGaussianChannel& ch);

// Class means of the encoder table, the default prototype choice.
Matrix label_class_means(const Matrix& encoder_table, std::span<const std::size_t> labels,
                         std::size_t num_classes);

struct Estimate {
    double value{0.0};
    double stderr_{0.0};
    std::size_t samples{0};
};

// Plug-in Monte Carlo of I(Z'; X_f): draw x_f from the forget-conditional,
// z' from N(f(z_k), I), average log N(z'; f(z_k), I) - log mixture over the
// forget atoms.
Estimate mi_forget_estimate(const DiscreteGaussianChannel& ch, std::size_t n_samples, Rng& rng);

// Retain-side variational upper bound; every term is closed form at finite
// support, so this is an exact weighted sum of identity-covariance KLs.
double retain_bound_rhs(const DiscreteGaussianChannel& ch);

// E_{x_f} KL( N(f(z_k), I) || sum_j p_j N(z_j, I) ), MC over z'.
Estimate data_marginal_bound_estimate(const DiscreteGaussianChannel& ch, std::size_t n_samples,
                                      Rng& rng);

// E_{x_f} sum_j p_j 0.5 |f(z_k) - z_j|^2, exact.
double reference_expectation_bound(const DiscreteGaussianChannel& ch);

// E_{x_f} sum_c p(c) 0.5 |f(z_k) - w_c|^2, exact.
double label_marginal_bound(const DiscreteGaussianChannel& ch);

struct BoundReport {
    std::uint64_t instance_seed{0};
    std::string quantity;
    double estimate{0.0};
    double estimate_stderr{0.0};
    double bound{0.0};
    double bound_stderr{0.0};
    std::size_t samples{0};
    double margin{0.0};  // bound - estimate
    bool pass{false};    // estimate - bound <= 3 * combined stderr
};

BoundReport make_report(std::uint64_t seed, const std::string& quantity, const Estimate& est,
                        double bound, double bound_stderr);

// The retain bound plus the forget chain (data-marginal bound, reference
// expectation, label marginal) and the Jensen ordering between the two
// forget-side bounds.
std::vector<BoundReport> certify_channel(const DiscreteGaussianChannel& ch,
                                         std::uint64_t instance_seed, std::size_t n_samples,
                                         Rng& rng);

// Randomized small instance: K in [2,8], d_z in [1,4], bounded-away-from-zero
// atom probabilities, a perturbed near-identity transformation of random
// depth, class means as prototypes.
DiscreteGaussianChannel random_channel(std::uint64_t seed);

void write_bound_reports_csv(const std::vector<BoundReport>& reports, const std::string& path);

}  // namespace repunlearn
