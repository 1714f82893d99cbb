#include "repunlearn/bounds.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "repunlearn/gaussian.hpp"
#include "repunlearn/json_io.hpp"

namespace repunlearn {

void validate_channel(const DiscreteGaussianChannel& ch) {
    const std::size_t K = ch.encoder_table.rows;
    if (K == 0) throw std::invalid_argument("channel: empty support");
    if (ch.probs.size() != K || ch.labels.size() != K || ch.forget_mask.size() != K) {
        throw std::invalid_argument("channel: field length mismatch");
    }
    double psum = 0.0;
    for (double p : ch.probs) {
        if (p <= 0.0) throw std::invalid_argument("channel: probabilities must be positive");
        psum += p;
    }
    if (std::abs(psum - 1.0) > 1e-9) throw std::invalid_argument("channel: probabilities must sum to 1");
    std::size_t n_forget = 0;
    for (bool b : ch.forget_mask) n_forget += b ? 1 : 0;
    if (n_forget == 0 || n_forget == K) {
        throw std::invalid_argument("channel: forget mask must be a nonempty proper subset");
    }
    for (std::size_t y : ch.labels) {
        if (y >= ch.prototypes.rows) throw std::invalid_argument("channel: label out of range");
    }
    if (ch.transformation.dim != ch.encoder_table.cols) {
        throw std::invalid_argument("channel: transformation dim mismatch");
    }
}

Matrix label_class_means(const Matrix& encoder_table, std::span<const std::size_t> labels,
                         std::size_t num_classes) {
    Matrix means(num_classes, encoder_table.cols);
    std::vector<std::size_t> counts(num_classes, 0);
    for (std::size_t k = 0; k < encoder_table.rows; ++k) {
        counts[labels[k]] += 1;
        auto dst = means.row(labels[k]);
        auto src = encoder_table.row(k);
        for (std::size_t j = 0; j < means.cols; ++j) dst[j] += src[j];
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (counts[c] == 0) throw std::invalid_argument("label_class_means: empty class");
        auto row = means.row(c);
        for (std::size_t j = 0; j < means.cols; ++j) row[j] /= static_cast<double>(counts[c]);
    }
    return means;
}

namespace {

struct ForgetView {
    std::vector<std::size_t> atoms;   // indices into the support
    std::vector<double> cond_probs;   // renormalized over the forget atoms
    std::vector<double> cdf;
};

ForgetView forget_view(const DiscreteGaussianChannel& ch) {
    ForgetView v;
    double mass = 0.0;
    for (std::size_t k = 0; k < ch.forget_mask.size(); ++k) {
        if (ch.forget_mask[k]) {
            v.atoms.push_back(k);
            mass += ch.probs[k];
        }
    }
    double acc = 0.0;
    for (std::size_t a : v.atoms) {
        const double p = ch.probs[a] / mass;
        v.cond_probs.push_back(p);
        acc += p;
        v.cdf.push_back(acc);
    }
    v.cdf.back() = 1.0;
    return v;
}

std::size_t draw_atom(const ForgetView& v, Rng& rng) {
    const double u = rng.uniform();
    for (std::size_t i = 0; i < v.cdf.size(); ++i) {
        if (u < v.cdf[i]) return i;
    }
    return v.cdf.size() - 1;
}

Estimate mean_and_stderr(const std::vector<double>& samples) {
    Estimate e;
    e.samples = samples.size();
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= static_cast<double>(samples.size() - 1);
    e.value = mean;
    e.stderr_ = std::sqrt(var / static_cast<double>(samples.size()));
    return e;
}

}  // namespace

Estimate mi_forget_estimate(const DiscreteGaussianChannel& ch, std::size_t n_samples, Rng& rng) {
    validate_channel(ch);
    if (n_samples < 2) throw std::invalid_argument("mi_forget_estimate: need n_samples >= 2");
    const ForgetView view = forget_view(ch);

    Matrix forget_centers(view.atoms.size(), ch.encoder_table.cols);
    {
        Matrix forget_z(view.atoms.size(), ch.encoder_table.cols);
        for (std::size_t i = 0; i < view.atoms.size(); ++i) {
            auto src = ch.encoder_table.row(view.atoms[i]);
            auto dst = forget_z.row(i);
            for (std::size_t j = 0; j < forget_z.cols; ++j) dst[j] = src[j];
        }
        forget_centers = apply(ch.transformation, forget_z);
    }

    std::vector<double> terms(n_samples);
    std::vector<double> zprime(ch.encoder_table.cols);
    for (std::size_t s = 0; s < n_samples; ++s) {
        const std::size_t i = draw_atom(view, rng);
        auto center = forget_centers.row(i);
        for (std::size_t j = 0; j < zprime.size(); ++j) zprime[j] = rng.gaussian(center[j], 1.0);
        terms[s] = log_gaussian_unit(zprime, center) -
                   log_gaussian_mixture_unit(zprime, forget_centers, view.cond_probs);
    }
    return mean_and_stderr(terms);
}

double retain_bound_rhs(const DiscreteGaussianChannel& ch) {
    validate_channel(ch);
    double retain_mass = 0.0;
    for (std::size_t k = 0; k < ch.probs.size(); ++k) {
        if (!ch.forget_mask[k]) retain_mass += ch.probs[k];
    }
    const Matrix mapped = apply(ch.transformation, ch.encoder_table);
    double rhs = 0.0;
    for (std::size_t k = 0; k < ch.probs.size(); ++k) {
        if (ch.forget_mask[k]) continue;
        rhs += (ch.probs[k] / retain_mass) *
               gaussian_kl_identity_cov(mapped.row(k), ch.encoder_table.row(k));
    }
    return rhs;
}

Estimate data_marginal_bound_estimate(const DiscreteGaussianChannel& ch, std::size_t n_samples,
                                      Rng& rng) {
    validate_channel(ch);
    if (n_samples < 2) throw std::invalid_argument("data_marginal_bound: need n_samples >= 2");
    const ForgetView view = forget_view(ch);
    const Matrix mapped = apply(ch.transformation, ch.encoder_table);

    Matrix forget_centers(view.atoms.size(), mapped.cols);
    for (std::size_t i = 0; i < view.atoms.size(); ++i) {
        auto src = mapped.row(view.atoms[i]);
        auto dst = forget_centers.row(i);
        for (std::size_t j = 0; j < mapped.cols; ++j) dst[j] = src[j];
    }

    std::vector<double> terms(n_samples);
    std::vector<double> zprime(mapped.cols);
    for (std::size_t s = 0; s < n_samples; ++s) {
        const std::size_t i = draw_atom(view, rng);
        auto center = forget_centers.row(i);
        for (std::size_t j = 0; j < zprime.size(); ++j) zprime[j] = rng.gaussian(center[j], 1.0);
        terms[s] = log_gaussian_unit(zprime, center) -
                   log_gaussian_mixture_unit(zprime, ch.encoder_table, ch.probs);
    }
    return mean_and_stderr(terms);
}

double reference_expectation_bound(const DiscreteGaussianChannel& ch) {
    validate_channel(ch);
    const ForgetView view = forget_view(ch);
    const Matrix mapped = apply(ch.transformation, ch.encoder_table);
    double rhs = 0.0;
    for (std::size_t i = 0; i < view.atoms.size(); ++i) {
        auto fz = mapped.row(view.atoms[i]);
        double inner = 0.0;
        for (std::size_t j = 0; j < ch.encoder_table.rows; ++j) {
            inner += ch.probs[j] * gaussian_kl_identity_cov(fz, ch.encoder_table.row(j));
        }
        rhs += view.cond_probs[i] * inner;
    }
    return rhs;
}

double label_marginal_bound(const DiscreteGaussianChannel& ch) {
    validate_channel(ch);
    const ForgetView view = forget_view(ch);
    const Matrix mapped = apply(ch.transformation, ch.encoder_table);
    std::vector<double> class_prob(ch.prototypes.rows, 0.0);
    for (std::size_t k = 0; k < ch.labels.size(); ++k) class_prob[ch.labels[k]] += ch.probs[k];
    double rhs = 0.0;
    for (std::size_t i = 0; i < view.atoms.size(); ++i) {
        auto fz = mapped.row(view.atoms[i]);
        double inner = 0.0;
        for (std::size_t c = 0; c < ch.prototypes.rows; ++c) {
            inner += class_prob[c] * gaussian_kl_identity_cov(fz, ch.prototypes.row(c));
        }
        rhs += view.cond_probs[i] * inner;
    }
    return rhs;
}

BoundReport make_report(std::uint64_t seed, const std::string& quantity, const Estimate& est,
                        double bound, double bound_stderr) {
    BoundReport r;
    r.instance_seed = seed;
    r.quantity = quantity;
    r.estimate = est.value;
    r.estimate_stderr = est.stderr_;
    r.bound = bound;
    r.bound_stderr = bound_stderr;
    r.samples = est.samples;
    r.margin = bound - est.value;
    const double combined = std::sqrt(est.stderr_ * est.stderr_ + bound_stderr * bound_stderr);
    // The 1e-12 floor absorbs accumulation roundoff in degenerate instances
    // where both sides are numerically zero.
    r.pass = est.value - bound <= 3.0 * combined + 1e-12;
    return r;
}

std::vector<BoundReport> certify_channel(const DiscreteGaussianChannel& ch,
                                         std::uint64_t instance_seed, std::size_t n_samples,
                                         Rng& rng) {
    std::vector<BoundReport> out;

    // Retain side: I(Z'; Z | X_r) vanishes for a deterministic encoder.
    Estimate retain_mi;
    retain_mi.value = 0.0;
    retain_mi.stderr_ = 0.0;
    retain_mi.samples = 0;
    out.push_back(make_report(instance_seed, "retain_conditional", retain_mi,
                              retain_bound_rhs(ch), 0.0));

    const Estimate mi = mi_forget_estimate(ch, n_samples, rng);
    const Estimate data_bound = data_marginal_bound_estimate(ch, n_samples, rng);
    const double ref_bound = reference_expectation_bound(ch);
    const double label_bound = label_marginal_bound(ch);

    out.push_back(make_report(instance_seed, "forget_data_marginal", mi, data_bound.value,
                              data_bound.stderr_));
    out.push_back(make_report(instance_seed, "forget_reference_expectation", mi, ref_bound, 0.0));
    out.push_back(make_report(instance_seed, "forget_label_marginal", mi, label_bound, 0.0));
    out.push_back(make_report(instance_seed, "jensen_ordering", data_bound, ref_bound, 0.0));
    return out;
}

DiscreteGaussianChannel random_channel(std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t K = 2 + static_cast<std::size_t>(rng.below(7));   // 2..8
    const std::size_t d = 1 + static_cast<std::size_t>(rng.below(4));   // 1..4
    const std::size_t max_classes = std::min<std::size_t>(K, 4);
    const std::size_t C =
        max_classes == 2 ? 2 : 2 + static_cast<std::size_t>(rng.below(max_classes - 1));

    DiscreteGaussianChannel ch;
    ch.encoder_table = Matrix(K, d);
    for (double& v : ch.encoder_table.data) v = rng.gaussian(0.0, 1.5);

    ch.probs.resize(K);
    double psum = 0.0;
    for (double& p : ch.probs) {
        p = 0.2 + rng.uniform();
        psum += p;
    }
    for (double& p : ch.probs) p /= psum;

    // Cyclic assignment covers every class, then shuffle.
    ch.labels.resize(K);
    std::vector<std::size_t> order(K);
    for (std::size_t k = 0; k < K; ++k) order[k] = k;
    rng.shuffle(order);
    for (std::size_t k = 0; k < K; ++k) ch.labels[order[k]] = k % C;

    ch.prototypes = label_class_means(ch.encoder_table, ch.labels, C);

    const std::size_t n_forget = 1 + static_cast<std::size_t>(rng.below(K - 1));
    ch.forget_mask.assign(K, false);
    for (std::size_t k : rng.sample_without_replacement(K, n_forget)) ch.forget_mask[k] = true;

    const std::size_t depth = static_cast<std::size_t>(rng.below(3));
    ch.transformation =
        init_transformation(d, depth, std::vector<std::size_t>(depth, 4), rng);
    std::vector<double> params = ch.transformation.flatten_params();
    const double perturb = 0.1 + 0.4 * rng.uniform();
    for (double& p : params) p += rng.gaussian(0.0, perturb);
    ch.transformation.set_params(params);

    validate_channel(ch);
    return ch;
}

void write_bound_reports_csv(const std::vector<BoundReport>& reports, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "instance_seed,quantity,estimate,stderr,bound,margin,verdict\n";
    for (const auto& r : reports) {
        out << r.instance_seed << "," << r.quantity << "," << format_double17(r.estimate) << ","
            << format_double17(r.estimate_stderr) << "," << format_double17(r.bound) << ","
            << format_double17(r.margin) << "," << (r.pass ? "pass" : "fail") << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace repunlearn
