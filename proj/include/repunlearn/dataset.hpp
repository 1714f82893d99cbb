// Synthetic mixture generation, retain/forget splits and class priors.
#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "repunlearn/matrix.hpp"
#include "repunlearn/rng.hpp"

namespace repunlearn {

struct LabeledDataset {
    Matrix features;                      // N x d
    std::vector<std::size_t> labels;      // values in [0, C)
    std::vector<std::size_t> class_counts;  // length C

    std::size_t size() const { return labels.size(); }
    std::size_t num_classes() const { return class_counts.size(); }
    std::size_t dim() const { return features.cols; }
};

// Validates labels/counts/shape consistency; throws on violation.
void validate_dataset(const LabeledDataset& data);

struct MixtureConfig {
    std::size_t num_classes{6};
    std::size_t dim{10};
    double radius{5.0};
    double mean_noise_std{0.5};   // off-circle mean coordinates, drawn once per class
    double sample_std{1.0};
    std::size_t n_per_class{250};
    std::size_t test_n_per_class{250};
    std::uint64_t seed{1};
};

void validate_config(const MixtureConfig& cfg);

// Class means lie on a circle of the configured radius in the first two
// coordinates; the remaining coordinates are drawn once per class and shared
// by train and test. Train and test samples come from independent substreams
// (fork 1 and fork 2 of the config seed).
struct ToyMixture {
    LabeledDataset train;
    LabeledDataset test;
    Matrix class_means;  // C x d
};

ToyMixture generate_toy_mixture(const MixtureConfig& cfg);

enum class SplitMode { Class, Random };

struct UnlearnSplit {
    std::vector<std::size_t> retain_indices;  // ascending
    std::vector<std::size_t> forget_indices;  // ascending
    std::size_t total{0};                     // N
    std::size_t forget_total{0};              // N_f
    std::size_t retain_total{0};              // N_r
    std::vector<std::size_t> class_counts;        // N^c
    std::vector<std::size_t> forget_class_counts; // N_f^c
    std::vector<std::size_t> retain_class_counts; // N_r^c
    SplitMode mode{SplitMode::Class};
    std::set<std::size_t> forget_classes;     // class mode only
};

void validate_split(const UnlearnSplit& split);

UnlearnSplit split_class_unlearn(const LabeledDataset& data,
                                 const std::set<std::size_t>& forget_classes);

// Uniform sample without replacement of round(fraction * N) indices
// (round half up).
UnlearnSplit split_random_unlearn(const LabeledDataset& data, double fraction, Rng& rng);

// Retain-set class prior recovered from counts; the subtraction form over the
// law of total probability reduces to N_r^c / N_r once the empirical priors
// are written as count ratios, so it is computed exactly in count space.
std::vector<double> retain_class_prior(std::size_t total,
                                       std::span<const std::size_t> class_counts,
                                       std::span<const std::size_t> forget_counts);

// Row-access instrumentation: records every dataset row whose features were
// materialized, so access regimes can be audited.
struct AccessLog {
    std::vector<std::size_t> rows;
};

Matrix gather_rows(const LabeledDataset& data, std::span<const std::size_t> idx,
                   AccessLog* log = nullptr);

// CSV with header f0,...,f{d-1},label; floats at 17 significant digits,
// UTF-8, LF line endings.
void write_dataset_csv(const LabeledDataset& data, const std::string& path);
LabeledDataset read_dataset_csv(const std::string& path);

}  // namespace repunlearn
