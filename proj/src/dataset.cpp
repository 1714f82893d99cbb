#include "repunlearn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace repunlearn {

void validate_dataset(const LabeledDataset& data) {
    if (data.features.rows != data.labels.size()) {
        throw std::invalid_argument("dataset: feature/label row mismatch");
    }
    std::vector<std::size_t> counts(data.class_counts.size(), 0);
    for (std::size_t y : data.labels) {
        if (y >= data.class_counts.size()) throw std::invalid_argument("dataset: label out of range");
        counts[y] += 1;
    }
    if (counts != data.class_counts) throw std::invalid_argument("dataset: class_counts inconsistent");
    require_finite(data.features, "dataset features");
}

void validate_config(const MixtureConfig& cfg) {
    if (cfg.num_classes < 2) throw std::invalid_argument("mixture: need at least 2 classes");
    if (cfg.dim < 2) throw std::invalid_argument("mixture: need dim >= 2");
    if (cfg.radius <= 0.0) throw std::invalid_argument("mixture: radius must be positive");
    if (cfg.mean_noise_std < 0.0) throw std::invalid_argument("mixture: mean_noise_std must be >= 0");
    if (cfg.sample_std <= 0.0) throw std::invalid_argument("mixture: sample_std must be positive");
    if (cfg.n_per_class < 1 || cfg.test_n_per_class < 1) {
        throw std::invalid_argument("mixture: need at least one sample per class");
    }
}

namespace {

LabeledDataset draw_split(const Matrix& means, const MixtureConfig& cfg, std::size_t n_per_class,
                          Rng& rng) {
    const std::size_t C = cfg.num_classes;
    const std::size_t d = cfg.dim;
    LabeledDataset out;
    out.features = Matrix(C * n_per_class, d);
    out.labels.resize(C * n_per_class);
    out.class_counts.assign(C, n_per_class);
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            const std::size_t row = c * n_per_class + i;
            auto dst = out.features.row(row);
            auto mu = means.row(c);
            for (std::size_t j = 0; j < d; ++j) dst[j] = rng.gaussian(mu[j], cfg.sample_std);
            out.labels[row] = c;
        }
    }
    return out;
}

}  // namespace

ToyMixture generate_toy_mixture(const MixtureConfig& cfg) {
    validate_config(cfg);
    Rng root(cfg.seed);

    // Means first, so train and test share them; the off-circle coordinates
    // are a single draw per class.
    Matrix means(cfg.num_classes, cfg.dim);
    for (std::size_t c = 0; c < cfg.num_classes; ++c) {
        const double theta =
            2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(cfg.num_classes);
        means(c, 0) = cfg.radius * std::cos(theta);
        means(c, 1) = cfg.radius * std::sin(theta);
        for (std::size_t j = 2; j < cfg.dim; ++j) {
            means(c, j) = cfg.mean_noise_std > 0.0 ? root.gaussian(0.0, cfg.mean_noise_std) : 0.0;
        }
    }

    Rng train_rng = root.fork(1);
    Rng test_rng = root.fork(2);

    ToyMixture out;
    out.class_means = means;
    out.train = draw_split(means, cfg, cfg.n_per_class, train_rng);
    out.test = draw_split(means, cfg, cfg.test_n_per_class, test_rng);
    return out;
}

void validate_split(const UnlearnSplit& split) {
    if (split.retain_total + split.forget_total != split.total) {
        throw std::invalid_argument("split: totals inconsistent");
    }
    std::vector<bool> seen(split.total, false);
    for (std::size_t i : split.retain_indices) seen.at(i) = true;
    for (std::size_t i : split.forget_indices) {
        if (seen.at(i)) throw std::invalid_argument("split: overlapping indices");
        seen[i] = true;
    }
    for (bool b : seen) {
        if (!b) throw std::invalid_argument("split: indices not exhaustive");
    }
    for (std::size_t c = 0; c < split.class_counts.size(); ++c) {
        if (split.forget_class_counts[c] > split.class_counts[c]) {
            throw std::invalid_argument("split: forget count exceeds class count");
        }
        if (split.retain_class_counts[c] !=
            split.class_counts[c] - split.forget_class_counts[c]) {
            throw std::invalid_argument("split: retain counts inconsistent");
        }
    }
}

namespace {

UnlearnSplit finish_split(const LabeledDataset& data, std::vector<std::size_t> forget_idx,
                          SplitMode mode) {
    UnlearnSplit s;
    s.mode = mode;
    s.total = data.size();
    s.forget_indices = std::move(forget_idx);
    std::sort(s.forget_indices.begin(), s.forget_indices.end());
    s.forget_total = s.forget_indices.size();
    s.retain_total = s.total - s.forget_total;

    std::vector<bool> is_forget(s.total, false);
    for (std::size_t i : s.forget_indices) is_forget[i] = true;
    s.retain_indices.reserve(s.retain_total);
    for (std::size_t i = 0; i < s.total; ++i) {
        if (!is_forget[i]) s.retain_indices.push_back(i);
    }

    const std::size_t C = data.num_classes();
    s.class_counts = data.class_counts;
    s.forget_class_counts.assign(C, 0);
    s.retain_class_counts.assign(C, 0);
    for (std::size_t i : s.forget_indices) s.forget_class_counts[data.labels[i]] += 1;
    for (std::size_t c = 0; c < C; ++c) {
        s.retain_class_counts[c] = s.class_counts[c] - s.forget_class_counts[c];
    }
    return s;
}

}  // namespace

UnlearnSplit split_class_unlearn(const LabeledDataset& data,
                                 const std::set<std::size_t>& forget_classes) {
    if (forget_classes.empty()) throw std::invalid_argument("class split: empty forget class set");
    std::size_t present = 0;
    for (std::size_t c : forget_classes) {
        if (c >= data.num_classes() || data.class_counts[c] == 0) {
            throw std::invalid_argument("class split: forget class not present");
        }
        present += 1;
    }
    std::size_t nonempty = 0;
    for (std::size_t n : data.class_counts) nonempty += (n > 0) ? 1 : 0;
    if (present >= nonempty) {
        throw std::invalid_argument("class split: retain set would be empty");
    }

    std::vector<std::size_t> forget_idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (forget_classes.count(data.labels[i]) > 0) forget_idx.push_back(i);
    }
    UnlearnSplit s = finish_split(data, std::move(forget_idx), SplitMode::Class);
    s.forget_classes = forget_classes;
    return s;
}

UnlearnSplit split_random_unlearn(const LabeledDataset& data, double fraction, Rng& rng) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("random split: fraction must be in (0, 1)");
    }
    // Round half up.
    const std::size_t k = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(data.size()) + 0.5));
    if (k == 0 || k >= data.size()) {
        throw std::invalid_argument("random split: degenerate forget size");
    }
    return finish_split(data, rng.sample_without_replacement(data.size(), k), SplitMode::Random);
}

std::vector<double> retain_class_prior(std::size_t total,
                                       std::span<const std::size_t> class_counts,
                                       std::span<const std::size_t> forget_counts) {
    if (class_counts.size() != forget_counts.size()) {
        throw std::invalid_argument("retain_class_prior: length mismatch");
    }
    std::size_t sum_counts = 0;
    std::size_t forget_total = 0;
    for (std::size_t c = 0; c < class_counts.size(); ++c) {
        if (forget_counts[c] > class_counts[c]) {
            throw std::invalid_argument("retain_class_prior: forget count exceeds class count");
        }
        sum_counts += class_counts[c];
        forget_total += forget_counts[c];
    }
    if (sum_counts != total) throw std::invalid_argument("retain_class_prior: counts do not sum to N");
    if (forget_total >= total) throw std::invalid_argument("retain_class_prior: empty retain set");

    // (N * N^c/N - N_f * N_f^c/N_f) / (N - N_f) simplifies to N_r^c / N_r in
    // count space, which keeps the zero cases exact.
    const double retain_total = static_cast<double>(total - forget_total);
    std::vector<double> prior(class_counts.size());
    for (std::size_t c = 0; c < class_counts.size(); ++c) {
        prior[c] = static_cast<double>(class_counts[c] - forget_counts[c]) / retain_total;
    }
    return prior;
}

Matrix gather_rows(const LabeledDataset& data, std::span<const std::size_t> idx, AccessLog* log) {
    if (log != nullptr) log->rows.insert(log->rows.end(), idx.begin(), idx.end());
    return take_rows(data.features, idx);
}

void write_dataset_csv(const LabeledDataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (std::size_t j = 0; j < data.dim(); ++j) out << "f" << j << ",";
    out << "label\n";
    char buf[64];
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto row = data.features.row(i);
        for (std::size_t j = 0; j < data.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
            out << buf << ",";
        }
        out << data.labels[i] << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

LabeledDataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty csv: " + path);
    std::size_t d = 0;
    {
        std::stringstream ss(header);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(ss, col, ',')) cols.push_back(col);
        if (cols.empty() || cols.back() != "label") {
            throw std::runtime_error("csv header must end with 'label': " + path);
        }
        d = cols.size() - 1;
    }
    std::vector<double> values;
    std::vector<std::size_t> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        for (std::size_t j = 0; j < d; ++j) {
            if (!std::getline(ss, cell, ',')) throw std::runtime_error("short csv row: " + path);
            values.push_back(std::stod(cell));
        }
        if (!std::getline(ss, cell, ',')) throw std::runtime_error("missing label: " + path);
        labels.push_back(static_cast<std::size_t>(std::stoul(cell)));
    }
    LabeledDataset data;
    data.features = Matrix(labels.size(), d);
    data.features.data = std::move(values);
    data.labels = std::move(labels);
    std::size_t C = 0;
    for (std::size_t y : data.labels) C = std::max(C, y + 1);
    data.class_counts.assign(C, 0);
    for (std::size_t y : data.labels) data.class_counts[y] += 1;
    validate_dataset(data);
    return data;
}

}  // namespace repunlearn
