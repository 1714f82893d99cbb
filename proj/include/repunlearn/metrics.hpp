// Accuracy, membership inference, cross-entropy against the retrain
// reference, and wall-clock timing.
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>

#include "repunlearn/dataset.hpp"
#include "repunlearn/pipeline.hpp"

namespace repunlearn {

// Percent of argmax-correct predictions over the samples whose label passes
// the filter (all samples when the filter is empty). Throws if the filtered
// subset is empty.
double accuracy(const Pipeline& p, const LabeledDataset& data,
                const std::optional<std::set<std::size_t>>& class_filter = std::nullopt);

// Loss-threshold attack: per-sample cross-entropy for forget rows (members)
// and held-out test rows (non-members), balanced by subsampling the larger
// side, best balanced accuracy over a threshold sweep and both rule
// orientations (the sweep includes the two degenerate thresholds, so the
// result is >= 50). Returns percent.
double membership_inference(const Pipeline& p, const LabeledDataset& forget_data,
                            const LabeledDataset& test_data, std::size_t n_thresholds,
                            std::uint64_t seed);

// Mean over the test rows of -sum_y q_retrain(y|x) log q_pipeline(y|x),
// natural log, pipeline probabilities clamped at 1e-12.
double test_ce_vs_retrain(const Pipeline& p, const FeedForwardNet& retrain_net,
                          const LabeledDataset& test_data);

// Wall time of a call on the monotonic clock, in seconds.
template <typename F>
auto timed(F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto result = fn();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    return std::pair{std::move(result), dt.count()};
}

struct EvalReport {
    std::string method;
    std::uint64_t seed{0};
    double retain_accuracy{0.0};
    double forget_accuracy{0.0};
    double mia_accuracy{0.0};
    double test_ce{0.0};
    double unlearn_seconds{0.0};
    double retrain_seconds{0.0};
    double speedup{0.0};
};

// Fixed column order, one row per report.
std::string eval_report_csv_header();
std::string eval_report_csv_row(const EvalReport& r);

}  // namespace repunlearn
