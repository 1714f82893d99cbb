#include "repunlearn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "repunlearn/json_io.hpp"
#include "repunlearn/rng.hpp"

namespace repunlearn {

double accuracy(const Pipeline& p, const LabeledDataset& data,
                const std::optional<std::set<std::size_t>>& class_filter) {
    const Matrix logits = predict_pipeline(p, data.features);
    const std::vector<std::size_t> pred = argmax_rows(logits);
    std::size_t correct = 0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (class_filter.has_value() && class_filter->count(data.labels[i]) == 0) continue;
        counted += 1;
        if (pred[i] == data.labels[i]) correct += 1;
    }
    if (counted == 0) throw std::invalid_argument("accuracy: empty subset after filtering");
    return 100.0 * static_cast<double>(correct) / static_cast<double>(counted);
}

namespace {

std::vector<double> per_sample_ce(const Pipeline& p, const LabeledDataset& data) {
    const Matrix probs = softmax_rows(predict_pipeline(p, data.features));
    std::vector<double> losses(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        losses[i] = -std::log(std::max(probs(i, data.labels[i]), 1e-12));
    }
    return losses;
}

std::vector<double> subsample(const std::vector<double>& values, std::size_t k, Rng& rng) {
    if (values.size() <= k) return values;
    const std::vector<std::size_t> pick = rng.sample_without_replacement(values.size(), k);
    std::vector<double> out(pick.size());
    for (std::size_t i = 0; i < pick.size(); ++i) out[i] = values[pick[i]];
    return out;
}

}  // namespace

double membership_inference(const Pipeline& p, const LabeledDataset& forget_data,
                            const LabeledDataset& test_data, std::size_t n_thresholds,
                            std::uint64_t seed) {
    if (forget_data.size() == 0 || test_data.size() == 0) {
        throw std::invalid_argument("membership_inference: empty inputs");
    }
    std::vector<double> member = per_sample_ce(p, forget_data);
    std::vector<double> nonmember = per_sample_ce(p, test_data);

    Rng rng(derive_seed(seed, 17));
    const std::size_t k = std::min(member.size(), nonmember.size());
    member = subsample(member, k, rng);
    nonmember = subsample(nonmember, k, rng);

    double lo = member[0];
    double hi = member[0];
    for (double v : member) { lo = std::min(lo, v); hi = std::max(hi, v); }
    for (double v : nonmember) { lo = std::min(lo, v); hi = std::max(hi, v); }

    // Members are predicted where the loss is at most the threshold. The two
    // degenerate thresholds bracket the sweep, so 50 is always reachable.
    std::vector<double> thresholds;
    thresholds.push_back(lo - 1.0);
    for (std::size_t t = 0; t < n_thresholds; ++t) {
        const double frac = n_thresholds > 1
                                ? static_cast<double>(t) / static_cast<double>(n_thresholds - 1)
                                : 0.5;
        thresholds.push_back(lo + frac * (hi - lo));
    }
    thresholds.push_back(hi + 1.0);

    double best = 0.0;
    for (double thr : thresholds) {
        std::size_t tp = 0;
        std::size_t tn = 0;
        for (double v : member) tp += (v <= thr) ? 1 : 0;
        for (double v : nonmember) tn += (v > thr) ? 1 : 0;
        const double balanced = 0.5 * (static_cast<double>(tp) / static_cast<double>(k) +
                                       static_cast<double>(tn) / static_cast<double>(k));
        // The attack picks the stronger orientation of the rule; flipping it
        // at the same threshold scores 1 - balanced.
        best = std::max({best, balanced, 1.0 - balanced});
    }
    return 100.0 * best;
}

double test_ce_vs_retrain(const Pipeline& p, const FeedForwardNet& retrain_net,
                          const LabeledDataset& test_data) {
    Pipeline retrain_pipeline{&retrain_net, nullptr};
    const Matrix q_ref = softmax_rows(predict_pipeline(retrain_pipeline, test_data.features));
    const Matrix q = softmax_rows(predict_pipeline(p, test_data.features));
    if (q_ref.cols != q.cols) throw std::invalid_argument("test_ce: class count mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < q.rows; ++i) {
        auto ref = q_ref.row(i);
        auto qi = q.row(i);
        double ce = 0.0;
        for (std::size_t c = 0; c < q.cols; ++c) {
            ce -= ref[c] * std::log(std::max(qi[c], 1e-12));
        }
        total += ce;
    }
    return total / static_cast<double>(q.rows);
}

std::string eval_report_csv_header() {
    return "method,seed,retain_acc,forget_acc,mia_acc,test_ce,unlearn_s,retrain_s,speedup";
}

std::string eval_report_csv_row(const EvalReport& r) {
    std::ostringstream ss;
    ss << r.method << "," << r.seed << "," << format_double17(r.retain_accuracy) << ","
       << format_double17(r.forget_accuracy) << "," << format_double17(r.mia_accuracy) << ","
       << format_double17(r.test_ce) << "," << format_double17(r.unlearn_seconds) << ","
       << format_double17(r.retrain_seconds) << "," << format_double17(r.speedup);
    return ss.str();
}

}  // namespace repunlearn
