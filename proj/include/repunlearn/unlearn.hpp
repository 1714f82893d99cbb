// The two unlearning procedures. Both optimize only the transformation
// parameters; the encoder is frozen throughout.
#pragma once

#include <cstdint>
#include <vector>

#include "repunlearn/dataset.hpp"
#include "repunlearn/losses.hpp"
#include "repunlearn/network.hpp"
#include "repunlearn/transformation.hpp"

namespace repunlearn {

struct UnlearnConfig {
    double beta{1e-3};
    double learning_rate{1e-3};
    std::size_t batch_retain{64};
    std::size_t batch_forget{64};
    std::size_t batch_reference{64};
    std::size_t max_epochs{200};       // epochs over the forget set
    double tolerance{1e-5};            // relative epoch-mean loss change
    std::size_t depth{0};
    std::size_t hidden_width{32};
    std::uint64_t seed{0};
};

void validate_unlearn_config(const UnlearnConfig& cfg);

struct UnlearnResult {
    Transformation transformation;
    std::vector<double> epoch_losses;
    std::size_t epochs_run{0};
    bool converged{false};  // tolerance hit before max_epochs
};

// Standard regime: per step, a forget batch walks a per-epoch shuffle of the
// forget set, while retain and reference batches are fresh uniform draws from
// the retain indices and from all indices. Representations are computed once
// up front (the encoder is frozen, so this is exact). Row reads go through
// `log` when given.
UnlearnResult unlearn_standard(const FeedForwardNet& net, const LabeledDataset& data,
                               const UnlearnSplit& split, const UnlearnConfig& cfg,
                               AccessLog* log = nullptr);

// Zero-shot regime: sees only the forget-set features plus metadata, never
// the dataset. The retain anchor term is recomputed every step.
UnlearnResult unlearn_zero_shot(const FeedForwardNet& net, const Matrix& forget_features,
                                const ZeroShotMetadata& meta, const UnlearnConfig& cfg);

// Metadata assembly for the zero-shot call site.
ZeroShotMetadata make_zero_shot_metadata(const FeedForwardNet& net, const UnlearnSplit& split);

}  // namespace repunlearn
