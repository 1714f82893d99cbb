// Inference path: encoder, optional representation transformation, head.
#pragma once

#include <optional>

#include "repunlearn/matrix.hpp"
#include "repunlearn/network.hpp"
#include "repunlearn/transformation.hpp"

namespace repunlearn {

struct Pipeline {
    const FeedForwardNet* net{nullptr};
    const Transformation* transformation{nullptr};  // identity when null
};

// logits = head(f(e(x))) with the transformation, head(e(x)) without.
Matrix predict_pipeline(const Pipeline& p, const Matrix& x);

// Representations after the optional transformation.
Matrix pipeline_representations(const Pipeline& p, const Matrix& x);

std::vector<std::size_t> argmax_rows(const Matrix& logits);

}  // namespace repunlearn
