#include "repunlearn/pipeline.hpp"

#include <stdexcept>

namespace repunlearn {

namespace {

Matrix head_logits(const FeedForwardNet& net, const Matrix& z) {
    const AffineLayer& head = net.layers.back();
    Matrix logits = matmul_nt(z, head.weights);
    for (std::size_t i = 0; i < logits.rows; ++i) {
        auto row = logits.row(i);
        for (std::size_t j = 0; j < logits.cols; ++j) row[j] += head.bias[j];
    }
    return logits;
}

}  // namespace

Matrix pipeline_representations(const Pipeline& p, const Matrix& x) {
    if (p.net == nullptr) throw std::invalid_argument("pipeline: missing net");
    Matrix z = representations(*p.net, x);
    if (p.transformation != nullptr) {
        if (p.transformation->dim != p.net->representation_dim()) {
            throw std::invalid_argument("pipeline: transformation dim mismatch");
        }
        z = apply(*p.transformation, z);
    }
    return z;
}

Matrix predict_pipeline(const Pipeline& p, const Matrix& x) {
    return head_logits(*p.net, pipeline_representations(p, x));
}

std::vector<std::size_t> argmax_rows(const Matrix& logits) {
    std::vector<std::size_t> out(logits.rows);
    for (std::size_t i = 0; i < logits.rows; ++i) {
        auto row = logits.row(i);
        std::size_t best = 0;
        for (std::size_t j = 1; j < logits.cols; ++j) {
            if (row[j] > row[best]) best = j;
        }
        out[i] = best;
    }
    return out;
}

}  // namespace repunlearn
