// The learned representation map. Depth counts hidden layers:
//   depth 0:   f(z) = A z + b, initialized to the exact identity
//   depth 1/2: f(z) = z + mlp(z), hidden layers He-initialized with ReLU,
//              final layer zero-initialized, so f starts as the exact
//              identity for every depth.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "repunlearn/matrix.hpp"
#include "repunlearn/network.hpp"
#include "repunlearn/rng.hpp"

namespace repunlearn {

struct Transformation {
    std::size_t depth{0};  // hidden layers, 0..2
    std::size_t dim{0};    // input dim == output dim
    std::vector<std::size_t> widths;  // hidden widths, length == depth
    std::vector<AffineLayer> layers;  // depth + 1 affine layers
    bool residual{false};             // true for depth >= 1

    std::size_t num_params() const;
    std::vector<double> flatten_params() const;
    void set_params(std::span<const double> flat);
};

Transformation init_transformation(std::size_t dim, std::size_t depth,
                                   const std::vector<std::size_t>& widths, Rng& rng);

// Applies f row-wise: out(i) = f(z(i)).
Matrix apply(const Transformation& f, const Matrix& z);

// Accumulates d(loss)/d(params) for the map z -> f(z) given upstream
// d(loss)/d(f(z)) in `dout`; returns nothing but adds into grad (flatten
// order), which must be pre-sized. Used by every unlearning loss.
void apply_backward_accumulate(const Transformation& f, const Matrix& z, const Matrix& dout,
                               std::vector<double>& grad);

void save_transformation_json(const Transformation& f, const std::string& path);
Transformation load_transformation_json(const std::string& path);

}  // namespace repunlearn
