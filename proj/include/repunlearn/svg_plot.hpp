// Static SVG scatter of 2-D representations, no rendering dependency.
#pragma once

#include <optional>
#include <set>
#include <string>

#include "repunlearn/dataset.hpp"
#include "repunlearn/pipeline.hpp"

namespace repunlearn {

// Points colored by class; classes in `forget_classes` get a star marker,
// the rest circles. Layout and float formatting are deterministic.
std::string representation_scatter_svg(const Pipeline& p, const LabeledDataset& data,
                                       const std::set<std::size_t>& forget_classes);

void write_representation_svg(const Pipeline& p, const LabeledDataset& data,
                              const std::set<std::size_t>& forget_classes,
                              const std::string& path);

}  // namespace repunlearn
