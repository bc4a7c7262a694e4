#pragma once

#include "equiloc/ndkernel/conv.hpp"

#include <cstdint>

namespace equiloc::nd {

struct ConvParams {
    Tensor4 weights;
    std::vector<double> bias;
};

/// Fan-in uniform weights in +-sqrt(6 / (in_channels * k^2)), zero bias.
ConvParams init_params(const ConvLayerSpec& spec, std::uint64_t seed);

}  // namespace equiloc::nd
