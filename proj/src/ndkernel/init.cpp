#include "equiloc/ndkernel/init.hpp"

#include "equiloc/ndkernel/rng.hpp"

#include <cmath>

namespace equiloc::nd {

ConvParams init_params(const ConvLayerSpec& spec, std::uint64_t seed) {
    spec.validate();
    const double fan_in = static_cast<double>(spec.in_channels * spec.kernel_size * spec.kernel_size);
    const double limit = std::sqrt(6.0 / fan_in);
    Rng rng(seed);
    ConvParams p{Tensor4(spec.weight_shape()), std::vector<double>(spec.out_channels, 0.0)};
    for (double& w : p.weights.values()) w = rng.uniform(-limit, limit);
    return p;
}

}  // namespace equiloc::nd
