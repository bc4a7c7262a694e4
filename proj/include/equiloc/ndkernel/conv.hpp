#pragma once

#include "equiloc/ndkernel/tensor.hpp"

#include <cstddef>
#include <vector>

namespace equiloc::nd {

/// One stride-1 convolution layer with "same" zero padding.
struct ConvLayerSpec {
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t kernel_size = 1;  // odd, one of {1, 3, 5, 7}

    std::size_t padding() const noexcept { return (kernel_size - 1) / 2; }
    Shape4 weight_shape() const noexcept { return {out_channels, in_channels, kernel_size, kernel_size}; }

    /// Throws DomainError for an even or unsupported kernel size or zero channels.
    void validate() const;

    bool operator==(const ConvLayerSpec&) const = default;
};

struct ConvGrads {
    Tensor4 input;              // empty-shaped (1,1,1,1) when not requested
    Tensor4 weights;
    std::vector<double> bias;
};

/// Centered cross-correlation: out[n,o,y,x] = b[o] + sum_{c,u,v} w[o,c,u,v] * in[n,c,y+u-ph,x+v-pw],
/// zeros outside the input. Kernel height and width must be odd; output keeps the input's spatial shape.
Tensor4 conv2d(const Tensor4& input, const Tensor4& weights, const std::vector<double>& bias);

/// Same as above, additionally checking every shape against `spec`.
Tensor4 conv2d(const Tensor4& input, const Tensor4& weights, const std::vector<double>& bias,
               const ConvLayerSpec& spec);

ConvGrads conv2d_backward(const Tensor4& input, const Tensor4& weights, const Tensor4& grad_output,
                          bool need_input_grad = true);

}  // namespace equiloc::nd
