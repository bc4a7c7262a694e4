#pragma once

#include "equiloc/ndkernel/tensor.hpp"

namespace equiloc::nd {

Tensor4 relu(const Tensor4& input);

/// Passes the gradient where input > 0; the kink at exactly 0 gets gradient 0.
Tensor4 relu_backward(const Tensor4& input, const Tensor4& grad_output);

}  // namespace equiloc::nd
