#include "equiloc/ndkernel/activation.hpp"

namespace equiloc::nd {

Tensor4 relu(const Tensor4& input) {
    Tensor4 out(input.shape());
    const double* src = input.data();
    double* dst = out.data();
    for (std::size_t i = 0; i < input.size(); ++i) dst[i] = src[i] > 0.0 ? src[i] : 0.0;
    return out;
}

Tensor4 relu_backward(const Tensor4& input, const Tensor4& grad_output) {
    require_same_shape(input.shape(), grad_output.shape(), "relu_backward");
    Tensor4 out(input.shape());
    const double* x = input.data();
    const double* g = grad_output.data();
    double* dst = out.data();
    for (std::size_t i = 0; i < input.size(); ++i) dst[i] = x[i] > 0.0 ? g[i] : 0.0;
    return out;
}

}  // namespace equiloc::nd
