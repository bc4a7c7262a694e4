#pragma once

#include "equiloc/ndkernel/tensor.hpp"

#include <vector>

namespace equiloc::nd {

enum class Mode { Train, Eval };

struct BatchNormParams {
    std::vector<double> gamma;
    std::vector<double> beta;
    std::vector<double> running_mean;
    std::vector<double> running_var;
    double momentum = 0.1;
    double eps = 1e-5;

    /// gamma = 1, beta = 0, running mean 0, running variance 1.
    static BatchNormParams identity(std::size_t channels);
    std::size_t channels() const noexcept { return gamma.size(); }
};

/// Saved forward state needed by the train-mode backward pass.
struct BatchNormCache {
    Tensor4 normalized;            // x_hat
    std::vector<double> inv_std;   // 1 / sqrt(var + eps), per channel
};

struct BatchNormGrads {
    Tensor4 input;
    std::vector<double> gamma;
    std::vector<double> beta;
};

/// Train mode normalizes with biased batch statistics over (batch, height, width)
/// and folds them into the running statistics; the running variance is updated
/// with the unbiased estimate. Eval mode uses the running statistics only.
Tensor4 batchnorm(const Tensor4& input, BatchNormParams& params, Mode mode, BatchNormCache* cache = nullptr);

/// Backward of the train-mode forward (batch statistics treated as functions of the input).
BatchNormGrads batchnorm_backward(const Tensor4& grad_output, const BatchNormParams& params,
                                  const BatchNormCache& cache);

/// Backward of the eval-mode forward, where normalization is a fixed affine map.
BatchNormGrads batchnorm_backward_eval(const Tensor4& input, const Tensor4& grad_output,
                                       const BatchNormParams& params);

}  // namespace equiloc::nd
