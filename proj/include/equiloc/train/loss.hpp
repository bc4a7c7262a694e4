#pragma once

#include "equiloc/equivariant/ops.hpp"
#include "equiloc/ndkernel/tensor.hpp"

#include <vector>

namespace equiloc::train {

/// Mean squared error over every element.
double mse_loss(const nd::Tensor4& prediction, const nd::Tensor4& target);
/// d(mse)/d(prediction) = 2 (prediction - target) / N.
nd::Tensor4 mse_loss_grad(const nd::Tensor4& prediction, const nd::Tensor4& target);

/// Fraction of pixels with |prediction - target| <= eps_px.
double reconstruction_accuracy(const nd::Tensor4& prediction, const nd::Tensor4& target, double eps_px = 0.1);

struct PositionError {
    double delta = 0.0;  // max over items and axes
    /// assignment[i][k] is the ground-truth object matched to latent k of item i.
    std::vector<std::vector<std::size_t>> assignment;
};

/// Max over items and axes of |z - u|. With several objects per item, latents
/// are first matched to truths by the permutation minimising summed per-axis
/// error (exhaustive search, at most 8 objects).
PositionError evaluate_position_error(const std::vector<std::vector<eqv::LatentPoint>>& predicted,
                                      const std::vector<std::vector<eqv::LatentPoint>>& truth);

}  // namespace equiloc::train
