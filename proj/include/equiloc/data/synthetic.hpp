#pragma once

#include "equiloc/equivariant/ops.hpp"
#include "equiloc/ndkernel/tensor.hpp"

#include <string>
#include <vector>

namespace equiloc::data {

/// White s_o x s_o squares on black s_img x s_img images, centred on the
/// unit-stride grid {s_pad + s_o/2, ..., s_img - s_pad - s_o/2} in both axes.
struct SyntheticConfig {
    int s_img = 80;
    int s_o = 9;
    int s_pad = 24;
    double foreground = 1.0;
    double background = 0.0;

    /// Grid positions per axis: s_img - 2 s_pad - s_o + 1.
    int positions_per_axis() const { return s_img - 2 * s_pad - s_o + 1; }
    /// Throws DomainError for an empty grid or non-positive sizes.
    void validate() const;
    /// Additionally requires s_pad >= max(s_psi, s_phi) - 1.
    void validate_for(int s_psi, int s_phi) const;
};

/// Smallest padding that keeps objects clear of border effects for the given receptive fields.
int required_padding(int s_psi, int s_phi);

struct SyntheticSample {
    nd::Tensor4 image;        // (1, 1, s_img, s_img)
    eqv::LatentPoint centre;  // continuous centre, top-left corner + s_o/2
};

/// One sample per grid point, rows outer, columns inner.
std::vector<SyntheticSample> generate_square_dataset(const SyntheticConfig& cfg);

enum class Quadrant { TopLeft, TopRight, BottomLeft, BottomRight };

struct Split {
    std::vector<SyntheticSample> train;
    std::vector<SyntheticSample> test;
};

/// Quadrant relative to the grid midpoint; a centre is "bottom"/"right" when
/// strictly past the midpoint. The held-out quadrant becomes the test set.
Split split_quadrants(const std::vector<SyntheticSample>& samples, Quadrant held_out = Quadrant::BottomRight);

/// Stack sample images into one (N, 1, H, W) batch.
nd::Tensor4 stack_images(const std::vector<SyntheticSample>& samples);
nd::Tensor4 stack_images(const std::vector<SyntheticSample>& samples, const std::vector<std::size_t>& indices);

}  // namespace equiloc::data
