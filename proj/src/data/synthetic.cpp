#include "equiloc/data/synthetic.hpp"

#include "equiloc/error.hpp"

#include <algorithm>
#include <limits>

namespace equiloc::data {

void SyntheticConfig::validate() const {
    if (s_img < 1 || s_o < 1 || s_pad < 0) throw DomainError("SyntheticConfig: sizes must be positive");
    if (positions_per_axis() < 1) {
        throw DomainError("SyntheticConfig: empty position grid (s_img = " + std::to_string(s_img) + ", s_o = " +
                          std::to_string(s_o) + ", s_pad = " + std::to_string(s_pad) + ")");
    }
}

void SyntheticConfig::validate_for(int s_psi, int s_phi) const {
    validate();
    const int need = required_padding(s_psi, s_phi);
    if (s_pad < need) {
        throw DomainError("SyntheticConfig: s_pad = " + std::to_string(s_pad) + " < max(s_psi, s_phi) - 1 = " +
                          std::to_string(need));
    }
}

int required_padding(int s_psi, int s_phi) { return std::max(s_psi, s_phi) - 1; }

std::vector<SyntheticSample> generate_square_dataset(const SyntheticConfig& cfg) {
    cfg.validate();
    const int count = cfg.positions_per_axis();
    const auto n = static_cast<std::size_t>(cfg.s_img);
    const double half = cfg.s_o / 2.0;
    std::vector<SyntheticSample> samples;
    samples.reserve(static_cast<std::size_t>(count * count));
    for (int gy = 0; gy < count; ++gy) {
        for (int gx = 0; gx < count; ++gx) {
            const int top = cfg.s_pad + gy;
            const int left = cfg.s_pad + gx;
            SyntheticSample s{nd::Tensor4({1, 1, n, n}, cfg.background), {top + half, left + half}};
            for (int y = top; y < top + cfg.s_o; ++y)
                for (int x = left; x < left + cfg.s_o; ++x) s.image.at(0, 0, y, x) = cfg.foreground;
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

Split split_quadrants(const std::vector<SyntheticSample>& samples, Quadrant held_out) {
    if (samples.empty()) return {};
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    double xmin = ymin, xmax = -ymin;
    for (const auto& s : samples) {
        ymin = std::min(ymin, s.centre.y);
        ymax = std::max(ymax, s.centre.y);
        xmin = std::min(xmin, s.centre.x);
        xmax = std::max(xmax, s.centre.x);
    }
    const double ymid = (ymin + ymax) / 2.0;
    const double xmid = (xmin + xmax) / 2.0;

    Split split;
    for (const auto& s : samples) {
        const bool bottom = s.centre.y > ymid;
        const bool right = s.centre.x > xmid;
        const Quadrant q = bottom ? (right ? Quadrant::BottomRight : Quadrant::BottomLeft)
                                  : (right ? Quadrant::TopRight : Quadrant::TopLeft);
        (q == held_out ? split.test : split.train).push_back(s);
    }
    return split;
}

nd::Tensor4 stack_images(const std::vector<SyntheticSample>& samples, const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw DomainError("stack_images: empty selection");
    const nd::Shape4 one = samples.at(indices.front()).image.shape();
    nd::Tensor4 batch({indices.size(), 1, one.h, one.w});
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto& img = samples.at(indices[i]).image;
        nd::require_same_shape(img.shape(), one, "stack_images");
        std::ranges::copy(img.plane(0, 0), batch.plane(i, 0).begin());
    }
    return batch;
}

nd::Tensor4 stack_images(const std::vector<SyntheticSample>& samples) {
    std::vector<std::size_t> all(samples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return stack_images(samples, all);
}

}  // namespace equiloc::data
