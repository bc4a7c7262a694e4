#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

// Position extraction (argmax, soft argmax) and its differentiable
// pseudo-inverse (Gaussian rendering). Coordinates are in pixel units:
// pixel (i, j) covers [i, i+1) x [j, j+1) and has its centre at (i+0.5, j+0.5).

namespace equiloc::eqv {

struct LatentPoint {
    double y = 0.0;
    double x = 0.0;

    LatentPoint operator+(const LatentPoint& o) const { return {y + o.y, x + o.x}; }
    LatentPoint operator-(const LatentPoint& o) const { return {y - o.y, x - o.x}; }
    bool operator==(const LatentPoint&) const = default;
};

struct PixelIndex {
    std::size_t row = 0;
    std::size_t col = 0;
    bool operator==(const PixelIndex&) const = default;
};

struct SoftArgmaxConfig {
    double temperature = 0.5;
    void validate() const;
};

struct RenderConfig {
    double sigma = 0.8;  // px; peak amplitude is 1
    void validate() const;
};

/// Non-owning view of a row-major single-channel map.
struct MapView {
    std::span<const double> values;
    std::size_t height = 0;
    std::size_t width = 0;

    double operator()(std::size_t y, std::size_t x) const { return values[y * width + x]; }
};

/// Owning single-channel map.
struct Map2D {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> values;

    Map2D() = default;
    Map2D(std::size_t h, std::size_t w, double fill = 0.0) : height(h), width(w), values(h * w, fill) {}

    double& operator()(std::size_t y, std::size_t x) { return values[y * width + x]; }
    double operator()(std::size_t y, std::size_t x) const { return values[y * width + x]; }
    MapView view() const { return {values, height, width}; }
};

/// Maximizing pixel; ties go to the smallest row, then the smallest column.
PixelIndex hard_argmax(MapView map);

/// Expected pixel-centre position under softmax(map / temperature) taken over
/// the whole map; the row and column marginals give z_y and z_x.
LatentPoint softargmax2d(MapView map, const SoftArgmaxConfig& cfg);

/// d(loss)/d(map) given d(loss)/dz; written into `grad_map` (size height*width).
void softargmax2d_backward(MapView map, const SoftArgmaxConfig& cfg, LatentPoint grad_z,
                           std::span<double> grad_map);

/// Peak-1 isotropic Gaussian evaluated at pixel centres.
Map2D render_gaussian2d(LatentPoint z, std::size_t height, std::size_t width, const RenderConfig& cfg);
void render_gaussian2d_into(LatentPoint z, const RenderConfig& cfg, std::span<double> out, std::size_t height,
                            std::size_t width);

/// d(loss)/dz given d(loss)/d(rendered map).
LatentPoint render_gaussian2d_backward(LatentPoint z, std::size_t height, std::size_t width,
                                       const RenderConfig& cfg, std::span<const double> grad_map);

/// Divide by (height, width): the unit-square reporting convention.
LatentPoint normalized(LatentPoint z, std::size_t height, std::size_t width);

/// Integer translation tau: out(y, x) = in(y - dy, x - dx), zero fill.
Map2D shift_map(MapView map, long dy, long dx);

using MapOperator = std::function<Map2D(const Map2D&)>;
using PointOperator = std::function<LatentPoint(const Map2D&)>;

/// max |op(tau probe) - tau op(probe)| over pixels that stay on the map and
/// lie at least `margin` from every border. Throws DomainError if the shift
/// moves any nonzero probe value off the map.
double equivariance_violation(const MapOperator& op, const Map2D& probe, long dy, long dx,
                              std::size_t margin = 0);

/// max-axis |op(tau probe) - (op(probe) + t)| for operators returning a point.
double equivariance_violation(const PointOperator& op, const Map2D& probe, long dy, long dx);

}  // namespace equiloc::eqv
