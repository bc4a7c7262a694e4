#include "equiloc/equivariant/ops.hpp"

#include "equiloc/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace equiloc::eqv {

void SoftArgmaxConfig::validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        throw DomainError("SoftArgmaxConfig: temperature must be > 0, got " + std::to_string(temperature));
}

void RenderConfig::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw DomainError("RenderConfig: sigma must be > 0, got " + std::to_string(sigma));
}

PixelIndex hard_argmax(MapView map) {
    if (map.values.empty()) throw DomainError("hard_argmax: empty map");
    std::size_t best = 0;
    for (std::size_t i = 1; i < map.values.size(); ++i) {
        if (map.values[i] > map.values[best]) best = i;
    }
    return {best / map.width, best % map.width};
}

namespace {

// Softmax weights of map/temperature (max-subtracted), plus the marginals.
struct SoftmaxMarginals {
    std::vector<double> p;
    std::vector<double> row;
    std::vector<double> col;
};

SoftmaxMarginals softmax_marginals(MapView map, double temperature) {
    if (map.values.empty()) throw DomainError("softargmax2d: empty map");
    const double peak = *std::max_element(map.values.begin(), map.values.end());
    SoftmaxMarginals s{std::vector<double>(map.values.size()), std::vector<double>(map.height, 0.0),
                       std::vector<double>(map.width, 0.0)};
    double total = 0.0;
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        s.p[i] = std::exp((map.values[i] - peak) / temperature);
        total += s.p[i];
    }
    for (std::size_t y = 0; y < map.height; ++y) {
        for (std::size_t x = 0; x < map.width; ++x) {
            const double v = s.p[y * map.width + x] / total;
            s.p[y * map.width + x] = v;
            s.row[y] += v;
            s.col[x] += v;
        }
    }
    return s;
}

double expected_centre(const std::vector<double>& marginal) {
    double e = 0.0;
    for (std::size_t i = 0; i < marginal.size(); ++i) e += (static_cast<double>(i) + 0.5) * marginal[i];
    return e;
}

}  // namespace

LatentPoint softargmax2d(MapView map, const SoftArgmaxConfig& cfg) {
    cfg.validate();
    const auto s = softmax_marginals(map, cfg.temperature);
    return {expected_centre(s.row), expected_centre(s.col)};
}

void softargmax2d_backward(MapView map, const SoftArgmaxConfig& cfg, LatentPoint grad_z,
                           std::span<double> grad_map) {
    cfg.validate();
    if (grad_map.size() != map.values.size())
        throw ShapeError("gradient map size", map.values.size(), grad_map.size(), "softargmax2d_backward");
    const auto s = softmax_marginals(map, cfg.temperature);
    const LatentPoint z{expected_centre(s.row), expected_centre(s.col)};
    // dz_y/dm_k = p_k (y_k - z_y) / T, likewise for x.
    for (std::size_t y = 0; y < map.height; ++y) {
        const double dy = static_cast<double>(y) + 0.5 - z.y;
        for (std::size_t x = 0; x < map.width; ++x) {
            const double dx = static_cast<double>(x) + 0.5 - z.x;
            const std::size_t k = y * map.width + x;
            grad_map[k] = s.p[k] * (grad_z.y * dy + grad_z.x * dx) / cfg.temperature;
        }
    }
}

void render_gaussian2d_into(LatentPoint z, const RenderConfig& cfg, std::span<double> out, std::size_t height,
                            std::size_t width) {
    cfg.validate();
    if (out.size() != height * width) throw ShapeError("render target size", height * width, out.size(), "render_gaussian2d");
    const double inv = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
    // Separable: exp(-(a^2 + b^2) k) = exp(-a^2 k) exp(-b^2 k).
    std::vector<double> gy(height), gx(width);
    for (std::size_t y = 0; y < height; ++y) {
        const double d = static_cast<double>(y) + 0.5 - z.y;
        gy[y] = std::exp(-d * d * inv);
    }
    for (std::size_t x = 0; x < width; ++x) {
        const double d = static_cast<double>(x) + 0.5 - z.x;
        gx[x] = std::exp(-d * d * inv);
    }
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x) out[y * width + x] = gy[y] * gx[x];
}

Map2D render_gaussian2d(LatentPoint z, std::size_t height, std::size_t width, const RenderConfig& cfg) {
    Map2D m(height, width);
    render_gaussian2d_into(z, cfg, m.values, height, width);
    return m;
}

LatentPoint render_gaussian2d_backward(LatentPoint z, std::size_t height, std::size_t width,
                                       const RenderConfig& cfg, std::span<const double> grad_map) {
    if (grad_map.size() != height * width)
        throw ShapeError("gradient map size", height * width, grad_map.size(), "render_gaussian2d_backward");
    Map2D g = render_gaussian2d(z, height, width, cfg);
    const double inv_var = 1.0 / (cfg.sigma * cfg.sigma);
    LatentPoint grad{};
    for (std::size_t y = 0; y < height; ++y) {
        const double dy = static_cast<double>(y) + 0.5 - z.y;
        for (std::size_t x = 0; x < width; ++x) {
            const double dx = static_cast<double>(x) + 0.5 - z.x;
            const double w = grad_map[y * width + x] * g(y, x) * inv_var;
            grad.y += w * dy;
            grad.x += w * dx;
        }
    }
    return grad;
}

LatentPoint normalized(LatentPoint z, std::size_t height, std::size_t width) {
    return {z.y / static_cast<double>(height), z.x / static_cast<double>(width)};
}

Map2D shift_map(MapView map, long dy, long dx) {
    Map2D out(map.height, map.width, 0.0);
    const long h = static_cast<long>(map.height);
    const long w = static_cast<long>(map.width);
    for (long y = 0; y < h; ++y) {
        const long sy = y - dy;
        if (sy < 0 || sy >= h) continue;
        for (long x = 0; x < w; ++x) {
            const long sx = x - dx;
            if (sx < 0 || sx >= w) continue;
            out(y, x) = map(sy, sx);
        }
    }
    return out;
}

namespace {

void require_support_stays(const Map2D& probe, long dy, long dx) {
    const long h = static_cast<long>(probe.height);
    const long w = static_cast<long>(probe.width);
    for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
            if (probe(y, x) == 0.0) continue;
            const long ty = y + dy;
            const long tx = x + dx;
            if (ty < 0 || ty >= h || tx < 0 || tx >= w) {
                throw DomainError("equivariance_violation: shift (" + std::to_string(dy) + ", " +
                                  std::to_string(dx) + ") moves probe support off the map");
            }
        }
    }
}

}  // namespace

double equivariance_violation(const MapOperator& op, const Map2D& probe, long dy, long dx, std::size_t margin) {
    require_support_stays(probe, dy, dx);
    const Map2D lhs = op(shift_map(probe.view(), dy, dx));
    const Map2D rhs = shift_map(op(probe).view(), dy, dx);
    if (lhs.height != rhs.height || lhs.width != rhs.width)
        throw ShapeError("operator output size", rhs.values.size(), lhs.values.size(), "equivariance_violation");
    const long h = static_cast<long>(lhs.height);
    const long w = static_cast<long>(lhs.width);
    const long m = static_cast<long>(margin);
    double worst = 0.0;
    for (long y = m; y < h - m; ++y) {
        if (y - dy < m || y - dy >= h - m) continue;
        for (long x = m; x < w - m; ++x) {
            if (x - dx < m || x - dx >= w - m) continue;
            worst = std::max(worst, std::abs(lhs(y, x) - rhs(y, x)));
        }
    }
    return worst;
}

double equivariance_violation(const PointOperator& op, const Map2D& probe, long dy, long dx) {
    require_support_stays(probe, dy, dx);
    const LatentPoint shifted = op(shift_map(probe.view(), dy, dx));
    const LatentPoint moved = op(probe) + LatentPoint{static_cast<double>(dy), static_cast<double>(dx)};
    return std::max(std::abs(shifted.y - moved.y), std::abs(shifted.x - moved.x));
}

}  // namespace equiloc::eqv
