#include "equiloc/ndkernel/tensor.hpp"

#include "equiloc/error.hpp"

#include <algorithm>
#include <cmath>

namespace equiloc::nd {

std::string Shape4::str() const {
    return "(" + std::to_string(n) + ", " + std::to_string(c) + ", " + std::to_string(h) + ", " +
           std::to_string(w) + ")";
}

namespace {

void check_dims(const Shape4& s) {
    const std::array<std::pair<const char*, std::size_t>, 4> dims{
        {{"batch", s.n}, {"channel", s.c}, {"height", s.h}, {"width", s.w}}};
    for (const auto& [name, v] : dims) {
        if (v == 0) throw ShapeError(name, 1, 0, "Tensor4");
    }
}

}  // namespace

Tensor4::Tensor4(Shape4 shape, double fill) : shape_(shape) {
    check_dims(shape_);
    data_.assign(shape_.size(), fill);
}

Tensor4::Tensor4(Shape4 shape, std::vector<double> values) : shape_(shape), data_(std::move(values)) {
    check_dims(shape_);
    if (data_.size() != shape_.size()) throw ShapeError("value count", shape_.size(), data_.size(), "Tensor4");
}

void Tensor4::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor4::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_shape(const Shape4& a, const Shape4& b, const std::string& where) {
    if (a.n != b.n) throw ShapeError("batch", a.n, b.n, where);
    if (a.c != b.c) throw ShapeError("channel", a.c, b.c, where);
    if (a.h != b.h) throw ShapeError("height", a.h, b.h, where);
    if (a.w != b.w) throw ShapeError("width", a.w, b.w, where);
}

Tensor4 shift(const Tensor4& t, long dy, long dx) {
    const Shape4& s = t.shape();
    Tensor4 out(s, 0.0);
    const long h = static_cast<long>(s.h);
    const long w = static_cast<long>(s.w);
    for (std::size_t n = 0; n < s.n; ++n) {
        for (std::size_t c = 0; c < s.c; ++c) {
            for (long y = 0; y < h; ++y) {
                const long sy = y - dy;
                if (sy < 0 || sy >= h) continue;
                for (long x = 0; x < w; ++x) {
                    const long sx = x - dx;
                    if (sx < 0 || sx >= w) continue;
                    out.at(n, c, y, x) = t.at(n, c, sy, sx);
                }
            }
        }
    }
    return out;
}

Tensor4 concat_channels(const Tensor4& a, const Tensor4& b) {
    const Shape4& sa = a.shape();
    const Shape4& sb = b.shape();
    if (sa.n != sb.n) throw ShapeError("batch", sa.n, sb.n, "concat_channels");
    if (sa.h != sb.h) throw ShapeError("height", sa.h, sb.h, "concat_channels");
    if (sa.w != sb.w) throw ShapeError("width", sa.w, sb.w, "concat_channels");
    Tensor4 out({sa.n, sa.c + sb.c, sa.h, sa.w});
    for (std::size_t n = 0; n < sa.n; ++n) {
        for (std::size_t c = 0; c < sa.c; ++c) std::ranges::copy(a.plane(n, c), out.plane(n, c).begin());
        for (std::size_t c = 0; c < sb.c; ++c) std::ranges::copy(b.plane(n, c), out.plane(n, sa.c + c).begin());
    }
    return out;
}

double max_abs_diff(const Tensor4& a, const Tensor4& b) {
    require_same_shape(a.shape(), b.shape(), "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

}  // namespace equiloc::nd
