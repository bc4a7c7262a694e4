#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace equiloc::nd {

/// (batch, channel, height, width). Every dimension is at least 1.
struct Shape4 {
    std::size_t n = 1;
    std::size_t c = 1;
    std::size_t h = 1;
    std::size_t w = 1;

    std::size_t size() const noexcept { return n * c * h * w; }
    std::size_t plane() const noexcept { return h * w; }
    bool operator==(const Shape4&) const = default;

    std::string str() const;
};

/// Dense rank-4 array of doubles, row-major over (n, c, y, x).
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(Shape4 shape, double fill = 0.0);
    Tensor4(Shape4 shape, std::vector<double> values);

    const Shape4& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) noexcept {
        return data_[((n * shape_.c + c) * shape_.h + y) * shape_.w + x];
    }
    double at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const noexcept {
        return data_[((n * shape_.c + c) * shape_.h + y) * shape_.w + x];
    }

    std::span<double> plane(std::size_t n, std::size_t c) noexcept {
        return {data_.data() + (n * shape_.c + c) * shape_.plane(), shape_.plane()};
    }
    std::span<const double> plane(std::size_t n, std::size_t c) const noexcept {
        return {data_.data() + (n * shape_.c + c) * shape_.plane(), shape_.plane()};
    }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    void fill(double v);
    bool all_finite() const noexcept;

    bool operator==(const Tensor4&) const = default;

private:
    Shape4 shape_{};
    std::vector<double> data_ = std::vector<double>(1, 0.0);
};

/// Throws ShapeError naming the first dimension in which `a` and `b` differ.
void require_same_shape(const Shape4& a, const Shape4& b, const std::string& where);

/// Integer translation of every plane: out(y, x) = in(y - dy, x - dx), zero fill.
Tensor4 shift(const Tensor4& t, long dy, long dx);

/// Concatenate along the channel axis; batch and spatial dims must match.
Tensor4 concat_channels(const Tensor4& a, const Tensor4& b);

/// Max |a - b| over all elements.
double max_abs_diff(const Tensor4& a, const Tensor4& b);

}  // namespace equiloc::nd
