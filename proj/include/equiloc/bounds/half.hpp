#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace equiloc::bounds {

/// Exact multiple of 1/2, stored as twice its value.
class Half {
public:
    constexpr Half() = default;
    static constexpr Half from_twice(std::int64_t twice) { return Half(twice); }
    static constexpr Half from_int(std::int64_t v) { return Half(2 * v); }

    constexpr std::int64_t twice() const { return twice_; }
    constexpr double value() const { return static_cast<double>(twice_) / 2.0; }

    constexpr Half operator+(Half o) const { return Half(twice_ + o.twice_); }
    constexpr Half operator-(Half o) const { return Half(twice_ - o.twice_); }
    constexpr Half operator-() const { return Half(-twice_); }
    constexpr auto operator<=>(const Half&) const = default;

    std::string str() const {
        const std::int64_t mag = twice_ < 0 ? -twice_ : twice_;
        std::string s = (twice_ < 0 ? "-" : "") + std::to_string(mag / 2);
        return mag % 2 == 0 ? s : s + ".5";
    }

private:
    constexpr explicit Half(std::int64_t twice) : twice_(twice) {}
    std::int64_t twice_ = 0;
};

/// n / 2 for integer n.
constexpr Half half_of(std::int64_t n) { return Half::from_twice(n); }

constexpr Half min(Half a, Half b) { return a < b ? a : b; }
constexpr Half max(Half a, Half b) { return a < b ? b : a; }

}  // namespace equiloc::bounds
