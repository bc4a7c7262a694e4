#pragma once

#include "equiloc/ndkernel/rng.hpp"
#include "equiloc/ndkernel/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace equiloc::testing {

inline nd::Tensor4 random_tensor(nd::Shape4 s, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    nd::Rng rng(seed);
    nd::Tensor4 t(s);
    for (double& v : t.values()) v = rng.uniform(lo, hi);
    return t;
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    nd::Rng rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

/// Textbook cross-correlation with zero padding, no blocking, no SIMD.
inline nd::Tensor4 naive_conv(const nd::Tensor4& in, const nd::Tensor4& w, const std::vector<double>& b) {
    const auto& s = in.shape();
    const auto& k = w.shape();
    const long ph = static_cast<long>(k.h / 2), pw = static_cast<long>(k.w / 2);
    nd::Tensor4 out({s.n, k.n, s.h, s.w});
    for (std::size_t n = 0; n < s.n; ++n)
        for (std::size_t o = 0; o < k.n; ++o)
            for (std::size_t y = 0; y < s.h; ++y)
                for (std::size_t x = 0; x < s.w; ++x) {
                    double acc = b[o];
                    for (std::size_t c = 0; c < k.c; ++c)
                        for (std::size_t u = 0; u < k.h; ++u)
                            for (std::size_t v = 0; v < k.w; ++v) {
                                const long yy = static_cast<long>(y + u) - ph;
                                const long xx = static_cast<long>(x + v) - pw;
                                if (yy < 0 || xx < 0 || yy >= static_cast<long>(s.h) || xx >= static_cast<long>(s.w))
                                    continue;
                                acc += w.at(o, c, u, v) * in.at(n, c, static_cast<std::size_t>(yy),
                                                                 static_cast<std::size_t>(xx));
                            }
                    out.at(n, o, y, x) = acc;
                }
    return out;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct GradCheck {
    double worst = 0.0;  // largest |analytic - numeric| / max(|analytic|, |numeric|, floor)
    std::size_t checked = 0;
    std::size_t worst_index = 0;
};

/// Central differences of `loss` with respect to every entry of `x` (step h),
/// compared elementwise against `analytic`. `x` is restored afterwards.
inline GradCheck finite_difference_check(std::span<double> x, std::span<const double> analytic,
                                         const std::function<double()>& loss, double h = 1e-4,
                                         double floor = 1e-3) {
    GradCheck r;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + h;
        const double up = loss();
        x[i] = keep - h;
        const double down = loss();
        x[i] = keep;
        const double numeric = (up - down) / (2.0 * h);
        const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
        const double err = std::abs(analytic[i] - numeric) / scale;
        if (err > r.worst) {
            r.worst = err;
            r.worst_index = i;
        }
        ++r.checked;
    }
    return r;
}

}  // namespace equiloc::testing
