#include "equiloc/ndkernel/batchnorm.hpp"

#include "equiloc/error.hpp"

#include <cmath>

namespace equiloc::nd {

BatchNormParams BatchNormParams::identity(std::size_t channels) {
    BatchNormParams p;
    p.gamma.assign(channels, 1.0);
    p.beta.assign(channels, 0.0);
    p.running_mean.assign(channels, 0.0);
    p.running_var.assign(channels, 1.0);
    return p;
}

namespace {

void check_params(const Shape4& s, const BatchNormParams& p, const char* where) {
    if (p.gamma.size() != s.c) throw ShapeError("gamma length", s.c, p.gamma.size(), where);
    if (p.beta.size() != s.c) throw ShapeError("beta length", s.c, p.beta.size(), where);
    if (p.running_mean.size() != s.c) throw ShapeError("running_mean length", s.c, p.running_mean.size(), where);
    if (p.running_var.size() != s.c) throw ShapeError("running_var length", s.c, p.running_var.size(), where);
}

}  // namespace

Tensor4 batchnorm(const Tensor4& input, BatchNormParams& params, Mode mode, BatchNormCache* cache) {
    const Shape4& s = input.shape();
    check_params(s, params, "batchnorm");
    const std::size_t count = s.n * s.plane();
    Tensor4 out(s);

    if (mode == Mode::Eval) {
        for (std::size_t c = 0; c < s.c; ++c) {
            const double inv = 1.0 / std::sqrt(params.running_var[c] + params.eps);
            const double scale = params.gamma[c] * inv;
            const double shift = params.beta[c] - params.running_mean[c] * scale;
            for (std::size_t n = 0; n < s.n; ++n) {
                auto src = input.plane(n, c);
                auto dst = out.plane(n, c);
                for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * scale + shift;
            }
        }
        return out;
    }

    if (count < 2) {
        throw DomainError("batchnorm: train mode needs at least 2 values per channel (got " +
                          std::to_string(count) + ")");
    }
    if (cache) {
        cache->normalized = Tensor4(s);
        cache->inv_std.assign(s.c, 0.0);
    }
    for (std::size_t c = 0; c < s.c; ++c) {
        double sum = 0.0;
        for (std::size_t n = 0; n < s.n; ++n)
            for (double v : input.plane(n, c)) sum += v;
        const double mean = sum / static_cast<double>(count);
        double sq = 0.0;
        for (std::size_t n = 0; n < s.n; ++n)
            for (double v : input.plane(n, c)) sq += (v - mean) * (v - mean);
        const double var = sq / static_cast<double>(count);
        const double inv = 1.0 / std::sqrt(var + params.eps);

        for (std::size_t n = 0; n < s.n; ++n) {
            auto src = input.plane(n, c);
            auto dst = out.plane(n, c);
            for (std::size_t i = 0; i < src.size(); ++i) {
                const double xhat = (src[i] - mean) * inv;
                if (cache) cache->normalized.plane(n, c)[i] = xhat;
                dst[i] = params.gamma[c] * xhat + params.beta[c];
            }
        }
        if (cache) cache->inv_std[c] = inv;

        const double unbiased = sq / static_cast<double>(count - 1);
        params.running_mean[c] = (1.0 - params.momentum) * params.running_mean[c] + params.momentum * mean;
        params.running_var[c] = (1.0 - params.momentum) * params.running_var[c] + params.momentum * unbiased;
    }
    return out;
}

BatchNormGrads batchnorm_backward(const Tensor4& grad_output, const BatchNormParams& params,
                                  const BatchNormCache& cache) {
    const Shape4& s = grad_output.shape();
    require_same_shape(s, cache.normalized.shape(), "batchnorm_backward");
    check_params(s, params, "batchnorm_backward");
    const double m = static_cast<double>(s.n * s.plane());

    BatchNormGrads g{Tensor4(s), std::vector<double>(s.c, 0.0), std::vector<double>(s.c, 0.0)};
    for (std::size_t c = 0; c < s.c; ++c) {
        double sum_g = 0.0;
        double sum_gx = 0.0;
        for (std::size_t n = 0; n < s.n; ++n) {
            auto go = grad_output.plane(n, c);
            auto xh = cache.normalized.plane(n, c);
            for (std::size_t i = 0; i < go.size(); ++i) {
                sum_g += go[i];
                sum_gx += go[i] * xh[i];
            }
        }
        g.beta[c] = sum_g;
        g.gamma[c] = sum_gx;
        const double k = params.gamma[c] * cache.inv_std[c] / m;
        for (std::size_t n = 0; n < s.n; ++n) {
            auto go = grad_output.plane(n, c);
            auto xh = cache.normalized.plane(n, c);
            auto gi = g.input.plane(n, c);
            for (std::size_t i = 0; i < go.size(); ++i) gi[i] = k * (m * go[i] - sum_g - xh[i] * sum_gx);
        }
    }
    return g;
}

BatchNormGrads batchnorm_backward_eval(const Tensor4& input, const Tensor4& grad_output,
                                       const BatchNormParams& params) {
    const Shape4& s = grad_output.shape();
    require_same_shape(s, input.shape(), "batchnorm_backward_eval");
    check_params(s, params, "batchnorm_backward_eval");

    BatchNormGrads g{Tensor4(s), std::vector<double>(s.c, 0.0), std::vector<double>(s.c, 0.0)};
    for (std::size_t c = 0; c < s.c; ++c) {
        const double inv = 1.0 / std::sqrt(params.running_var[c] + params.eps);
        for (std::size_t n = 0; n < s.n; ++n) {
            auto go = grad_output.plane(n, c);
            auto x = input.plane(n, c);
            auto gi = g.input.plane(n, c);
            for (std::size_t i = 0; i < go.size(); ++i) {
                g.beta[c] += go[i];
                g.gamma[c] += go[i] * (x[i] - params.running_mean[c]) * inv;
                gi[i] = go[i] * params.gamma[c] * inv;
            }
        }
    }
    return g;
}

}  // namespace equiloc::nd
