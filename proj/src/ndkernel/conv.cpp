#include "equiloc/ndkernel/conv.hpp"

#include "equiloc/error.hpp"

#include <algorithm>
#include <array>
#include <cstring>

// The kernels work on a zero-padded copy of each input plane laid out with
// row pitch Wp = W + kw - 1. Output pixel (y, x) then reads padded element
// (y + u) * Wp + x + v, so a whole plane can be processed as one contiguous
// run of H * Wp elements; the kw - 1 trailing columns of each row are junk
// and get dropped (forward) or zeroed (weight gradient).

namespace equiloc::nd {

void ConvLayerSpec::validate() const {
    if (in_channels == 0 || out_channels == 0) throw DomainError("ConvLayerSpec: channel count must be >= 1");
    if (kernel_size != 1 && kernel_size != 3 && kernel_size != 5 && kernel_size != 7) {
        throw DomainError("ConvLayerSpec: kernel_size must be one of {1,3,5,7}, got " +
                          std::to_string(kernel_size));
    }
}

namespace {

struct Geometry {
    std::size_t n, cin, cout, h, w, kh, kw;
    std::size_t wp() const { return w + kw - 1; }
    std::size_t hp() const { return h + kh - 1; }
    std::size_t run() const { return h * wp(); }
    // kw - 1 slack so the last run can read past the final padded row.
    std::size_t padded_plane() const { return hp() * wp() + kw; }
};

Geometry check_geometry(const Tensor4& input, const Tensor4& weights, const char* where) {
    const Shape4& in = input.shape();
    const Shape4& ws = weights.shape();
    if (ws.c != in.c) throw ShapeError("channel", ws.c, in.c, where);
    if (ws.h % 2 == 0) throw ShapeError("kernel height (must be odd)", ws.h + 1, ws.h, where);
    if (ws.w % 2 == 0) throw ShapeError("kernel width (must be odd)", ws.w + 1, ws.w, where);
    return {in.n, in.c, ws.n, in.h, in.w, ws.h, ws.w};
}

// Copies the interior of item n; the zero border is written once, when `buf`
// does not yet have the right size, and is never touched afterwards.
void pad_planes(const Tensor4& input, std::size_t n, const Geometry& g, std::vector<double>& buf) {
    const std::size_t ph = (g.kh - 1) / 2;
    const std::size_t pw = (g.kw - 1) / 2;
    const std::size_t pp = g.padded_plane();
    if (buf.size() != g.cin * pp) buf.assign(g.cin * pp, 0.0);
    for (std::size_t c = 0; c < g.cin; ++c) {
        auto src = input.plane(n, c);
        double* dst = buf.data() + c * pp;
        for (std::size_t y = 0; y < g.h; ++y) {
            std::copy_n(src.data() + y * g.w, g.w, dst + (y + ph) * g.wp() + pw);
        }
    }
}

// Eight doubles; one AVX-512 register, or two/four narrower ones elsewhere.
using V8 = double __attribute__((vector_size(64)));
constexpr std::size_t kLanes = 8;

inline V8 load8(const double* p) {
    V8 v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

inline void store8(double* p, V8 v) { std::memcpy(p, &v, sizeof v); }

inline double hsum(V8 v) {
    double s = 0.0;
    for (std::size_t l = 0; l < kLanes; ++l) s += v[l];
    return s;
}

// acc[o][i] += sum_{c,u,v} w[o][c][u][v] * padded[c][i + u*wp + v] for OB output
// channels at once, IB vectors of outputs per step.
template <int OB, int IB, int KW>
void forward_block(const Geometry& g, const double* padded, const double* const* wk, double* const* acc,
                   std::size_t i0, std::size_t i1) {
    const std::size_t pp = g.padded_plane();
    const std::size_t wp = g.wp();
    const std::size_t ksz = g.kh * KW;
    constexpr std::size_t step = IB * kLanes;
    std::size_t i = i0;
    for (; i + step <= i1; i += step) {
        V8 a[OB][IB];
        for (int o = 0; o < OB; ++o)
            for (int b = 0; b < IB; ++b) a[o][b] = load8(acc[o] + i + b * kLanes);
        for (std::size_t c = 0; c < g.cin; ++c) {
            const double* plane = padded + c * pp + i;
            for (std::size_t u = 0; u < g.kh; ++u) {
                for (int v = 0; v < KW; ++v) {
                    const double* src = plane + u * wp + v;
                    const std::size_t k = c * ksz + u * KW + v;
                    V8 x[IB];
                    for (int b = 0; b < IB; ++b) x[b] = load8(src + b * kLanes);
                    for (int o = 0; o < OB; ++o) {
                        const double w = wk[o][k];
                        for (int b = 0; b < IB; ++b) a[o][b] += w * x[b];
                    }
                }
            }
        }
        for (int o = 0; o < OB; ++o)
            for (int b = 0; b < IB; ++b) store8(acc[o] + i + b * kLanes, a[o][b]);
    }
    for (; i < i1; ++i) {
        for (int o = 0; o < OB; ++o) {
            double s = acc[o][i];
            for (std::size_t c = 0; c < g.cin; ++c)
                for (std::size_t u = 0; u < g.kh; ++u)
                    for (int v = 0; v < KW; ++v)
                        s += wk[o][c * ksz + u * KW + v] * padded[c * pp + i + u * wp + v];
            acc[o][i] = s;
        }
    }
}

template <int OB, int KW>
void forward_channels_kw(const Geometry& g, const double* padded, const double* const* wk, double* const* acc) {
    const std::size_t run = g.run();
    const std::size_t wide = run - run % (2 * kLanes);
    forward_block<OB, 2, KW>(g, padded, wk, acc, 0, wide);
    forward_block<OB, 1, KW>(g, padded, wk, acc, wide, run);
}

// Kernel widths outside {1,3,5,7} only arise from direct calls with odd
// rectangular kernels; they take the slow scalar path.
template <int OB>
void forward_channels(const Geometry& g, const double* padded, const double* const* wk, double* const* acc) {
    switch (g.kw) {
        case 1: forward_channels_kw<OB, 1>(g, padded, wk, acc); break;
        case 3: forward_channels_kw<OB, 3>(g, padded, wk, acc); break;
        case 5: forward_channels_kw<OB, 5>(g, padded, wk, acc); break;
        case 7: forward_channels_kw<OB, 7>(g, padded, wk, acc); break;
        default: {
            const std::size_t ksz = g.kh * g.kw;
            for (int o = 0; o < OB; ++o)
                for (std::size_t i = 0; i < g.run(); ++i) {
                    double s = acc[o][i];
                    for (std::size_t c = 0; c < g.cin; ++c)
                        for (std::size_t u = 0; u < g.kh; ++u)
                            for (std::size_t v = 0; v < g.kw; ++v)
                                s += wk[o][c * ksz + u * g.kw + v] *
                                     padded[c * g.padded_plane() + i + u * g.wp() + v];
                    acc[o][i] = s;
                }
        }
    }
}

// dw[o][c][u][v] += sum_i grad[o][i] * padded[c][i + u*wp + v] for OB output
// channels and every v of one kernel row at once.
template <int OB, int KW>
void weight_grad_row(const Geometry& g, const double* const* grad, const double* src, double* const* dw) {
    const std::size_t run = g.run();
    V8 a[OB][KW] = {};
    std::size_t i = 0;
    for (; i + kLanes <= run; i += kLanes) {
        V8 x[KW];
        for (int v = 0; v < KW; ++v) x[v] = load8(src + i + v);
        for (int o = 0; o < OB; ++o) {
            const V8 gv = load8(grad[o] + i);
            for (int v = 0; v < KW; ++v) a[o][v] += gv * x[v];
        }
    }
    for (int o = 0; o < OB; ++o) {
        for (int v = 0; v < KW; ++v) {
            double s = hsum(a[o][v]);
            for (std::size_t j = i; j < run; ++j) s += grad[o][j] * src[j + v];
            dw[o][v] += s;
        }
    }
}

template <int OB>
void weight_grad_row_dispatch(const Geometry& g, const double* const* grad, const double* src, double* const* dw) {
    switch (g.kw) {
        case 1: weight_grad_row<OB, 1>(g, grad, src, dw); break;
        case 3: weight_grad_row<OB, 3>(g, grad, src, dw); break;
        case 5: weight_grad_row<OB, 5>(g, grad, src, dw); break;
        case 7: weight_grad_row<OB, 7>(g, grad, src, dw); break;
        default:
            for (int o = 0; o < OB; ++o) {
                for (std::size_t v = 0; v < g.kw; ++v) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < g.run(); ++j) s += grad[o][j] * src[j + v];
                    dw[o][v] += s;
                }
            }
    }
}

}  // namespace

Tensor4 conv2d(const Tensor4& input, const Tensor4& weights, const std::vector<double>& bias) {
    const Geometry g = check_geometry(input, weights, "conv2d");
    if (bias.size() != g.cout) throw ShapeError("bias length", g.cout, bias.size(), "conv2d");

    Tensor4 out({g.n, g.cout, g.h, g.w});
    std::vector<double> padded;
    constexpr std::size_t OB = 4;
    std::vector<double> acc(OB * g.run());
    const std::size_t ksz = g.kh * g.kw;

    for (std::size_t n = 0; n < g.n; ++n) {
        pad_planes(input, n, g, padded);
        for (std::size_t o0 = 0; o0 < g.cout; o0 += OB) {
            const std::size_t ob = std::min(OB, g.cout - o0);
            const double* wk[OB];
            double* ap[OB];
            for (std::size_t k = 0; k < ob; ++k) {
                wk[k] = weights.data() + (o0 + k) * g.cin * ksz;
                ap[k] = acc.data() + k * g.run();
                std::fill_n(ap[k], g.run(), bias[o0 + k]);
            }
            switch (ob) {
                case 4: forward_channels<4>(g, padded.data(), wk, ap); break;
                case 3: forward_channels<3>(g, padded.data(), wk, ap); break;
                case 2: forward_channels<2>(g, padded.data(), wk, ap); break;
                default: forward_channels<1>(g, padded.data(), wk, ap); break;
            }
            for (std::size_t k = 0; k < ob; ++k) {
                auto dst = out.plane(n, o0 + k);
                for (std::size_t y = 0; y < g.h; ++y) std::copy_n(ap[k] + y * g.wp(), g.w, dst.data() + y * g.w);
            }
        }
    }
    return out;
}

Tensor4 conv2d(const Tensor4& input, const Tensor4& weights, const std::vector<double>& bias,
               const ConvLayerSpec& spec) {
    spec.validate();
    if (input.shape().c != spec.in_channels) throw ShapeError("channel", spec.in_channels, input.shape().c, "conv2d");
    const Shape4 ws = weights.shape();
    const Shape4 want = spec.weight_shape();
    if (ws.n != want.n) throw ShapeError("weight out_channels", want.n, ws.n, "conv2d");
    if (ws.c != want.c) throw ShapeError("weight in_channels", want.c, ws.c, "conv2d");
    if (ws.h != want.h) throw ShapeError("kernel height", want.h, ws.h, "conv2d");
    if (ws.w != want.w) throw ShapeError("kernel width", want.w, ws.w, "conv2d");
    return conv2d(input, weights, bias);
}

ConvGrads conv2d_backward(const Tensor4& input, const Tensor4& weights, const Tensor4& grad_output,
                          bool need_input_grad) {
    const Geometry g = check_geometry(input, weights, "conv2d_backward");
    require_same_shape(grad_output.shape(), {g.n, g.cout, g.h, g.w}, "conv2d_backward");

    ConvGrads grads;
    grads.weights = Tensor4(weights.shape(), 0.0);
    grads.bias.assign(g.cout, 0.0);

    std::vector<double> padded;
    std::vector<double> gpitch(g.cout * g.run(), 0.0);
    const std::size_t pp = g.padded_plane();
    const std::size_t ksz = g.kh * g.kw;
    constexpr std::size_t OB = 3;

    for (std::size_t n = 0; n < g.n; ++n) {
        pad_planes(input, n, g, padded);
        for (std::size_t o = 0; o < g.cout; ++o) {
            auto go = grad_output.plane(n, o);
            double* dst = gpitch.data() + o * g.run();
            for (std::size_t y = 0; y < g.h; ++y) std::copy_n(go.data() + y * g.w, g.w, dst + y * g.wp());
            double bsum = 0.0;
            for (double v : go) bsum += v;
            grads.bias[o] += bsum;
        }
        for (std::size_t o0 = 0; o0 < g.cout; o0 += OB) {
            const std::size_t ob = std::min(OB, g.cout - o0);
            const double* gp[OB];
            for (std::size_t k = 0; k < ob; ++k) gp[k] = gpitch.data() + (o0 + k) * g.run();
            for (std::size_t c = 0; c < g.cin; ++c) {
                for (std::size_t u = 0; u < g.kh; ++u) {
                    double* dw[OB];
                    for (std::size_t k = 0; k < ob; ++k)
                        dw[k] = grads.weights.data() + ((o0 + k) * g.cin + c) * ksz + u * g.kw;
                    const double* src = padded.data() + c * pp + u * g.wp();
                    switch (ob) {
                        case 3: weight_grad_row_dispatch<3>(g, gp, src, dw); break;
                        case 2: weight_grad_row_dispatch<2>(g, gp, src, dw); break;
                        default: weight_grad_row_dispatch<1>(g, gp, src, dw); break;
                    }
                }
            }
        }
    }

    if (need_input_grad) {
        // d/d input is the same-padded correlation of grad_output with the
        // spatially flipped, channel-transposed kernel.
        Tensor4 flipped({g.cin, g.cout, g.kh, g.kw});
        for (std::size_t o = 0; o < g.cout; ++o)
            for (std::size_t c = 0; c < g.cin; ++c)
                for (std::size_t u = 0; u < g.kh; ++u)
                    for (std::size_t v = 0; v < g.kw; ++v)
                        flipped.at(c, o, g.kh - 1 - u, g.kw - 1 - v) = weights.at(o, c, u, v);
        grads.input = conv2d(grad_output, flipped, std::vector<double>(g.cin, 0.0));
    }
    return grads;
}

}  // namespace equiloc::nd
