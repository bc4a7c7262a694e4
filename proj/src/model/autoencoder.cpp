#include "equiloc/model/autoencoder.hpp"

#include "equiloc/error.hpp"
#include "equiloc/ndkernel/rng.hpp"

#include <cmath>
#include <string>

namespace equiloc::model {

nd::Tensor4 positional_encoding(std::size_t height, std::size_t width) {
    nd::Tensor4 pe({1, 2, height, width});
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            pe.at(0, 0, y, x) = (static_cast<double>(y) + 0.5) / static_cast<double>(height);
            pe.at(0, 1, y, x) = (static_cast<double>(x) + 0.5) / static_cast<double>(width);
        }
    }
    return pe;
}

namespace {

NetworkSpec make_spec(int rf, std::size_t in, std::size_t hidden, std::size_t out, std::size_t n_layers) {
    return NetworkSpec{plan_layers(rf, in, hidden, out, n_layers)};
}

}  // namespace

Autoencoder::Autoencoder(const ModelConfig& cfg)
    : Autoencoder(make_spec(cfg.s_psi, 1, cfg.channels, cfg.n_objects, cfg.n_layers),
                  make_spec(cfg.s_phi, cfg.n_objects + 2, cfg.channels, 1, cfg.n_layers), cfg.height, cfg.width,
                  cfg.softargmax, cfg.render, cfg.seed) {}

Autoencoder::Autoencoder(const NetworkSpec& encoder, const NetworkSpec& decoder, std::size_t height,
                         std::size_t width, eqv::SoftArgmaxConfig softargmax, eqv::RenderConfig render,
                         std::uint64_t seed)
    : height_(height),
      width_(width),
      n_objects_(encoder.layers.empty() ? 0 : encoder.out_channels()),
      seed_(seed),
      softargmax_(softargmax),
      render_(render),
      encoder_(encoder, nd::derive_seed(seed, 1000)),
      decoder_(decoder, nd::derive_seed(seed, 2000)),
      positional_(positional_encoding(height, width)) {
    softargmax_.validate();
    render_.validate();
    if (height == 0 || width == 0) throw DomainError("Autoencoder: image size must be positive");
    if (encoder.in_channels() != 1) throw ShapeError("encoder input channel", 1, encoder.in_channels(), "Autoencoder");
    if (decoder.in_channels() != n_objects_ + 2)
        throw ShapeError("decoder input channel", n_objects_ + 2, decoder.in_channels(), "Autoencoder");
    if (decoder.out_channels() != 1) throw ShapeError("decoder output channel", 1, decoder.out_channels(), "Autoencoder");
}

void Autoencoder::check_images(const nd::Tensor4& images) const {
    const auto& s = images.shape();
    if (s.c != 1) throw ShapeError("channel", 1, s.c, "Autoencoder");
    if (s.h != height_) throw ShapeError("height", height_, s.h, "Autoencoder");
    if (s.w != width_) throw ShapeError("width", width_, s.w, "Autoencoder");
}

Latents Autoencoder::extract(const nd::Tensor4& maps) const {
    const auto& s = maps.shape();
    Latents z(s.n, std::vector<eqv::LatentPoint>(s.c));
    for (std::size_t n = 0; n < s.n; ++n)
        for (std::size_t c = 0; c < s.c; ++c) z[n][c] = eqv::softargmax2d({maps.plane(n, c), s.h, s.w}, softargmax_);
    return z;
}

nd::Tensor4 Autoencoder::render_input(const Latents& latents) const {
    const std::size_t n = latents.size();
    if (n == 0) throw DomainError("decode: empty batch");
    nd::Tensor4 input({n, n_objects_ + 2, height_, width_});
    const double hmax = static_cast<double>(height_);
    const double wmax = static_cast<double>(width_);
    for (std::size_t b = 0; b < n; ++b) {
        if (latents[b].size() != n_objects_) throw ShapeError("latent count", n_objects_, latents[b].size(), "decode");
        for (std::size_t k = 0; k < n_objects_; ++k) {
            const auto& z = latents[b][k];
            if (!std::isfinite(z.y) || !std::isfinite(z.x)) throw DivergenceError(-1, std::nan(""));
            if (!(z.y >= 0.0 && z.y <= hmax && z.x >= 0.0 && z.x <= wmax)) {
                throw DomainError("decode: latent (" + std::to_string(z.y) + ", " + std::to_string(z.x) +
                                  ") lies outside the " + std::to_string(height_) + "x" + std::to_string(width_) +
                                  " image");
            }
            eqv::render_gaussian2d_into(z, render_, input.plane(b, k), height_, width_);
        }
        for (std::size_t c = 0; c < 2; ++c) {
            auto src = positional_.plane(0, c);
            std::copy(src.begin(), src.end(), input.plane(b, n_objects_ + c).begin());
        }
    }
    return input;
}

nd::Tensor4 Autoencoder::embed(const nd::Tensor4& images, nd::Mode mode) {
    check_images(images);
    return encoder_.forward(images, mode, false);
}

Latents Autoencoder::encode(const nd::Tensor4& images, nd::Mode mode) { return extract(embed(images, mode)); }

nd::Tensor4 Autoencoder::decode(const Latents& latents, nd::Mode mode) {
    return decoder_.forward(render_input(latents), mode, false);
}

ForwardResult Autoencoder::forward(const nd::Tensor4& images, nd::Mode mode) {
    Latents z = encode(images, mode);
    nd::Tensor4 rec = decode(z, mode);
    return {std::move(rec), std::move(z)};
}

ForwardResult Autoencoder::forward_for_training(const nd::Tensor4& images, nd::Mode mode) {
    check_images(images);
    trace_maps_ = encoder_.forward(images, mode, true);
    trace_latents_ = extract(trace_maps_);
    nd::Tensor4 rec = decoder_.forward(render_input(trace_latents_), mode, true);
    return {std::move(rec), trace_latents_};
}

nd::Tensor4 Autoencoder::backward(const nd::Tensor4& grad_reconstruction, bool need_input_grad) {
    const nd::Tensor4 grad_dec_in = decoder_.backward(grad_reconstruction, true);
    const auto& ms = trace_maps_.shape();
    nd::Tensor4 grad_maps(ms);
    for (std::size_t b = 0; b < ms.n; ++b) {
        for (std::size_t k = 0; k < ms.c; ++k) {
            const eqv::LatentPoint gz =
                eqv::render_gaussian2d_backward(trace_latents_[b][k], height_, width_, render_, grad_dec_in.plane(b, k));
            eqv::softargmax2d_backward({trace_maps_.plane(b, k), ms.h, ms.w}, softargmax_, gz, grad_maps.plane(b, k));
        }
    }
    return encoder_.backward(grad_maps, need_input_grad);
}

void Autoencoder::zero_grad() {
    encoder_.zero_grad();
    decoder_.zero_grad();
}

std::vector<ParamRef> Autoencoder::params() {
    std::vector<ParamRef> out;
    encoder_.collect_params(out);
    decoder_.collect_params(out);
    return out;
}

}  // namespace equiloc::model
