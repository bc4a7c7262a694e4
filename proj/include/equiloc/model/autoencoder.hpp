#pragma once

#include "equiloc/equivariant/ops.hpp"
#include "equiloc/model/network.hpp"

#include <cstdint>
#include <vector>

namespace equiloc::model {

/// Channels 0 and 1 hold the row and column ramps (i + 0.5) / I and (j + 0.5) / J.
nd::Tensor4 positional_encoding(std::size_t height, std::size_t width);

/// Hyperparameters of the standard architecture: two 5-layer CNNs whose
/// receptive fields equal s_psi and s_phi.
struct ModelConfig {
    std::size_t height = 48;
    std::size_t width = 48;
    std::size_t n_objects = 1;
    std::size_t channels = 32;
    std::size_t n_layers = 5;
    int s_psi = 9;
    int s_phi = 25;
    eqv::SoftArgmaxConfig softargmax{};
    eqv::RenderConfig render{};
    std::uint64_t seed = 0;
};

/// Latent points of a batch, indexed [item][object].
using Latents = std::vector<std::vector<eqv::LatentPoint>>;

struct ForwardResult {
    nd::Tensor4 reconstruction;
    Latents latents;
};

/// Encoder psi -> soft argmax -> Gaussian render (+ positional encodings) -> decoder phi.
class Autoencoder {
public:
    Autoencoder() = default;
    explicit Autoencoder(const ModelConfig& cfg);
    /// Custom networks: the encoder emits n_objects maps, the decoder takes n_objects + 2 channels.
    Autoencoder(const NetworkSpec& encoder, const NetworkSpec& decoder, std::size_t height, std::size_t width,
                eqv::SoftArgmaxConfig softargmax, eqv::RenderConfig render, std::uint64_t seed);

    std::size_t height() const { return height_; }
    std::size_t width() const { return width_; }
    std::size_t n_objects() const { return n_objects_; }
    std::uint64_t seed() const { return seed_; }
    const eqv::SoftArgmaxConfig& softargmax_config() const { return softargmax_; }
    const eqv::RenderConfig& render_config() const { return render_; }
    void set_softargmax_config(const eqv::SoftArgmaxConfig& c) { c.validate(); softargmax_ = c; }
    void set_render_config(const eqv::RenderConfig& c) { c.validate(); render_ = c; }

    ConvStack& encoder() { return encoder_; }
    ConvStack& decoder() { return decoder_; }
    const ConvStack& encoder() const { return encoder_; }
    const ConvStack& decoder() const { return decoder_; }
    const nd::Tensor4& positional_maps() const { return positional_; }

    /// Encoder embedding maps e_1..e_n, shape (N, n_objects, H, W).
    nd::Tensor4 embed(const nd::Tensor4& images, nd::Mode mode);
    Latents encode(const nd::Tensor4& images, nd::Mode mode = nd::Mode::Eval);
    /// Renders each point, appends the positional channels and runs the decoder.
    nd::Tensor4 decode(const Latents& latents, nd::Mode mode = nd::Mode::Eval);
    ForwardResult forward(const nd::Tensor4& images, nd::Mode mode = nd::Mode::Eval);

    /// Forward pass that keeps every intermediate needed by backward().
    ForwardResult forward_for_training(const nd::Tensor4& images, nd::Mode mode = nd::Mode::Train);
    /// Accumulates parameter gradients of a loss with d(loss)/d(reconstruction) = grad.
    /// Returns d(loss)/d(images).
    nd::Tensor4 backward(const nd::Tensor4& grad_reconstruction, bool need_input_grad = false);

    void zero_grad();
    /// Parameter/gradient views for the optimizer; valid until the model is moved, copied or reloaded.
    std::vector<ParamRef> params();

private:
    void check_images(const nd::Tensor4& images) const;
    nd::Tensor4 render_input(const Latents& latents) const;
    Latents extract(const nd::Tensor4& maps) const;

    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t n_objects_ = 1;
    std::uint64_t seed_ = 0;
    eqv::SoftArgmaxConfig softargmax_{};
    eqv::RenderConfig render_{};
    ConvStack encoder_;
    ConvStack decoder_;
    nd::Tensor4 positional_;

    // training trace
    nd::Tensor4 trace_maps_;
    Latents trace_latents_;
};

}  // namespace equiloc::model
