#pragma once

#include "equiloc/ndkernel/batchnorm.hpp"
#include "equiloc/ndkernel/conv.hpp"
#include "equiloc/ndkernel/init.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace equiloc::model {

/// Layer list of a stride-1 CNN. Every layer but the last is followed by
/// batchnorm and ReLU; the last layer is linear.
struct NetworkSpec {
    std::vector<nd::ConvLayerSpec> layers;

    std::size_t in_channels() const { return layers.front().in_channels; }
    std::size_t out_channels() const { return layers.back().out_channels; }
    /// Checks channel chaining and each layer's kernel. Throws DomainError / ShapeError.
    void validate() const;
    bool operator==(const NetworkSpec&) const = default;
};

/// 1 + sum(kernel_size - 1) over stride-1 layers.
int receptive_field(const std::vector<nd::ConvLayerSpec>& layers);

/// Kernel sizes from {1,3,5,7} whose receptive field equals `target_rf`,
/// chosen greedily largest-first. Throws DomainError listing the feasible
/// targets when `target_rf` cannot be reached with `n_layers` layers.
std::vector<std::size_t> plan_kernels(int target_rf, std::size_t n_layers = 5);

/// plan_kernels wired into a CNN: in -> hidden -> ... -> hidden -> out.
std::vector<nd::ConvLayerSpec> plan_layers(int target_rf, std::size_t in_channels = 1, std::size_t hidden = 32,
                                           std::size_t out_channels = 1, std::size_t n_layers = 5);

/// Mutable parameter block with its gradient, as seen by the optimizer.
struct ParamRef {
    std::span<double> value;
    std::span<const double> grad;
};

/// One conv layer with optional batchnorm + ReLU and its gradient buffers.
struct Layer {
    nd::ConvLayerSpec spec;
    nd::ConvParams conv;
    std::optional<nd::BatchNormParams> bn;

    nd::Tensor4 grad_weights;
    std::vector<double> grad_bias;
    std::vector<double> grad_gamma;
    std::vector<double> grad_beta;
};

/// Forward/backward over a NetworkSpec. The forward pass keeps whatever the
/// matching backward pass needs; backward accumulates parameter gradients.
class ConvStack {
public:
    ConvStack() = default;
    ConvStack(const NetworkSpec& spec, std::uint64_t seed);

    const NetworkSpec& spec() const { return spec_; }
    std::size_t size() const { return layers_.size(); }
    Layer& layer(std::size_t i) { return layers_.at(i); }
    const Layer& layer(std::size_t i) const { return layers_.at(i); }

    nd::Tensor4 forward(const nd::Tensor4& input, nd::Mode mode, bool keep_cache);
    /// Requires a preceding forward with keep_cache = true.
    nd::Tensor4 backward(const nd::Tensor4& grad_output, bool need_input_grad);

    void zero_grad();
    void collect_params(std::vector<ParamRef>& out);
    void clear_cache() { cache_.clear(); }

private:
    struct Cache {
        nd::Tensor4 input;
        nd::Tensor4 conv_out;  // eval-mode batchnorm backward only
        nd::BatchNormCache bn;
        nd::Tensor4 pre_relu;
    };

    NetworkSpec spec_;
    std::vector<Layer> layers_;
    std::vector<Cache> cache_;
    nd::Mode cache_mode_ = nd::Mode::Train;
};

}  // namespace equiloc::model
