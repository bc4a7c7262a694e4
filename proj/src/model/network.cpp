#include "equiloc/model/network.hpp"

#include "equiloc/error.hpp"
#include "equiloc/ndkernel/activation.hpp"
#include "equiloc/ndkernel/rng.hpp"

#include <algorithm>
#include <string>

namespace equiloc::model {

void NetworkSpec::validate() const {
    if (layers.empty()) throw DomainError("NetworkSpec: no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].validate();
        if (i > 0 && layers[i].in_channels != layers[i - 1].out_channels) {
            throw ShapeError("channel", layers[i - 1].out_channels, layers[i].in_channels,
                             "NetworkSpec layer " + std::to_string(i));
        }
    }
}

int receptive_field(const std::vector<nd::ConvLayerSpec>& layers) {
    int rf = 1;
    for (const auto& l : layers) rf += static_cast<int>(l.kernel_size) - 1;
    return rf;
}

std::vector<std::size_t> plan_kernels(int target_rf, std::size_t n_layers) {
    const int max_rf = 1 + 6 * static_cast<int>(n_layers);
    if (n_layers == 0 || target_rf < 1 || target_rf % 2 == 0 || target_rf > max_rf) {
        throw DomainError("plan_layers: receptive field " + std::to_string(target_rf) + " is not reachable with " +
                          std::to_string(n_layers) + " layers of kernel <= 7; feasible targets are the odd values 1.." +
                          std::to_string(max_rf));
    }
    std::vector<std::size_t> kernels;
    int remaining = target_rf - 1;
    for (std::size_t i = 0; i < n_layers; ++i) {
        const int step = std::min(6, remaining);
        kernels.push_back(static_cast<std::size_t>(step + 1));
        remaining -= step;
    }
    return kernels;
}

std::vector<nd::ConvLayerSpec> plan_layers(int target_rf, std::size_t in_channels, std::size_t hidden,
                                           std::size_t out_channels, std::size_t n_layers) {
    const auto kernels = plan_kernels(target_rf, n_layers);
    std::vector<nd::ConvLayerSpec> layers;
    for (std::size_t i = 0; i < kernels.size(); ++i) {
        const std::size_t in = i == 0 ? in_channels : hidden;
        const std::size_t out = i + 1 == kernels.size() ? out_channels : hidden;
        layers.push_back({in, out, kernels[i]});
    }
    return layers;
}

ConvStack::ConvStack(const NetworkSpec& spec, std::uint64_t seed) : spec_(spec) {
    spec_.validate();
    for (std::size_t i = 0; i < spec_.layers.size(); ++i) {
        Layer l;
        l.spec = spec_.layers[i];
        l.conv = nd::init_params(l.spec, nd::derive_seed(seed, i));
        if (i + 1 < spec_.layers.size()) l.bn = nd::BatchNormParams::identity(l.spec.out_channels);
        layers_.push_back(std::move(l));
    }
    zero_grad();
}

nd::Tensor4 ConvStack::forward(const nd::Tensor4& input, nd::Mode mode, bool keep_cache) {
    cache_.clear();
    cache_mode_ = mode;
    nd::Tensor4 x = input;
    for (auto& l : layers_) {
        Cache c;
        nd::Tensor4 y = nd::conv2d(x, l.conv.weights, l.conv.bias, l.spec);
        if (keep_cache) c.input = std::move(x);
        if (l.bn) {
            nd::Tensor4 z = nd::batchnorm(y, *l.bn, mode, keep_cache && mode == nd::Mode::Train ? &c.bn : nullptr);
            if (keep_cache && mode == nd::Mode::Eval) c.conv_out = std::move(y);
            x = nd::relu(z);
            if (keep_cache) c.pre_relu = std::move(z);
        } else {
            x = std::move(y);
        }
        if (keep_cache) cache_.push_back(std::move(c));
    }
    return x;
}

nd::Tensor4 ConvStack::backward(const nd::Tensor4& grad_output, bool need_input_grad) {
    if (cache_.size() != layers_.size()) throw DomainError("ConvStack::backward without a cached forward pass");
    nd::Tensor4 g = grad_output;
    for (std::size_t i = layers_.size(); i-- > 0;) {
        Layer& l = layers_[i];
        Cache& c = cache_[i];
        if (l.bn) {
            g = nd::relu_backward(c.pre_relu, g);
            nd::BatchNormGrads bg = cache_mode_ == nd::Mode::Train ? nd::batchnorm_backward(g, *l.bn, c.bn)
                                                                   : nd::batchnorm_backward_eval(c.conv_out, g, *l.bn);
            for (std::size_t k = 0; k < bg.gamma.size(); ++k) {
                l.grad_gamma[k] += bg.gamma[k];
                l.grad_beta[k] += bg.beta[k];
            }
            g = std::move(bg.input);
        }
        const bool want_input = i > 0 || need_input_grad;
        nd::ConvGrads cg = nd::conv2d_backward(c.input, l.conv.weights, g, want_input);
        for (std::size_t k = 0; k < cg.weights.size(); ++k) l.grad_weights.data()[k] += cg.weights.data()[k];
        for (std::size_t k = 0; k < cg.bias.size(); ++k) l.grad_bias[k] += cg.bias[k];
        if (want_input) g = std::move(cg.input);
    }
    return need_input_grad ? g : nd::Tensor4();
}

// Zeroes in place once the buffers exist, so spans from collect_params stay valid.
void ConvStack::zero_grad() {
    for (auto& l : layers_) {
        if (l.grad_weights.shape() == l.conv.weights.shape())
            l.grad_weights.fill(0.0);
        else
            l.grad_weights = nd::Tensor4(l.conv.weights.shape(), 0.0);
        l.grad_bias.assign(l.conv.bias.size(), 0.0);
        const std::size_t nb = l.bn ? l.bn->channels() : 0;
        l.grad_gamma.assign(nb, 0.0);
        l.grad_beta.assign(nb, 0.0);
    }
}

void ConvStack::collect_params(std::vector<ParamRef>& out) {
    for (auto& l : layers_) {
        out.push_back({l.conv.weights.values(), l.grad_weights.values()});
        out.push_back({l.conv.bias, l.grad_bias});
        if (l.bn) {
            out.push_back({l.bn->gamma, l.grad_gamma});
            out.push_back({l.bn->beta, l.grad_beta});
        }
    }
}

}  // namespace equiloc::model
