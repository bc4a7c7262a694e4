#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace equiloc::nd {

struct AdamState {
    std::vector<double> m;  // first moment
    std::vector<double> v;  // second moment
    std::uint64_t step = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    AdamState(std::size_t size, double lr) : m(size, 0.0), v(size, 0.0), learning_rate(lr) {}
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace equiloc::nd
