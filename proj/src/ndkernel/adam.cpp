#include "equiloc/ndkernel/adam.hpp"

#include "equiloc/error.hpp"

#include <cmath>

namespace equiloc::nd {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    if (grads.size() != params.size()) throw ShapeError("gradient length", params.size(), grads.size(), "adam_step");
    if (state.m.size() != params.size()) throw ShapeError("first moment length", params.size(), state.m.size(), "adam_step");
    if (state.v.size() != params.size()) throw ShapeError("second moment length", params.size(), state.v.size(), "adam_step");
    if (!(state.learning_rate > 0.0)) throw DomainError("adam_step: learning rate must be positive");

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double mhat = state.m[i] / c1;
        const double vhat = state.v[i] / c2;
        params[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.eps);
    }
}

}  // namespace equiloc::nd
