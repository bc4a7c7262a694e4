#include "equiloc/train/loss.hpp"

#include "equiloc/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace equiloc::train {

double mse_loss(const nd::Tensor4& prediction, const nd::Tensor4& target) {
    nd::require_same_shape(prediction.shape(), target.shape(), "mse_loss");
    const auto p = prediction.values();
    const auto t = target.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - t[i];
        sum += d * d;
    }
    return sum / static_cast<double>(p.size());
}

nd::Tensor4 mse_loss_grad(const nd::Tensor4& prediction, const nd::Tensor4& target) {
    nd::require_same_shape(prediction.shape(), target.shape(), "mse_loss_grad");
    nd::Tensor4 grad(prediction.shape());
    const auto p = prediction.values();
    const auto t = target.values();
    auto g = grad.values();
    const double scale = 2.0 / static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) g[i] = scale * (p[i] - t[i]);
    return grad;
}

double reconstruction_accuracy(const nd::Tensor4& prediction, const nd::Tensor4& target, double eps_px) {
    nd::require_same_shape(prediction.shape(), target.shape(), "reconstruction_accuracy");
    const auto p = prediction.values();
    const auto t = target.values();
    std::size_t good = 0;
    for (std::size_t i = 0; i < p.size(); ++i) good += std::abs(p[i] - t[i]) <= eps_px ? 1 : 0;
    return static_cast<double>(good) / static_cast<double>(p.size());
}

PositionError evaluate_position_error(const std::vector<std::vector<eqv::LatentPoint>>& predicted,
                                      const std::vector<std::vector<eqv::LatentPoint>>& truth) {
    if (predicted.size() != truth.size())
        throw ShapeError("item count", truth.size(), predicted.size(), "evaluate_position_error");

    PositionError out;
    out.assignment.reserve(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const auto& z = predicted[i];
        const auto& u = truth[i];
        if (z.size() != u.size()) throw ShapeError("object count", u.size(), z.size(), "evaluate_position_error");
        if (z.size() > 8) throw DomainError("evaluate_position_error: more than 8 objects per item");

        std::vector<std::size_t> perm(z.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::vector<std::size_t> best = perm;
        double best_cost = INFINITY;
        do {
            double cost = 0.0;
            for (std::size_t k = 0; k < z.size(); ++k)
                cost += std::abs(z[k].y - u[perm[k]].y) + std::abs(z[k].x - u[perm[k]].x);
            if (cost < best_cost) {
                best_cost = cost;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        for (std::size_t k = 0; k < z.size(); ++k) {
            out.delta = std::max({out.delta, std::abs(z[k].y - u[best[k]].y), std::abs(z[k].x - u[best[k]].x)});
        }
        out.assignment.push_back(std::move(best));
    }
    return out;
}

}  // namespace equiloc::train
