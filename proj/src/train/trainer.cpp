#include "equiloc/train/trainer.hpp"

#include "equiloc/error.hpp"
#include "equiloc/ndkernel/adam.hpp"
#include "equiloc/ndkernel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace equiloc::train {

void TrainConfig::validate() const {
    if (epochs < 1) throw DomainError("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw DomainError("TrainConfig: batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw DomainError("TrainConfig: learning rate must be positive");
    if (!(success_threshold > 0.0 && success_threshold <= 1.0))
        throw DomainError("TrainConfig: success threshold must lie in (0, 1]");
    if (!(eps_px >= 0.0)) throw DomainError("TrainConfig: eps_px must be non-negative");
}

RunResult evaluate(model::Autoencoder& model, const std::vector<data::SyntheticSample>& samples,
                   const TrainConfig& cfg) {
    if (samples.empty()) throw DomainError("evaluate: empty sample set");
    constexpr std::size_t chunk = 64;

    std::size_t good_weighted = 0;
    double acc_sum = 0.0;
    std::vector<std::vector<eqv::LatentPoint>> predicted;
    std::vector<std::vector<eqv::LatentPoint>> truth;
    for (std::size_t start = 0; start < samples.size(); start += chunk) {
        std::vector<std::size_t> idx(std::min(chunk, samples.size() - start));
        std::iota(idx.begin(), idx.end(), start);
        const nd::Tensor4 images = data::stack_images(samples, idx);
        auto fr = model.forward(images, nd::Mode::Eval);
        acc_sum += reconstruction_accuracy(fr.reconstruction, images, cfg.eps_px) * static_cast<double>(idx.size());
        good_weighted += idx.size();
        for (std::size_t i = 0; i < idx.size(); ++i) {
            predicted.push_back(std::move(fr.latents[i]));
            truth.push_back({samples[idx[i]].centre});
        }
    }

    RunResult r;
    r.accuracy = acc_sum / static_cast<double>(good_weighted);
    r.success = r.accuracy >= cfg.success_threshold;
    auto pe = evaluate_position_error(predicted, truth);
    r.delta = pe.delta;
    r.assignment = std::move(pe.assignment);
    r.seed = cfg.seed;
    r.eval_mode = nd::Mode::Eval;

    double ymin = INFINITY, ymax = -INFINITY, xmin = INFINITY, xmax = -INFINITY;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        for (std::size_t k = 0; k < predicted[i].size(); ++k) {
            const auto d = predicted[i][k] - truth[i][r.assignment[i][k]];
            ymin = std::min(ymin, d.y);
            ymax = std::max(ymax, d.y);
            xmin = std::min(xmin, d.x);
            xmax = std::max(xmax, d.x);
        }
    }
    r.offset_spread_y = ymax - ymin;
    r.offset_spread_x = xmax - xmin;
    return r;
}

RunResult train_run(model::Autoencoder& model, const data::Split& split, const TrainConfig& cfg,
                    const EpochCallback& on_epoch) {
    cfg.validate();
    if (split.train.empty() || split.test.empty()) throw DomainError("train_run: empty train or test split");
    if (model.n_objects() != 1) throw DomainError("train_run: the square dataset has one object per image");

    std::vector<model::ParamRef> params = model.params();
    std::vector<nd::AdamState> states;
    states.reserve(params.size());
    for (const auto& p : params) states.emplace_back(p.value.size(), cfg.learning_rate);

    nd::Rng rng(nd::derive_seed(cfg.seed, 1));
    std::vector<std::size_t> order(split.train.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(cfg.epochs));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                               order.begin() + static_cast<std::ptrdiff_t>(end));
            const nd::Tensor4 images = data::stack_images(split.train, idx);

            model.zero_grad();
            model::ForwardResult fr;
            try {
                fr = model.forward_for_training(images, nd::Mode::Train);
            } catch (const DivergenceError&) {
                throw DivergenceError(epoch, std::nan(""));
            }
            const double loss = mse_loss(fr.reconstruction, images);
            if (!std::isfinite(loss)) throw DivergenceError(epoch, loss);
            model.backward(mse_loss_grad(fr.reconstruction, images));
            for (std::size_t k = 0; k < params.size(); ++k) nd::adam_step(params[k].value, params[k].grad, states[k]);
            loss_sum += loss * static_cast<double>(idx.size());
        }
        const double mean_loss = loss_sum / static_cast<double>(order.size());
        history.push_back(mean_loss);
        if (on_epoch) on_epoch(epoch, mean_loss);
    }

    RunResult r = evaluate(model, split.test, cfg);
    r.epochs_run = cfg.epochs;
    r.loss_history = std::move(history);
    return r;
}

}  // namespace equiloc::train
