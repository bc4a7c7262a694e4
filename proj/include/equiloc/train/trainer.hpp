#pragma once

#include "equiloc/data/synthetic.hpp"
#include "equiloc/model/autoencoder.hpp"
#include "equiloc/train/loss.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace equiloc::train {

struct TrainConfig {
    int epochs = 500;
    std::size_t batch_size = 128;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
    double success_threshold = 0.999;
    double eps_px = 0.1;

    /// Throws DomainError when a field is out of range.
    void validate() const;
};

struct RunResult {
    double accuracy = 0.0;
    bool success = false;
    double delta = 0.0;  // px, over the test set
    std::vector<std::vector<std::size_t>> assignment;
    /// Spread (max - min) of z - u over the test set, per axis. A translation
    /// equivariant model keeps it small: its error is a constant offset.
    double offset_spread_y = 0.0;
    double offset_spread_x = 0.0;
    int epochs_run = 0;
    std::uint64_t seed = 0;
    nd::Mode eval_mode = nd::Mode::Eval;
    std::vector<double> loss_history;  // mean training loss per epoch
};

/// Called after every epoch with (epoch index, mean training loss).
using EpochCallback = std::function<void(int, double)>;

/// Adam on the training split with a per-epoch shuffle drawn from cfg.seed,
/// then eval-mode accuracy and position error on the test split.
/// Throws DivergenceError when a batch loss or latent is not finite.
RunResult train_run(model::Autoencoder& model, const data::Split& split, const TrainConfig& cfg,
                    const EpochCallback& on_epoch = {});

/// Eval-mode reconstruction accuracy and position error of `samples`.
RunResult evaluate(model::Autoencoder& model, const std::vector<data::SyntheticSample>& samples,
                   const TrainConfig& cfg);

}  // namespace equiloc::train
