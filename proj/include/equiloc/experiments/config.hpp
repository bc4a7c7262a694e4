#pragma once

#include "equiloc/experiments/sweep.hpp"

#include <string>

namespace equiloc::experiments {

// JSON config schema (every key optional; missing keys keep the preset
// chosen by "mode" and "vary"):
//
//   {
//     "mode": "desk" | "paper",
//     "vary": "enc-rf" | "dec-rf" | "obj-size" | "sigma-g",
//     "values": [1, 3, 5],
//     "fixed": {"s_psi": 5, "s_phi": 13, "s_o": 5, "sigma_g": 0.8, "n_sigma": 4},
//     "seeds": 10,
//     "master_seed": 0,
//     "s_img": 48,
//     "min_positions": 4,
//     "s_pad": 14,
//     "channels": 8,
//     "n_layers": 5,
//     "temperature": 0.5,
//     "train": {"epochs": 100, "batch_size": 8, "learning_rate": 0.005,
//               "success_threshold": 0.999, "eps_px": 0.1}
//   }

SweepConfig sweep_config_from_json(const std::string& text);
std::string sweep_config_to_json(const SweepConfig& cfg);
SweepConfig load_sweep_config(const std::string& path);

}  // namespace equiloc::experiments
