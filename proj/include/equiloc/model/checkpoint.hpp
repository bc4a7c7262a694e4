#pragma once

#include "equiloc/model/autoencoder.hpp"

#include <string>

namespace equiloc::model {

/// Checkpoint container version written by save_checkpoint.
inline constexpr int kCheckpointVersion = 1;

/// JSON document holding both NetworkSpecs, every parameter, the running
/// batchnorm statistics, temperature, sigma_G, image size and seed. Doubles
/// are written in shortest round-trip form, so a reload reproduces forward
/// passes bit for bit.
void save_checkpoint(const Autoencoder& model, const std::string& path);
Autoencoder load_checkpoint(const std::string& path);

std::string checkpoint_to_string(const Autoencoder& model);
Autoencoder checkpoint_from_string(const std::string& text);

}  // namespace equiloc::model
