#pragma once

#include "equiloc/data/synthetic.hpp"

#include <string>

namespace equiloc::data {

// Binary dataset layout, all integers and doubles little-endian:
//
//   offset  size            field
//   0       4               magic "EQDS"
//   4       4   u32         format version (1)
//   8       4   u32         s_img
//   12      4   u32         s_o
//   16      4   u32         s_pad
//   20      8   u64         sample count N
//   28      N*s_img^2*8     pixels, f64, row-major per image, images in order
//   ...     N*16            centres, f64 pairs (y, x)
//
// The text index written next to it has one "index y x" line per sample.

inline constexpr std::uint32_t kDatasetVersion = 1;

struct DatasetFile {
    SyntheticConfig config;
    std::vector<SyntheticSample> samples;
};

void write_dataset(const std::string& path, const SyntheticConfig& cfg, const std::vector<SyntheticSample>& samples);
DatasetFile read_dataset(const std::string& path);
void write_centre_index(const std::string& path, const std::vector<SyntheticSample>& samples);

}  // namespace equiloc::data
