#include "equiloc/data/export.hpp"

#include "equiloc/error.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>

namespace equiloc::data {

namespace {

constexpr std::array<char, 4> kMagic{'E', 'Q', 'D', 'S'};

template <typename U>
void put_le(std::ostream& out, U v) {
    std::array<char, sizeof(U)> bytes{};
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in, const std::string& path) {
    std::array<unsigned char, sizeof(U)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) throw IoError(path, "truncated dataset file");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& out, double d) { put_le(out, std::bit_cast<std::uint64_t>(d)); }
double get_f64(std::istream& in, const std::string& path) {
    return std::bit_cast<double>(get_le<std::uint64_t>(in, path));
}

}  // namespace

void write_dataset(const std::string& path, const SyntheticConfig& cfg, const std::vector<SyntheticSample>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open dataset for writing");
    const auto side = static_cast<std::size_t>(cfg.s_img);
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kDatasetVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.s_img));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.s_o));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.s_pad));
    put_le<std::uint64_t>(out, samples.size());
    for (const auto& s : samples) {
        nd::require_same_shape(s.image.shape(), nd::Shape4{1, 1, side, side}, "write_dataset");
        for (double v : s.image.values()) put_f64(out, v);
    }
    for (const auto& s : samples) {
        put_f64(out, s.centre.y);
        put_f64(out, s.centre.x);
    }
    if (!out) throw IoError(path, "write failed");
}

DatasetFile read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open dataset");
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw IoError(path, "not an equiloc dataset (bad magic)");
    const auto version = get_le<std::uint32_t>(in, path);
    if (version != kDatasetVersion) throw IoError(path, "unsupported dataset version " + std::to_string(version));

    DatasetFile file;
    file.config.s_img = static_cast<int>(get_le<std::uint32_t>(in, path));
    file.config.s_o = static_cast<int>(get_le<std::uint32_t>(in, path));
    file.config.s_pad = static_cast<int>(get_le<std::uint32_t>(in, path));
    const auto count = get_le<std::uint64_t>(in, path);
    const auto side = static_cast<std::size_t>(file.config.s_img);
    if (side == 0) throw IoError(path, "zero image size");

    file.samples.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        SyntheticSample s{nd::Tensor4({1, 1, side, side}), {}};
        for (double& v : s.image.values()) v = get_f64(in, path);
        file.samples.push_back(std::move(s));
    }
    for (auto& s : file.samples) {
        s.centre.y = get_f64(in, path);
        s.centre.x = get_f64(in, path);
    }
    return file;
}

void write_centre_index(const std::string& path, const std::vector<SyntheticSample>& samples) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open index for writing");
    out << "index y x\n" << std::setprecision(17);
    for (std::size_t i = 0; i < samples.size(); ++i)
        out << i << ' ' << samples[i].centre.y << ' ' << samples[i].centre.x << '\n';
    if (!out) throw IoError(path, "write failed");
}

}  // namespace equiloc::data
