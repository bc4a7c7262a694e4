#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace equiloc {

/// Raised when tensor or parameter shapes disagree. `dimension` names the
/// offending axis ("channel", "height", ...), so callers can report it.
class ShapeError : public std::invalid_argument {
public:
    ShapeError(std::string dimension, std::size_t expected, std::size_t actual,
               const std::string& where)
        : std::invalid_argument(where + ": " + dimension + " mismatch (expected " +
                                std::to_string(expected) + ", got " +
                                std::to_string(actual) + ")"),
          dimension_(std::move(dimension)), expected_(expected), actual_(actual) {}

    const std::string& dimension() const noexcept { return dimension_; }
    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::string dimension_;
    std::size_t expected_;
    std::size_t actual_;
};

/// An argument outside the domain where an operation is defined.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Training produced a non-finite loss or latent. epoch() is -1 when unknown.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int epoch, double loss)
        : std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                             " (loss = " + std::to_string(loss) + ")"),
          epoch_(epoch) {}

    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

/// File read/write failure; carries the path.
class IoError : public std::runtime_error {
public:
    IoError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace equiloc
