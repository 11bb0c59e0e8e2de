#pragma once

#include <stdexcept>
#include <string>

namespace maip {

// Dimension / shape mismatch between tensors or grids.
struct ShapeError : std::invalid_argument {
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// API misuse (backward on a non-scalar, encoder called at test time, ...).
struct UsageError : std::logic_error {
    explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

// Invalid or inconsistent configuration values.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Entity id not present in a frame or dataset.
struct LookupError : std::out_of_range {
    explicit LookupError(const std::string& what) : std::out_of_range(what) {}
};

// File read/write failure.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace maip
