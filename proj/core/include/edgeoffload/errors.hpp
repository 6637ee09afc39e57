#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edgeoffload {

/// Precondition or domain violation on an input value.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A window or series does not yet hold enough values for the request.
class InsufficientHistoryError : public std::runtime_error {
public:
    explicit InsufficientHistoryError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed serialized input. Carries the byte offset of the defect.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what + " (byte " + std::to_string(byte_offset) + ")"),
          byte_offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_;
};

/// Invalid or inconsistent run configuration, rejected before any work starts.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Training failure (divergence or a non-finite intermediate). Carries the
/// epoch at which the failure was detected, when known.
class TrainingError : public std::runtime_error {
public:
    explicit TrainingError(const std::string& what, long epoch = -1)
        : std::runtime_error(epoch >= 0 ? what + " (epoch " + std::to_string(epoch) + ")" : what),
          epoch_(epoch) {}

    long epoch() const noexcept { return epoch_; }

private:
    long epoch_;
};

}  // namespace edgeoffload
