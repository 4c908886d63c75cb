#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rankone {

/// Bad user input. `key()` names the offending config key or argument.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string key, const std::string& message)
        : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// A configured resource cap (bit length, grid size, enumeration size) would be exceeded.
class CapError : public std::runtime_error {
public:
    CapError(const std::string& message, std::uint64_t required)
        : std::runtime_error(message), required_(required) {}
    std::uint64_t required() const noexcept { return required_; }

private:
    std::uint64_t required_;
};

/// A numerical procedure could not produce a meaningful result (degenerate input).
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rankone
