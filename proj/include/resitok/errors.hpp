#pragma once

#include <stdexcept>
#include <string>

namespace resitok {

// Invalid configuration (bad table, impossible parameter combination).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad argument to an otherwise valid configuration.
struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Protocol contract violated (e.g. key tokens missing at the receiver).
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bitstream/LLR length bookkeeping mismatch.
struct FramingError : std::runtime_error {
    explicit FramingError(const std::string& msg) : std::runtime_error(msg) {}
};

// File I/O or parse failure; message carries the path and offset.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training diverged (non-finite loss).
struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace resitok
