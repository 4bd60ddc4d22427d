#pragma once

#include <stdexcept>
#include <string>

namespace ragmia {

// Bad inputs, bad config, contract violations. CLI maps these to exit 1.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Anything that goes wrong while executing a valid request. Exit 2.
struct RuntimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : RuntimeError {
    using RuntimeError::RuntimeError;
};

struct NetworkError : RuntimeError {
    using RuntimeError::RuntimeError;
};

struct HttpStatusError : RuntimeError {
    HttpStatusError(int status_code, const std::string& msg)
        : RuntimeError(msg), status(status_code) {}
    int status;
};

struct ResponseParseError : RuntimeError {
    ResponseParseError(std::size_t byte_pos, const std::string& msg)
        : RuntimeError(msg), position(byte_pos) {}
    std::size_t position;
};

}  // namespace ragmia
