#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input line (carries the 1-based line number).
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + msg), line_number(line) {}
    std::size_t line_number;
};

struct ArgumentError : Error {
    using Error::Error;
};

// Operation called in a state that forbids it (e.g. step after done).
struct StateError : Error {
    using Error::Error;
};

// Candidate sampling exhausted its retry budget.
struct GenerationError : Error {
    using Error::Error;
};

struct CheckpointError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ReportError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace kgc
