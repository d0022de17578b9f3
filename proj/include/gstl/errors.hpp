#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gstl {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values (negative threshold, out-of-range fraction, ...).
struct ValueError : Error {
    using Error::Error;
};

// Shape mismatches between matrices / ensembles / observation vectors.
struct DimensionError : Error {
    using Error::Error;
};

// Malformed or inconsistent input files.
struct DataError : Error {
    using Error::Error;
};

struct EncodingError : DataError {
    EncodingError(const std::string& msg, std::size_t offset)
        : DataError(msg), byte_offset(offset) {}
    std::size_t byte_offset;
};

struct ConfigError : DataError {
    ConfigError(const std::string& msg, int line_no)
        : DataError(msg), line(line_no) {}
    int line;
};

// A solver hit a non-finite objective or gradient.
struct DivergedError : Error {
    DivergedError(const std::string& msg, std::size_t it)
        : Error(msg), iteration(it) {}
    std::size_t iteration;
};

}  // namespace gstl
