#pragma once

#include <stdexcept>
#include <string>

namespace piecevec {

// Base class for all library errors so callers can catch one type at the
// pipeline boundary and map it to a nonzero exit code.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidFen : Error {
    using Error::Error;
};

struct IllegalMove : Error {
    using Error::Error;
};

struct InvalidBucketCount : Error {
    using Error::Error;
};

struct PgnSyntaxError : Error {
    PgnSyntaxError(const std::string& msg, int line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
    int line;
};

struct IllegalSanMove : Error {
    using Error::Error;
};

struct MlogFormatError : Error {
    using Error::Error;
};

struct MissingBucketAnnotation : Error {
    using Error::Error;
};

struct EmptyDataset : Error {
    using Error::Error;
};

struct InvalidDimension : Error {
    using Error::Error;
};

struct NegativeInput : Error {
    using Error::Error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

struct ModelSchemeMismatch : Error {
    using Error::Error;
};

struct ModelFormatError : Error {
    using Error::Error;
};

struct InvalidEngineConfig : Error {
    using Error::Error;
};

struct EngineProtocolError : Error {
    using Error::Error;
};

struct IllegalEngineMove : Error {
    using Error::Error;
};

struct EngineTimeout : Error {
    using Error::Error;
};

struct ProcessError : Error {
    using Error::Error;
};

struct ManifestError : Error {
    using Error::Error;
};

}  // namespace piecevec
