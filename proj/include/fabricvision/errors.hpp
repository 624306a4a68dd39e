#pragma once

#include <stdexcept>
#include <string>

namespace fabricvision {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid parameter or configuration (CLI exit code 2).
struct ArgumentError : Error {
    using Error::Error;
};

// Inconsistent composite data (e.g. mismatched pyramid subbands).
struct StructureError : ArgumentError {
    using ArgumentError::ArgumentError;
};

// Unreadable/unwritable files (CLI exit code 3).
struct IoError : Error {
    using Error::Error;
};

// Recognized file but unsupported encoding; message names the offending
// header field (CLI exit code 3).
struct FormatError : Error {
    using Error::Error;
};

// Degenerate numerical situation: rank-deficient fits, zero denominators
// (CLI exit code 4).
struct NumericError : Error {
    using Error::Error;
};

}  // namespace fabricvision
