#pragma once

#include <stdexcept>

namespace nsai {

// Filesystem or stream failure (missing file, unwritable directory).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed text input; messages name the offending row/column.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Well-formed input that violates a domain invariant.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nsai
