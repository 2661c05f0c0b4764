// Exception types shared across the library. The C API layer maps these
// onto ss_status codes; everything below it throws.

#ifndef STOCHSYNC_CORE_ERRORS_HPP
#define STOCHSYNC_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stochsync {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument or violated precondition.
struct ValidationError : Error {
    using Error::Error;
};

// Malformed config or graph file; carries a file:line anchor in what().
struct ParseError : Error {
    ParseError(const std::string& file, int line, const std::string& msg)
        : Error(file + ":" + std::to_string(line) + ": " + msg),
          file_path(file), line_number(line) {}
    std::string file_path;
    int line_number;
};

// Operation is well-formed but the theory behind it does not apply
// (e.g. certificate requested for an independent-noise model).
struct NotApplicableError : Error {
    using Error::Error;
};

// Closed-form constants requested for a model that has none.
struct UnsupportedModelError : Error {
    using Error::Error;
};

struct EigensolverError : Error {
    using Error::Error;
};

// Too few usable points for a fit.
struct InsufficientDataError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace stochsync

#endif
